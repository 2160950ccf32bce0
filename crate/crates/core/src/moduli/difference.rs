//! Finite differences `Δ^r_h` in time and space.

use crate::fields::Field;
use crate::geometry::{Interval, SpaceDomain};
use crate::polyspace::binomial;
use crate::quadrature::checked;
use crate::{Error, Result};

/// Tolerance for the temporal chain `t + i h ∈ I`.
const CHAIN_TOL: f64 = 1e-12;

/// `(−1)^{r−i} C(r, i)` for `i = 0..=r`.
pub fn difference_weights(r: usize) -> Vec<f64> {
    (0..=r)
        .map(|i| {
            let sign = if (r - i) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(r, i)
        })
        .collect()
}

/// `Σ_i (−1)^{r−i} C(r,i) f(t + i h_t, x + i h_x)` without domain checks.
pub fn difference<F: Field + ?Sized>(
    f: &F,
    weights: &[f64],
    h_t: f64,
    h_x: &[f64],
    t: f64,
    x: &[f64],
    scratch: &mut [f64],
) -> Result<f64> {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let s = i as f64;
        for ((y, xi), hi) in scratch.iter_mut().zip(x).zip(h_x) {
            *y = xi + s * hi;
        }
        acc += w * checked(f, t + s * h_t, scratch)?;
    }
    Ok(acc)
}

/// `Δ^r_{h,t} f(t, x)`; errors if the chain `t + i h` leaves `I`.
pub fn temporal_difference<F: Field + ?Sized>(
    f: &F,
    r: usize,
    h: f64,
    t: f64,
    x: &[f64],
    interval: &Interval,
) -> Result<f64> {
    for i in 0..=r {
        if !interval.contains(t + i as f64 * h, CHAIN_TOL) {
            return Err(Error::OutOfDomain);
        }
    }
    let zero = vec![0.0; x.len()];
    let mut scratch = vec![0.0; x.len()];
    difference(f, &difference_weights(r), h, &zero, t, x, &mut scratch)
}

/// `Δ^r_{h,x} f(t, x)`; errors if some `x + i h` leaves `D`.
pub fn spatial_difference<F: Field + ?Sized>(
    f: &F,
    r: usize,
    h: &[f64],
    t: f64,
    x: &[f64],
    domain: &SpaceDomain,
) -> Result<f64> {
    if h.len() != x.len() || x.len() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: h.len().min(x.len()),
        });
    }
    let mut y = x.to_vec();
    for i in 0..=r {
        for j in 0..x.len() {
            y[j] = x[j] + i as f64 * h[j];
        }
        if !domain.contains(&y) {
            return Err(Error::OutOfDomain);
        }
    }
    let mut scratch = vec![0.0; x.len()];
    difference(f, &difference_weights(r), 0.0, h, t, x, &mut scratch)
}

/// `Δ^r = Δ^{r−1} ∘ Δ^1`, evaluated recursively.
pub fn recursive_difference<F: Field + ?Sized>(f: &F, r: usize, h_t: f64, h_x: &[f64], t: f64, x: &[f64]) -> f64 {
    if r == 0 {
        return f.value(t, x);
    }
    let shifted: Vec<f64> = x.iter().zip(h_x).map(|(a, b)| a + b).collect();
    recursive_difference(f, r - 1, h_t, h_x, t + h_t, &shifted) - recursive_difference(f, r - 1, h_t, h_x, t, x)
}
