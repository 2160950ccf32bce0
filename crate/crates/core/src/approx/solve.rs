//! Discrete weighted `ℓ_p` regression on a fixed design matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::quadrature::lp_from_values;
use crate::{Error, Result};

/// Relative tolerance of the reweighting iterations.
pub const IRLS_TOL: f64 = 1e-8;
pub const IRLS_MAX_ITER: usize = 200;
/// Relative gap between the node maximum and the Lawson lower bound.
pub const LAWSON_TOL: f64 = 1e-4;
pub const LAWSON_MAX_ITER: usize = 2000;
/// `|R_ii| / max |R_jj|` below which the weighted Gram matrix is singular.
const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LeastSquares,
    Irls,
    DampedIrls,
    Lawson,
}

impl Method {
    pub fn for_exponent(p: f64) -> Self {
        if p.is_infinite() {
            Method::Lawson
        } else if p == 2.0 {
            Method::LeastSquares
        } else if p >= 1.0 {
            Method::Irls
        } else {
            Method::DampedIrls
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
}

pub struct Solution {
    pub coeffs: Vec<f64>,
    pub error: f64,
    pub meta: SolverMeta,
    /// `‖Bᵀ(b − B c)‖ / (‖B‖ ‖b‖)` for the least-squares start, with
    /// `B = W^{1/2} A` and `b = W^{1/2} y`.
    pub gram_residual: f64,
}

/// `argmin_c Σ u_i (A c − y)_i²` through a thin QR of `diag(√u) A`.
fn weighted_ls(a: &DMatrix<f64>, y: &[f64], u: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (n, m) = a.shape();
    if n < m {
        return Err(Error::SingularGram);
    }
    let mut b = a.clone();
    let mut rhs = DVector::zeros(n);
    for i in 0..n {
        let s = u[i].max(0.0).sqrt();
        b.row_mut(i).scale_mut(s);
        rhs[i] = s * y[i];
    }
    let qr = b.clone().qr();
    let r = qr.r();
    let big = (0..m).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if big == 0.0 || (0..m).any(|i| r[(i, i)].abs() <= RANK_TOL * big) {
        return Err(Error::SingularGram);
    }
    let qtb = qr.q().transpose() * &rhs;
    let c = r.solve_upper_triangular(&qtb).ok_or(Error::SingularGram)?;
    let res = &rhs - &b * &c;
    let scale = b.norm() * rhs.norm();
    let gram = if scale > 0.0 {
        (b.transpose() * res).norm() / scale
    } else {
        0.0
    };
    Ok((c.iter().copied().collect(), gram))
}

fn residual(a: &DMatrix<f64>, c: &[f64], y: &[f64]) -> Vec<f64> {
    let cv = DVector::from_column_slice(c);
    let fit = a * cv;
    y.iter().zip(fit.iter()).map(|(y, f)| y - f).collect()
}

fn power_sum(r: &[f64], w: &[f64], p: f64) -> f64 {
    r.iter().zip(w).map(|(r, w)| w * r.abs().powf(p)).sum()
}

/// Best approximation of `y` from the columns of `a` in the discrete
/// `ℓ_p(w)` (quasi-)norm.
pub fn fit(a: &DMatrix<f64>, y: &[f64], w: &[f64], p: f64) -> Result<Solution> {
    let method = Method::for_exponent(p);
    let (c0, gram) = weighted_ls(a, y, w)?;
    let r0 = residual(a, &c0, y);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let r0_max = r0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let exact = r0_max <= 1e-13 * scale.max(1.0);
    if method == Method::LeastSquares || exact {
        return Ok(Solution {
            error: lp_from_values(&r0, w, p),
            coeffs: c0,
            meta: SolverMeta {
                method,
                iterations: 0,
                converged: true,
            },
            gram_residual: gram,
        });
    }
    let (coeffs, residual, iterations, converged) = match method {
        Method::Lawson => lawson(a, y, c0)?,
        _ => irls(a, y, w, p, c0, method == Method::DampedIrls)?,
    };
    Ok(Solution {
        error: lp_from_values(&residual, w, p),
        coeffs,
        meta: SolverMeta {
            method,
            iterations,
            converged,
        },
        gram_residual: gram,
    })
}

type Iterate = (Vec<f64>, Vec<f64>, usize, bool);

/// Reweighted least squares with a monotone step search; `damped` starts
/// each step at one half.
fn irls(a: &DMatrix<f64>, y: &[f64], w: &[f64], p: f64, c0: Vec<f64>, damped: bool) -> Result<Iterate> {
    let mut c = c0;
    let mut r = residual(a, &c, y);
    let mut obj = power_sum(&r, w, p);
    let mut u = vec![0.0; w.len()];
    for it in 1..=IRLS_MAX_ITER {
        let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-10 * rmax.max(f64::MIN_POSITIVE);
        for i in 0..u.len() {
            u[i] = w[i] * r[i].abs().max(floor).powf(p - 2.0);
        }
        let (target, _) = weighted_ls(a, y, &u)?;
        let mut theta = if damped { 0.5 } else { 1.0 };
        let mut accepted = None;
        while theta >= 1.0 / 1024.0 {
            let trial: Vec<f64> = c.iter().zip(&target).map(|(a, b)| a + theta * (b - a)).collect();
            let tr = residual(a, &trial, y);
            let to = power_sum(&tr, w, p);
            if to <= obj {
                accepted = Some((trial, tr, to));
                break;
            }
            theta *= 0.5;
        }
        // no step along the reweighted solution decreases the objective
        let Some((nc, nr, no)) = accepted else {
            return Ok((c, r, it, true));
        };
        let step: f64 = nc.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let size: f64 = nc.iter().map(|a| a * a).sum::<f64>().sqrt();
        let done = obj - no <= IRLS_TOL * obj || step <= IRLS_TOL * size.max(f64::MIN_POSITIVE);
        c = nc;
        r = nr;
        obj = no;
        if done {
            return Ok((c, r, it, true));
        }
    }
    Ok((c, r, IRLS_MAX_ITER, false))
}

/// Lawson's reweighting for the node-wise minimax fit. The weighted
/// least-squares error under weights summing to one bounds the minimax
/// error from below, which gives the stopping gap.
fn lawson(a: &DMatrix<f64>, y: &[f64], c0: Vec<f64>) -> Result<Iterate> {
    let n = y.len();
    let mut u = vec![1.0 / n as f64; n];
    let mut best_r = residual(a, &c0, y);
    let mut best_c = c0;
    let mut best = best_r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lower = 0.0f64;
    for it in 1..=LAWSON_MAX_ITER {
        let (c, _) = weighted_ls(a, y, &u)?;
        let r = residual(a, &c, y);
        let e = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        lower = lower.max(u.iter().zip(&r).map(|(u, r)| u * r * r).sum::<f64>().sqrt());
        if e < best {
            best = e;
            best_c = c;
            best_r = r.clone();
        }
        if best - lower <= LAWSON_TOL * best {
            return Ok((best_c, best_r, it, true));
        }
        let mut total = 0.0;
        for i in 0..n {
            u[i] *= r[i].abs();
            total += u[i];
        }
        if total <= 0.0 {
            return Ok((best_c, best_r, it, true));
        }
        let floor = 1e-12 / n as f64;
        for v in &mut u {
            *v = (*v / total).max(floor);
        }
        let total: f64 = u.iter().sum();
        for v in &mut u {
            *v /= total;
        }
    }
    Ok((best_c, best_r, LAWSON_MAX_ITER, false))
}
