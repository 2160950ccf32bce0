//! Atomic anisotropic refinement, the greedy loop and the direct-estimate
//! driver.

mod direct;
mod greedy;

pub use direct::{direct_theorem_run, rate_study, DirectRun, RateStudy, ZERO_SEMINORM};
pub use greedy::{audit, greedy, Audit, GreedyOutcome, GreedyTrace, Round, AUDIT_SLACK};

use serde::{Deserialize, Serialize};

use crate::approx::{whitney_exponent, LocalFit};
use crate::besov::{order_for, DEFAULT_N_MAX};
use crate::geometry::{temporal_level, Partition, Prism};
use crate::moduli::Sampling;
use crate::quadrature::check_p;
use crate::{Error, Result};

pub const DEFAULT_MAX_ROUNDS: usize = 30;
pub const ELEMENT_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementConfig {
    pub d: usize,
    pub s1: f64,
    pub s2: f64,
    pub r1: usize,
    pub r2: usize,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    #[serde(with = "crate::exponent")]
    pub q: f64,
    /// Marking threshold for [`greedy`].
    pub delta: Option<f64>,
    /// Target accuracy for [`direct_theorem_run`].
    pub epsilon: Option<f64>,
    pub max_rounds: usize,
    pub max_elements: usize,
    /// Finest dyadic level of the seminorm estimate.
    pub n_max: u32,
    /// Subdivide the fitting rule.
    pub nonsmooth: bool,
    pub sampling: Sampling,
}

impl RefinementConfig {
    /// Defaults with `r_i = ⌊s_i⌋ + 1` and `p = q = 2`.
    pub fn new(d: usize, s1: f64, s2: f64) -> Self {
        Self {
            d,
            s1,
            s2,
            r1: order_for(s1),
            r2: order_for(s2),
            p: 2.0,
            q: 2.0,
            delta: None,
            epsilon: None,
            max_rounds: DEFAULT_MAX_ROUNDS,
            max_elements: ELEMENT_CAP,
            n_max: DEFAULT_N_MAX,
            nonsmooth: false,
            sampling: Sampling::default(),
        }
    }

    /// `s2 / (s1 d)`.
    pub fn ratio(&self) -> f64 {
        self.s2 / (self.s1 * self.d as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::param("d", "dimension must be 1, 2 or 3"));
        }
        if !(self.s1 > 0.0 && self.s2 > 0.0 && self.s1.is_finite() && self.s2.is_finite()) {
            return Err(Error::param("s1/s2", "anisotropy parameters must be positive"));
        }
        if self.r1 == 0 || self.r2 == 0 {
            return Err(Error::param("r1/r2", "polynomial orders must be at least 1"));
        }
        check_p(self.p)?;
        check_p(self.q)?;
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::param("delta", "threshold must be positive"));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::param("epsilon", "accuracy must be positive"));
            }
        }
        if self.max_elements == 0 {
            return Err(Error::param("max_elements", "cap must be positive"));
        }
        self.sampling.validate()
    }

    /// Parameter constraints of the direct estimate.
    pub fn validate_direct(&self) -> Result<()> {
        self.validate()?;
        if self.epsilon.is_none() {
            return Err(Error::param("epsilon", "direct runs need a target accuracy"));
        }
        if !(self.r1 as f64 > self.s1 && self.r2 as f64 > self.s2) {
            return Err(Error::PreconditionViolated(format!(
                "orders ({}, {}) must exceed smoothness ({}, {})",
                self.r1, self.r2, self.s1, self.s2
            )));
        }
        let e = whitney_exponent(self.s1, self.s2, self.d, self.p, self.q);
        if !(e > 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "1/(1/s1 + d/s2) - 1/q + 1/p = {e} must be positive"
            )));
        }
        Ok(())
    }
}

/// Number of temporal bisections paired with the `n`-th spatial one:
/// `⌈n ρ⌉ − ⌈(n−1) ρ⌉` with `ρ = s2/(s1 d)`.
pub fn temporal_splits(n: u32, ratio: f64) -> u32 {
    temporal_level(n, ratio) - temporal_level(n - 1, ratio)
}

/// Largest number of children a single atomic split can produce.
pub fn max_children(ratio: f64) -> usize {
    1 << (ratio.ceil() as u32 + 1)
}

/// One spatial bisection crossed with `m` temporal bisections; returns the
/// `2^{m+1}` children, spatial index outermost.
pub fn atomic_split(el: &Prism, s1: f64, s2: f64) -> Result<Vec<Prism>> {
    let ratio = s2 / (s1 * el.dim() as f64);
    let n = el.level + 1;
    let m = temporal_splits(n, ratio);
    let (a, b) = el.space.bisect()?;
    let times = el.time.bisect_times(m);
    let mut out = Vec::with_capacity(2 * times.len());
    for s in [a, b] {
        for j in &times {
            out.push(Prism {
                time: *j,
                space: s.clone(),
                level: n,
            });
        }
    }
    Ok(out)
}

/// The elements containing `(t, x)` under repeated atomic splits, from the
/// root of `p0` down to level `levels`.
pub fn refinement_chain(p0: &Partition, t: f64, x: &[f64], levels: u32) -> Result<Vec<Prism>> {
    const TOL: f64 = 1e-12;
    let holds = |el: &Prism| el.time.contains(t, TOL) && el.space.contains(x, TOL);
    let mut el = p0.elements.iter().find(|e| holds(e)).cloned().ok_or(Error::OutOfDomain)?;
    let mut chain = vec![el.clone()];
    for _ in 0..levels {
        el = atomic_split(&el, p0.s1, p0.s2)?
            .into_iter()
            .find(|e| holds(e))
            .ok_or(Error::OutOfDomain)?;
        chain.push(el.clone());
    }
    Ok(chain)
}

/// `P = Σ 1_{J×S} P_{J×S}` over a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximant {
    pub pieces: Vec<LocalFit>,
    #[serde(with = "crate::exponent")]
    pub p: f64,
}

impl Approximant {
    /// `(Σ e^p)^{1/p}` over the pieces, or the largest error for `p = ∞`.
    pub fn global_error(&self) -> f64 {
        let errs = self.pieces.iter().map(|f| f.error);
        if self.p.is_infinite() {
            errs.fold(0.0, f64::max)
        } else {
            errs.map(|e| e.powf(self.p)).sum::<f64>().powf(1.0 / self.p)
        }
    }

    /// Value of the first piece whose element contains `(t, x)`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Option<f64> {
        const TOL: f64 = 1e-12;
        self.pieces.iter().find_map(|piece| {
            let el = &piece.element;
            let inside_t = t >= el.time[0] - TOL && t <= el.time[1] + TOL;
            (inside_t && el_contains(&el.vertices, x, TOL)).then(|| piece.eval(t, x))
        })
    }
}

fn el_contains(vertices: &[Vec<f64>], x: &[f64], tol: f64) -> bool {
    crate::geometry::Simplex::new(vertices.to_vec(), 0)
        .map(|s| s.contains(x, tol))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests;
