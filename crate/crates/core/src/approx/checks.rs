use serde::{Deserialize, Serialize};

use super::{fit, SolverMeta};
use crate::besov::{besov_seminorm, order_for};
use crate::fields::Field;
use crate::geometry::{Cylinder, Prism};
use crate::moduli::{sup_modulus, Direction, Sampling};
use crate::{Error, Result};

/// Values at or below this count as exact zeros in the reports.
pub const ZERO_TOL: f64 = 1e-10;
/// A Jackson right-hand side below this is treated as vanishing.
const RHS_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacksonReport {
    pub element_id: usize,
    /// Local best-fit error.
    pub lhs: f64,
    /// `ω_{r1,t}(f, |J|)_p + ω_{r2,x}(f, diam S)_p`.
    pub rhs: f64,
    /// `lhs / rhs`, the empirical Jackson constant; `None` in the exact case.
    pub ratio: Option<f64>,
    pub exact: bool,
    pub omega_t: f64,
    pub omega_x: f64,
    pub r1: usize,
    pub r2: usize,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    pub measure: f64,
    pub fit: SolverMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyReport {
    pub element_id: usize,
    pub lhs: f64,
    /// `|J×S|^e · |f|_{B^{s1,s2}_{q,q}(J×S)}`.
    pub rhs: f64,
    pub ratio: Option<f64>,
    /// `lhs / |f|_B(J×S)`, which scales like `|J×S|^e`.
    pub normalized: Option<f64>,
    pub exponent: f64,
    pub measure: f64,
    pub seminorm: f64,
    pub s1: f64,
    pub s2: f64,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    #[serde(with = "crate::exponent")]
    pub q: f64,
    pub r1: usize,
    pub r2: usize,
    pub truncation_warning: bool,
    pub fit: SolverMeta,
}

/// `e = 1/(1/s1 + d/s2) − 1/q + 1/p`.
pub fn whitney_exponent(s1: f64, s2: f64, d: usize, p: f64, q: f64) -> f64 {
    1.0 / (1.0 / s1 + d as f64 / s2) - 1.0 / q + 1.0 / p
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > RHS_TOL).then(|| lhs / rhs)
}

/// Local best-fit error against the moduli at the element scale.
#[allow(clippy::too_many_arguments)]
pub fn jackson_check<F: Field + ?Sized>(
    f: &F,
    prism: &Prism,
    r1: usize,
    r2: usize,
    p: f64,
    nonsmooth: bool,
    sampling: &Sampling,
) -> Result<JacksonReport> {
    let local = fit(f, prism, r1, r2, p, nonsmooth)?;
    let dom = Cylinder::from(prism);
    let omega_t = sup_modulus(f, &dom, Direction::Temporal, r1, prism.time.length(), p, sampling)?.value;
    let omega_x = sup_modulus(f, &dom, Direction::Spatial, r2, prism.space.diameter(), p, sampling)?.value;
    let (lhs, rhs) = (local.error, omega_t + omega_x);
    if rhs <= RHS_TOL && lhs > ZERO_TOL {
        return Err(Error::DegenerateRhs { lhs, rhs });
    }
    Ok(JacksonReport {
        element_id: 0,
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
        exact: rhs <= RHS_TOL,
        omega_t,
        omega_x,
        r1,
        r2,
        p,
        measure: prism.measure(),
        fit: local.solver_meta,
    })
}

/// Local best-fit error with `r_i = ⌊s_i⌋ + 1` against
/// `|J×S|^e |f|_{B^{s1,s2}_{q,q}(J×S)}`.
#[allow(clippy::too_many_arguments)]
pub fn whitney_check<F: Field + ?Sized>(
    f: &F,
    prism: &Prism,
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
    n_max: u32,
    nonsmooth: bool,
    sampling: &Sampling,
) -> Result<WhitneyReport> {
    let d = prism.dim();
    let exponent = whitney_exponent(s1, s2, d, p, q);
    if !(exponent > 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "1/(1/s1 + d/s2) - 1/q + 1/p = {exponent} must be positive"
        )));
    }
    let (r1, r2) = (order_for(s1), order_for(s2));
    let local = fit(f, prism, r1, r2, p, nonsmooth)?;
    let semi = besov_seminorm(f, &Cylinder::from(prism), s1, s2, q, q, n_max, sampling)?;
    let measure = prism.measure();
    let lhs = local.error;
    let rhs = measure.powf(exponent) * semi.seminorm;
    Ok(WhitneyReport {
        element_id: 0,
        lhs,
        rhs,
        ratio: ratio(lhs, rhs),
        normalized: ratio(lhs, semi.seminorm),
        exponent,
        measure,
        seminorm: semi.seminorm,
        s1,
        s2,
        p,
        q,
        r1,
        r2,
        truncation_warning: semi.truncation_warning,
        fit: local.solver_meta,
    })
}
