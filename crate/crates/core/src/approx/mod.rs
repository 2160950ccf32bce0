//! Local best `L_p` approximation from `Π^{r1,r2}` on a prism, and the
//! Jackson and Whitney harnesses built on it.
//!
//! Fits are computed in the element frame `τ = 2(t − t_J)/|J|`,
//! `ξ = 2(x − c_S)/diam S`, which keeps the design matrix well conditioned
//! on small elements; [`LocalFit::poly`] is the same polynomial in global
//! coordinates.

mod checks;
mod solve;

pub use checks::{jackson_check, whitney_check, whitney_exponent, JacksonReport, WhitneyReport, ZERO_TOL};
pub use solve::{Method, SolverMeta, IRLS_MAX_ITER, IRLS_TOL, LAWSON_MAX_ITER, LAWSON_TOL};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fields::Field;
use crate::geometry::{Prism, PrismRecord};
use crate::polyspace::{basis_dimension, full_basis, AffineMap, AnisoPolynomial};
use crate::quadrature::{check_p, values, QuadratureRule, RuleSpec};
use crate::{par, Error, Result};

/// Subdivision levels of the fitting rule for fields flagged non-smooth.
pub const NONSMOOTH_LEVELS: u32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFit {
    pub element: PrismRecord,
    /// The fit in global coordinates.
    pub poly: AnisoPolynomial,
    /// The fit in the element frame.
    pub local: AnisoPolynomial,
    /// Global coordinates to the element frame.
    pub frame: AffineMap,
    /// Discrete `L_p` norm of the residual on the rule.
    pub error: f64,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    pub solver_meta: SolverMeta,
    pub gram_residual: f64,
}

impl LocalFit {
    /// Value of the fit, evaluated through the element frame.
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        let (tau, xi) = self.frame.apply(t, x);
        self.local.eval(tau, &xi)
    }
}

/// Affine map from global coordinates onto the element frame.
pub fn element_frame(prism: &Prism) -> AffineMap {
    let (len, mid) = (prism.time.length(), prism.time.midpoint());
    let c = prism.space.centroid();
    let half = prism.space.diameter() / 2.0;
    AffineMap::scaling(
        2.0 / len,
        -2.0 * mid / len,
        1.0 / half,
        c.iter().map(|v| -v / half).collect(),
    )
}

/// Rule used by [`fit`]: exact for products of two members of
/// `Π^{r1,r2}`, subdivided for non-smooth fields.
pub fn fit_rule(prism: &Prism, r1: usize, r2: usize, nonsmooth: bool) -> Result<QuadratureRule> {
    let spec = RuleSpec::for_orders(r1, r2);
    let spec = if nonsmooth { spec.subdivided(NONSMOOTH_LEVELS) } else { spec };
    spec.rule(prism)
}

/// `argmin_{P ∈ Π^{r1,r2}} ‖f − P‖_{ℓ_p}` over the nodes and weights of
/// `rule`.
pub fn best_fit<F: Field + ?Sized>(
    f: &F,
    prism: &Prism,
    r1: usize,
    r2: usize,
    p: f64,
    rule: &QuadratureRule,
) -> Result<LocalFit> {
    check_p(p)?;
    if r1 == 0 || r2 == 0 {
        return Err(Error::param("r1/r2", "polynomial orders must be at least 1"));
    }
    let d = prism.dim();
    if rule.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rule.d,
        });
    }
    let frame = element_frame(prism);
    let m = basis_dimension(r1, r2, d);
    let n = rule.len();
    let mut a = DMatrix::zeros(n, m);
    let mut row = vec![0.0; m];
    for i in 0..n {
        let (t, x) = rule.point(i);
        let (tau, xi) = frame.apply(t, x);
        full_basis(r1, r2, tau, &xi, &mut row);
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    let y = values(f, rule)?;
    let sol = solve::fit(&a, &y, &rule.w, p)?;
    let local = AnisoPolynomial::new(r1, r2, d, sol.coeffs)?;
    let poly = local.pullback(&frame)?;
    Ok(LocalFit {
        element: PrismRecord::from(prism),
        poly,
        local,
        frame,
        error: sol.error,
        p,
        solver_meta: sol.meta,
        gram_residual: sol.gram_residual,
    })
}

/// [`best_fit`] on the default [`fit_rule`].
pub fn fit<F: Field + ?Sized>(f: &F, prism: &Prism, r1: usize, r2: usize, p: f64, nonsmooth: bool) -> Result<LocalFit> {
    let rule = fit_rule(prism, r1, r2, nonsmooth)?;
    best_fit(f, prism, r1, r2, p, &rule)
}

/// Independent fits on many elements.
pub fn fit_all<F: Field + ?Sized>(
    f: &F,
    prisms: &[Prism],
    r1: usize,
    r2: usize,
    p: f64,
    nonsmooth: bool,
) -> Result<Vec<LocalFit>> {
    par::try_map(prisms, |el| fit(f, el, r1, r2, p, nonsmooth))
}

#[cfg(test)]
mod tests;
