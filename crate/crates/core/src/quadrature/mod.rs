//! Tensor Gauss / collapsed-simplex quadrature and discrete `L_p` norms.

mod gauss;
mod rule;

pub use gauss::{collapsed_simplex, gauss_jacobi, gauss_legendre, gauss_legendre_unit};
pub(crate) use gauss::simplex_volume;
pub use rule::{
    prism_rule, prism_vertices, tensor_rule, QuadratureRule, TensorRule, MAX_SPATIAL_DEGREE,
    MAX_TEMPORAL_POINTS,
};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::fields::Field;
use crate::geometry::Prism;
use crate::{Error, Result};

/// Maximum number of dyadic refinement passes for sup norms.
pub const LINF_PASSES: u32 = 4;
/// Relative change below which the sup-norm refinement stops.
pub const LINF_TOL: f64 = 1e-3;

/// How to integrate over an element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub temporal_points: usize,
    pub spatial_degree: usize,
    /// Uniform subdivision levels applied before the rule.
    pub subdivisions: u32,
}

impl RuleSpec {
    pub fn new(temporal_points: usize, spatial_degree: usize) -> Self {
        Self {
            temporal_points,
            spatial_degree,
            subdivisions: 0,
        }
    }

    /// Rule for products of two members of `Π^{r1,r2}` with some headroom.
    pub fn for_orders(r1: usize, r2: usize) -> Self {
        Self::new(r1 + 2, 2 * r2 + 2)
    }

    pub fn subdivided(self, levels: u32) -> Self {
        Self {
            subdivisions: levels,
            ..self
        }
    }

    pub fn rule(&self, prism: &Prism) -> Result<QuadratureRule> {
        tensor_rule(prism.dim(), self.temporal_points, self.spatial_degree)?
            .on_subdivided(prism, self.subdivisions)
    }
}

/// `f` at every node, rejecting non-finite values.
pub fn values<F: Field + ?Sized>(f: &F, rule: &QuadratureRule) -> Result<Vec<f64>> {
    (0..rule.len())
        .map(|i| {
            let (t, x) = rule.point(i);
            checked(f, t, x)
        })
        .collect()
}

pub(crate) fn checked<F: Field + ?Sized>(f: &F, t: f64, x: &[f64]) -> Result<f64> {
    let v = f.value(t, x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue {
            value: v,
            t,
            x: x.to_vec(),
        })
    }
}

/// `Σ w_i |v_i|^p` for finite `p`.
pub fn lp_power(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        values.iter().zip(weights).map(|(v, w)| w * v * v).sum()
    } else if p == 1.0 {
        values.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
    } else {
        values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p)).sum()
    }
}

/// `(Σ w_i |v_i|^p)^{1/p}`, or `max |v_i|` for `p = ∞`.
pub fn lp_from_values(values: &[f64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        lp_power(values, weights, p).powf(1.0 / p)
    }
}

/// Discrete `‖f‖_{L_p}` on the nodes of `rule` (node maximum for `p = ∞`).
pub fn lp_norm_on_rule<F: Field + ?Sized>(f: &F, rule: &QuadratureRule, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_from_values(&values(f, rule)?, &rule.w, p))
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(Error::param("p", format!("need p in (0, ∞], got {p}")))
    }
}

/// `‖f‖_{L_p(J×S)}`.
///
/// For `p < ∞` this is the weighted node sum. For `p = ∞` see [`SupSampler`].
pub fn lp_norm<F: Field + ?Sized>(f: &F, prism: &Prism, p: f64, spec: &RuleSpec) -> Result<f64> {
    check_p(p)?;
    if p.is_finite() {
        return lp_norm_on_rule(f, &spec.rule(prism)?, p);
    }
    SupSampler::new(prism, *spec).sup(f)
}

/// Sup norm on a fixed prism: the maximum over rule nodes and prism corners
/// is refined by up to [`LINF_PASSES`] dyadic subdivision passes, stopping
/// once the relative change drops below [`LINF_TOL`]. Node sets are built on
/// first use and reused across fields.
#[derive(Debug)]
pub struct SupSampler {
    prism: Prism,
    spec: RuleSpec,
    levels: Vec<OnceLock<(Vec<f64>, Vec<f64>)>>,
}

impl SupSampler {
    pub fn new(prism: &Prism, spec: RuleSpec) -> Self {
        Self {
            prism: prism.clone(),
            spec,
            levels: (0..=LINF_PASSES).map(|_| OnceLock::new()).collect(),
        }
    }

    fn nodes(&self, pass: u32) -> Result<&(Vec<f64>, Vec<f64>)> {
        let cell = &self.levels[pass as usize];
        if let Some(n) = cell.get() {
            return Ok(n);
        }
        let levels = self.spec.subdivisions + pass;
        let prism = &self.prism;
        let rule = tensor_rule(prism.dim(), self.spec.temporal_points, self.spec.spatial_degree)?
            .on_subdivided(prism, levels)?;
        let (mut t, mut x) = (rule.t, rule.x);
        for j in &prism.time.bisect_times(levels) {
            for s in &prism.space.bisect_times(levels * prism.dim() as u32)? {
                for (tc, xc) in prism_vertices(j.start(), j.end(), s) {
                    t.push(tc);
                    x.extend(xc);
                }
            }
        }
        Ok(cell.get_or_init(|| (t, x)))
    }

    fn sup_at<F: Field + ?Sized>(&self, f: &F, pass: u32) -> Result<f64> {
        let (t, x) = self.nodes(pass)?;
        let d = self.prism.dim();
        let mut best = 0.0f64;
        for (i, &ti) in t.iter().enumerate() {
            best = best.max(checked(f, ti, &x[i * d..(i + 1) * d])?.abs());
        }
        Ok(best)
    }

    pub fn sup<F: Field + ?Sized>(&self, f: &F) -> Result<f64> {
        let mut best = self.sup_at(f, 0)?;
        for pass in 1..=LINF_PASSES {
            let next = best.max(self.sup_at(f, pass)?);
            let change = next - best;
            best = next;
            if change <= LINF_TOL * best.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        Ok(best)
    }
}
