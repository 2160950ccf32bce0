//! Library of scalar test fields `f(t, x)` on space-time cylinders.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::polyspace::{AffineMap, AnisoPolynomial};
use crate::{Error, Result};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "polynomial",
    "smooth_wave",
    "temporal_cusp",
    "spatial_corner",
    "mixed_cusp",
    "indicator_strip",
];

/// Anything that can be sampled pointwise on a cylinder.
pub trait Field: Sync {
    fn value(&self, t: f64, x: &[f64]) -> f64;
}

impl<F> Field for F
where
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self(t, x)
    }
}

impl Field for AnisoPolynomial {
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.eval(t, x)
    }
}

/// Claimed regularity; metadata only, never used in computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    /// `None` means no finite bound is claimed.
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub q: f64,
}

type Evaluator = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    pub label: String,
    pub d: usize,
    pub known_regularity: Option<Regularity>,
    /// Whether quadrature should subdivide elements for this field.
    pub nonsmooth: bool,
    /// Set for `polynomial` fields.
    pub polynomial: Option<AnisoPolynomial>,
    eval: Evaluator,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("d", &self.d)
            .field("known_regularity", &self.known_regularity)
            .field("nonsmooth", &self.nonsmooth)
            .finish()
    }
}

impl Field for ScalarField {
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        (self.eval)(t, x)
    }
}

impl ScalarField {
    pub fn from_fn<F>(label: impl Into<String>, d: usize, f: F) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            d,
            known_regularity: None,
            nonsmooth: false,
            polynomial: None,
            eval: Arc::new(f),
        }
    }

    pub fn polynomial(p: AnisoPolynomial) -> Self {
        let q = p.clone();
        let mut f = Self::from_fn(format!("polynomial(r1={},r2={})", p.r1, p.r2), p.d, move |t, x| {
            q.eval(t, x)
        });
        f.polynomial = Some(p);
        f
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        (self.eval)(t, x)
    }

    /// `f + g`.
    pub fn plus(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = Self::from_fn(format!("{}+{}", self.label, other.label), self.d, move |t, x| {
            a(t, x) + b(t, x)
        });
        out.nonsmooth = self.nonsmooth || other.nonsmooth;
        out
    }

    /// `f ∘ φ`.
    pub fn composed(&self, phi: AffineMap) -> ScalarField {
        let a = self.eval.clone();
        let mut out = Self::from_fn(format!("{}∘φ", self.label), self.d, move |t, x| {
            let (s, y) = phi.apply(t, x);
            a(s, &y)
        });
        out.nonsmooth = self.nonsmooth;
        out
    }
}

fn num(params: &Value, key: &'static str, default: f64) -> Result<f64> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::param(key, format!("expected a number, got {v}"))),
    }
}

fn point(params: &Value, key: &'static str, d: usize, default: f64) -> Result<Vec<f64>> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(vec![default; d]),
        Some(Value::Array(a)) if a.len() == d => a
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| Error::param(key, "expected numbers")))
            .collect(),
        Some(v) => v
            .as_f64()
            .map(|c| vec![c; d])
            .ok_or_else(|| Error::param(key, format!("expected {d} coordinates"))),
    }
}

fn norm(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Builds a named field in `d` space dimensions from JSON parameters.
///
/// - `polynomial`: `{r1, r2, coeffs}` or `{r1, r2, seed}` (uniform random coefficients)
/// - `smooth_wave`: `{k}`; `sin(kπt) Π sin(kπx_j)`
/// - `temporal_cusp`: `{alpha, t0}`; `|t − t0|^α exp(−|x|²/2)`
/// - `spatial_corner`: `{beta, x0}`; `|x − x0|^β (1 + sin(πt)/2)`
/// - `mixed_cusp`: `{alpha, beta, t0, x0}`; `|t − t0|^α |x − x0|^β`
/// - `indicator_strip`: `{t0, c, w}`; `1` on `|t − t0 − c x_1| ≤ w/2`
pub fn builtin(name: &str, params: &Value, d: usize) -> Result<ScalarField> {
    if d == 0 {
        return Err(Error::param("d", "space dimension must be positive"));
    }
    let field = match name {
        "polynomial" => {
            let r1 = num(params, "r1", 2.0)? as usize;
            let r2 = num(params, "r2", 2.0)? as usize;
            let poly = match params.get("coeffs") {
                Some(c) => {
                    let coeffs: Vec<f64> = serde_json::from_value(c.clone())
                        .map_err(|e| Error::param("coeffs", e.to_string()))?;
                    AnisoPolynomial::new(r1, r2, d, coeffs)?
                }
                None => {
                    if r1 == 0 || r2 == 0 {
                        return Err(Error::param("r1/r2", "orders must be positive"));
                    }
                    let seed = num(params, "seed", 0.0)? as u64;
                    AnisoPolynomial::random(r1, r2, d, &mut ChaCha8Rng::seed_from_u64(seed))
                }
            };
            ScalarField::polynomial(poly)
        }
        "smooth_wave" => {
            let k = num(params, "k", 1.0)?;
            let mut f = ScalarField::from_fn(format!("smooth_wave(k={k})"), d, move |t, x| {
                (k * PI * t).sin() * x.iter().map(|xi| (k * PI * xi).sin()).product::<f64>()
            });
            f.known_regularity = Some(Regularity {
                s1: None,
                s2: None,
                q: 2.0,
            });
            f
        }
        "temporal_cusp" => {
            let alpha = num(params, "alpha", 0.5)?;
            let t0 = num(params, "t0", 0.5)?;
            if alpha <= 0.0 {
                return Err(Error::param("alpha", "must be positive"));
            }
            let mut f = ScalarField::from_fn(
                format!("temporal_cusp(alpha={alpha},t0={t0})"),
                d,
                move |t, x| (t - t0).abs().powf(alpha) * (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
            );
            f.known_regularity = Some(Regularity {
                s1: Some(alpha + 0.5),
                s2: None,
                q: 2.0,
            });
            f.nonsmooth = true;
            f
        }
        "spatial_corner" => {
            let beta = num(params, "beta", 0.5)?;
            let x0 = point(params, "x0", d, 0.5)?;
            if beta <= 0.0 {
                return Err(Error::param("beta", "must be positive"));
            }
            let mut f = ScalarField::from_fn(
                format!("spatial_corner(beta={beta})"),
                d,
                move |t, x| norm(x, &x0).powf(beta) * (1.0 + 0.5 * (PI * t).sin()),
            );
            f.known_regularity = Some(Regularity {
                s1: None,
                s2: Some(beta + d as f64 / 2.0),
                q: 2.0,
            });
            f.nonsmooth = true;
            f
        }
        "mixed_cusp" => {
            let alpha = num(params, "alpha", 0.5)?;
            let beta = num(params, "beta", 0.5)?;
            let t0 = num(params, "t0", 0.5)?;
            let x0 = point(params, "x0", d, 0.5)?;
            if alpha <= 0.0 || beta <= 0.0 {
                return Err(Error::param("alpha/beta", "must be positive"));
            }
            let mut f = ScalarField::from_fn(
                format!("mixed_cusp(alpha={alpha},beta={beta})"),
                d,
                move |t, x| (t - t0).abs().powf(alpha) * norm(x, &x0).powf(beta),
            );
            f.known_regularity = Some(Regularity {
                s1: Some(alpha + 0.5),
                s2: Some(beta + d as f64 / 2.0),
                q: 2.0,
            });
            f.nonsmooth = true;
            f
        }
        "indicator_strip" => {
            let t0 = num(params, "t0", 0.5)?;
            let c = num(params, "c", 0.0)?;
            let w = num(params, "w", 0.2)?;
            if w <= 0.0 {
                return Err(Error::param("w", "strip width must be positive"));
            }
            let mut f = ScalarField::from_fn(
                format!("indicator_strip(t0={t0},c={c},w={w})"),
                d,
                move |t, x| if (t - t0 - c * x[0]).abs() <= 0.5 * w { 1.0 } else { 0.0 },
            );
            f.known_regularity = Some(Regularity {
                s1: Some(0.5),
                s2: if c == 0.0 { None } else { Some(0.5) },
                q: 2.0,
            });
            f.nonsmooth = true;
            f
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(field)
}
