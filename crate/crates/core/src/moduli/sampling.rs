//! Deterministic shift samples `h` with ball-integration weights.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sampling configuration shared by all moduli estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampling {
    /// Magnitudes per direction, uniformly spaced in `(0, δ]`.
    pub n_mag: usize,
    /// Spatial directions; `None` means `2d·8` (always `2` when `d = 1`).
    pub n_dir: Option<usize>,
    pub seed: u64,
    /// Gauss points per direction for the shifted-domain rules.
    pub quad_order: usize,
    /// Uniform subdivision levels of every quadrature piece.
    pub subdivisions: u32,
    pub scheme: Scheme,
}

/// How shifted-domain norms are discretised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scheme {
    /// Gauss rules on the exact shifted domains.
    #[default]
    Gauss,
    /// Cell midpoints of a lattice of the given spacing, aligned with each
    /// shift direction, with shift lengths snapped to lattice multiples.
    /// Shifted copies of one node set are subsets of another, so the
    /// algebraic inequalities between moduli hold exactly for the estimator.
    Lattice { spacing: f64 },
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            n_mag: 16,
            n_dir: None,
            seed: 0,
            quad_order: 5,
            subdivisions: 0,
            scheme: Scheme::Gauss,
        }
    }
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        if self.n_mag == 0 {
            return Err(Error::param("n_mag", "need at least one magnitude"));
        }
        if self.n_dir == Some(0) {
            return Err(Error::param("n_dir", "need at least one direction"));
        }
        if self.quad_order == 0 {
            return Err(Error::param("quad_order", "need at least one point"));
        }
        if let Scheme::Lattice { spacing } = self.scheme {
            if !(spacing > 0.0 && spacing.is_finite()) {
                return Err(Error::param("spacing", "lattice spacing must be positive"));
            }
        }
        Ok(())
    }

    pub fn directions_for(&self, d: usize) -> usize {
        if d == 1 {
            2
        } else {
            self.n_dir.unwrap_or(16 * d)
        }
    }

    pub fn temporal_points(&self) -> usize {
        self.quad_order
    }

    pub fn spatial_degree(&self) -> usize {
        2 * self.quad_order - 1
    }
}

/// One shift with its weight in the quadrature of `∫_{|h| ≤ δ} · dh`.
#[derive(Clone, Debug, PartialEq)]
pub struct HSample {
    pub h: Vec<f64>,
    pub weight: f64,
}

/// `|S^{d−1}|`.
pub fn sphere_measure(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            // 2 π^{d/2} / Γ(d/2)
            let half = d as f64 / 2.0;
            let gamma = if d % 2 == 0 {
                (1..d / 2).map(|k| k as f64).product::<f64>()
            } else {
                let mut g = PI.sqrt();
                let mut k = 0.5;
                while k < half - 0.25 {
                    g *= k;
                    k += 1.0;
                }
                g
            };
            2.0 * PI.powf(half) / gamma
        }
    }
}

/// Unit directions: `±1` in one dimension, equally spaced angles with a
/// seeded offset in two, a seeded Fibonacci spiral in three and beyond.
pub fn directions(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.0..1.0);
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|k| {
                let a = 2.0 * PI * (k as f64 + offset) / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let a = golden * k as f64 + 2.0 * PI * offset;
                    let mut v = vec![rho * a.cos(), rho * a.sin(), z];
                    v.resize(d, 0.0);
                    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    v.iter().map(|c| c / norm).collect()
                })
                .collect()
        }
    }
}

/// Shifts `ρ_k θ` with `ρ_k = radius·k/n_mag` over the direction set.
///
/// Weights are the trapezoid rule in `ρ` (the `ρ = 0` node contributes
/// nothing since `Δ^r_0 = 0`) times `ρ^{d−1}` times `|S^{d−1}|/n_dir`, so
/// they sum to at most `(2·radius)^d`.
pub fn h_samples(d: usize, radius: f64, sampling: &Sampling) -> Vec<HSample> {
    let n = sampling.n_mag;
    let dirs = directions(d, sampling.directions_for(d), sampling.seed);
    let step = radius / n as f64;
    let sphere = sphere_measure(d) / dirs.len() as f64;
    let mut out = Vec::with_capacity(n * dirs.len());
    for k in 1..=n {
        let mut rho = radius * k as f64 / n as f64;
        if let Scheme::Lattice { spacing } = sampling.scheme {
            rho = spacing * (rho / spacing).round();
            if rho == 0.0 {
                continue;
            }
        }
        let trap = if k == n { 0.5 } else { 1.0 };
        let weight = trap * step * rho.powi(d as i32 - 1) * sphere;
        for dir in &dirs {
            out.push(HSample {
                h: dir.iter().map(|c| rho * c).collect(),
                weight,
            });
        }
    }
    out
}
