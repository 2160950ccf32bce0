//! Temporal and spatial moduli of smoothness, supremum and averaged forms.
//!
//! The supremum over `|h| ≤ δ` is approximated from below by the shifts of
//! [`h_samples`]; the averaged form integrates the same samples over the
//! ball `|h| ≤ δ` and divides by `(2δ)^d`. Shifts longer than the domain
//! allows (`r|h| ≥ |I|` in time, `r|h| ≥ diam D` in space) give empty
//! shifted domains and are not sampled.

mod difference;
mod sampling;
mod shifted;

pub use difference::{
    difference, difference_weights, recursive_difference, spatial_difference, temporal_difference,
};
pub use sampling::{directions, h_samples, sphere_measure, HSample, Sampling, Scheme};
pub use shifted::shifted_interval;

use serde::{Deserialize, Serialize};

use crate::fields::Field;
use crate::geometry::Cylinder;
use crate::quadrature::{check_p, lp_from_values, tensor_rule, TensorRule};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Temporal,
    Spatial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sup,
    Averaged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub n_dir: usize,
    pub n_mag: usize,
    pub seed: u64,
    pub quad_order: usize,
    /// Largest sampled `|h|`: `min(δ, |I|/r)` or `min(δ, diam D / r)`.
    pub radius: f64,
    /// Inradius of the spatial domain, standing in for its Lipschitz
    /// parameter.
    pub inradius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub kind: Kind,
    pub direction: Direction,
    pub r: usize,
    pub delta: f64,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    pub sample_meta: SampleMeta,
}

/// Both forms at one `δ` from one sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub delta: f64,
    pub sup: f64,
    pub averaged: f64,
}

/// Largest useful shift length.
pub fn radius_cap(domain: &Cylinder, dir: Direction, r: usize) -> f64 {
    let len = match dir {
        Direction::Temporal => domain.time.length(),
        Direction::Spatial => domain.space.diameter(),
    };
    if r == 0 {
        len
    } else {
        len / r as f64
    }
}

/// `δ0` below which the averaged and supremum forms are equivalent:
/// `|I|/(4r)` in time, `ρ_D/(4r)` in space with the inradius `ρ_D` in place
/// of the Lipschitz parameter.
pub fn equivalence_threshold(domain: &Cylinder, dir: Direction, r: usize) -> f64 {
    let scale = match dir {
        Direction::Temporal => domain.time.length(),
        Direction::Spatial => domain.space.inradius(),
    };
    scale / (4.0 * r.max(1) as f64)
}

fn direction_dim(domain: &Cylinder, dir: Direction) -> usize {
    match dir {
        Direction::Temporal => 1,
        Direction::Spatial => domain.dim(),
    }
}

fn meta(domain: &Cylinder, dir: Direction, sampling: &Sampling, radius: f64) -> SampleMeta {
    SampleMeta {
        n_dir: match dir {
            Direction::Temporal => 2,
            Direction::Spatial => sampling.directions_for(domain.dim()),
        },
        n_mag: sampling.n_mag,
        seed: sampling.seed,
        quad_order: sampling.quad_order,
        radius,
        inradius: domain.space.inradius(),
    }
}

fn validate(domain: &Cylinder, delta: f64, p: f64, sampling: &Sampling) -> Result<()> {
    check_p(p)?;
    sampling.validate()?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("need a finite δ ≥ 0, got {delta}")));
    }
    if domain.dim() == 0 {
        return Err(Error::EmptyPartition);
    }
    Ok(())
}

/// `‖Δ^r_h f‖_{L_p}` over the shifted domain for each sample; the shared
/// ingredient of every estimate.
pub fn shift_norms<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    samples: &[HSample],
    p: f64,
    sampling: &Sampling,
) -> Result<Vec<f64>> {
    check_p(p)?;
    if let Scheme::Lattice { spacing } = sampling.scheme {
        let space_rule = tensor_rule(domain.dim(), 1, sampling.spatial_degree())?;
        return par::try_map(samples, |s| {
            let rule = match dir {
                Direction::Temporal => shifted::temporal_lattice(domain, r, s.h[0], spacing, &space_rule),
                Direction::Spatial => {
                    shifted::spatial_lattice(domain, r, &s.h, spacing, sampling.temporal_points())
                }
            };
            let shifted = shifted::ShiftedRule {
                rule,
                corners: Vec::new(),
            };
            norm_on(f, domain, dir, r, &s.h, p, &shifted)
        });
    }
    let tensor = tensor_rule(domain.dim(), sampling.temporal_points(), sampling.spatial_degree())?;
    par::try_map(samples, |s| shift_norm(f, domain, dir, r, &s.h, p, &tensor, sampling.subdivisions))
}

#[allow(clippy::too_many_arguments)]
fn shift_norm<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    h: &[f64],
    p: f64,
    tensor: &TensorRule,
    levels: u32,
) -> Result<f64> {
    let corners = p.is_infinite();
    let shifted = match dir {
        Direction::Temporal => shifted::temporal(domain, r, h[0], tensor, levels, corners)?,
        Direction::Spatial => shifted::spatial(domain, r, h, tensor, levels, corners)?,
    };
    norm_on(f, domain, dir, r, h, p, &shifted)
}

fn norm_on<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    h: &[f64],
    p: f64,
    shifted: &shifted::ShiftedRule,
) -> Result<f64> {
    let d = domain.dim();
    let (h_t, h_x) = match dir {
        Direction::Temporal => (h[0], vec![0.0; d]),
        Direction::Spatial => (0.0, h.to_vec()),
    };
    let weights = difference_weights(r);
    let mut scratch = vec![0.0; d];
    let rule = &shifted.rule;
    let mut vals = Vec::with_capacity(rule.len());
    for i in 0..rule.len() {
        let (t, x) = rule.point(i);
        vals.push(difference(f, &weights, h_t, &h_x, t, x, &mut scratch)?);
    }
    let mut norm = lp_from_values(&vals, &rule.w, p);
    if p.is_infinite() {
        for (t, x) in &shifted.corners {
            norm = norm.max(difference(f, &weights, h_t, &h_x, *t, x, &mut scratch)?.abs());
        }
    }
    Ok(norm)
}

/// Raw estimates at one `δ`: `(sup over samples, averaged, radius)`.
fn raw<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    delta: f64,
    p: f64,
    sampling: &Sampling,
) -> Result<(f64, f64, f64)> {
    validate(domain, delta, p, sampling)?;
    if delta == 0.0 && r >= 1 {
        return Ok((0.0, 0.0, 0.0));
    }
    let radius = delta.min(radius_cap(domain, dir, r));
    let dd = direction_dim(domain, dir);
    let samples = h_samples(dd, radius, sampling);
    let norms = shift_norms(f, domain, dir, r, &samples, p, sampling)?;
    let sup = norms.iter().fold(0.0f64, |m, &v| m.max(v));
    let averaged = if p.is_infinite() {
        sup
    } else {
        let integral: f64 = samples
            .iter()
            .zip(&norms)
            .map(|(s, n)| s.weight * n.powf(p))
            .sum();
        (integral / (2.0 * delta).powi(dd as i32)).powf(1.0 / p)
    };
    Ok((sup, averaged, radius))
}

/// `ω_r(f, domain, δ)_p` in the given direction.
pub fn sup_modulus<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    delta: f64,
    p: f64,
    sampling: &Sampling,
) -> Result<ModulusEstimate> {
    let (sup, _, radius) = raw(f, domain, dir, r, delta, p, sampling)?;
    Ok(ModulusEstimate {
        value: sup,
        kind: Kind::Sup,
        direction: dir,
        r,
        delta,
        p,
        sample_meta: meta(domain, dir, sampling, radius),
    })
}

/// `w_r(f, domain, δ)_p`; equal to the supremum form for `p = ∞`.
pub fn averaged_modulus<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    delta: f64,
    p: f64,
    sampling: &Sampling,
) -> Result<ModulusEstimate> {
    let (_, averaged, radius) = raw(f, domain, dir, r, delta, p, sampling)?;
    Ok(ModulusEstimate {
        value: averaged,
        kind: Kind::Averaged,
        direction: dir,
        r,
        delta,
        p,
        sample_meta: meta(domain, dir, sampling, radius),
    })
}

/// Both forms over an ascending list of `δ`.
///
/// The supremum column is a running maximum: the samples for every
/// `δ_i ≤ δ_j` are admissible shifts at `δ_j`, so the estimator is exactly
/// nondecreasing in `δ`.
pub fn modulus_profile<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    deltas: &[f64],
    p: f64,
    sampling: &Sampling,
) -> Result<Vec<ProfilePoint>> {
    if deltas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("deltas", "must be ascending"));
    }
    let mut running = 0.0f64;
    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let (sup, averaged, _) = raw(f, domain, dir, r, delta, p, sampling)?;
        running = running.max(sup);
        out.push(ProfilePoint {
            delta,
            sup: running,
            averaged,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
