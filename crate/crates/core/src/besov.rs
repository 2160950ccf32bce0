//! Anisotropic Besov seminorms through the dyadic form
//!
//! `|f|_B^q ≈ Σ_n 2^{n s1 q} ω_{r1,t}(f, 2^{-n})_p^q + Σ_n 2^{n s2 q} ω_{r2,x}(f, 2^{-n})_p^q`
//!
//! with `r_i = ⌊s_i⌋ + 1`. The sum over `n ≥ 0` covers `δ ≤ 1`; each
//! direction runs to `n_max` plus the number of halvings that bring 1 down
//! to the domain extent in that direction (`|I|` or `diam D`), so small
//! elements see as many resolved levels as the unit cylinder.

use serde::{Deserialize, Serialize};

use crate::fields::Field;
use crate::geometry::{Cylinder, Partition};
use crate::moduli::{modulus_profile, Direction, Kind, Sampling};
use crate::{par, Error, Result};

/// Default dyadic truncation.
pub const DEFAULT_N_MAX: u32 = 10;
/// Ratio of the last two dyadic terms above which truncation is flagged.
pub const TRUNCATION_RATIO: f64 = 0.9;

/// Weighted dyadic terms `2^{n s} ω(2^{-n})` at one level; zero past a
/// direction's last level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTerm {
    pub n: u32,
    pub temporal: f64,
    pub spatial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovEstimate {
    pub seminorm: f64,
    pub s1: f64,
    pub s2: f64,
    #[serde(with = "crate::exponent")]
    pub p: f64,
    #[serde(with = "crate::exponent")]
    pub q: f64,
    pub r1: usize,
    pub r2: usize,
    pub kind: Kind,
    pub n_max: u32,
    /// Last level actually summed in time and in space.
    pub temporal_levels: u32,
    pub spatial_levels: u32,
    pub per_level: Vec<LevelTerm>,
    /// Largest ratio of the last two terms over both directions.
    pub tail_ratio: f64,
    pub truncation_warning: bool,
}

/// `r = ⌊s⌋ + 1`.
pub fn order_for(s: f64) -> usize {
    s.floor() as usize + 1
}

fn extra_levels(extent: f64) -> u32 {
    if extent >= 1.0 || extent <= 0.0 {
        0
    } else {
        (1.0 / extent).log2().ceil() as u32
    }
}

fn validate(s1: f64, s2: f64, p: f64, q: f64) -> Result<()> {
    if !(s1 > 0.0 && s1.is_finite()) || !(s2 > 0.0 && s2.is_finite()) {
        return Err(Error::param("s1/s2", "smoothness parameters must be positive"));
    }
    if !(q > 0.0) {
        return Err(Error::param("q", format!("need q ∈ (0, ∞], got {q}")));
    }
    if !(p > 0.0) {
        return Err(Error::param("p", format!("need p ∈ (0, ∞], got {p}")));
    }
    Ok(())
}

/// Weighted terms `2^{n s} ω(2^{-n})` for `n = 0..=levels`.
#[allow(clippy::too_many_arguments)]
fn direction_terms<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    dir: Direction,
    r: usize,
    s: f64,
    levels: u32,
    p: f64,
    kind: Kind,
    sampling: &Sampling,
) -> Result<Vec<f64>> {
    let deltas: Vec<f64> = (0..=levels).rev().map(|n| 2f64.powi(-(n as i32))).collect();
    let profile = modulus_profile(f, domain, dir, r, &deltas, p, sampling)?;
    Ok(profile
        .iter()
        .rev()
        .enumerate()
        .map(|(n, pt)| {
            let w = match kind {
                Kind::Sup => pt.sup,
                Kind::Averaged => pt.averaged,
            };
            2f64.powf(n as f64 * s) * w
        })
        .collect())
}

fn tail(terms: &[f64]) -> f64 {
    match terms {
        [.., a, b] if *a > 0.0 => b / a,
        [.., a, b] if *a == 0.0 && *b > 0.0 => f64::INFINITY,
        _ => 0.0,
    }
}

#[allow(clippy::too_many_arguments)]
fn estimate<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
    n_max: u32,
    kind: Kind,
    sampling: &Sampling,
) -> Result<BesovEstimate> {
    validate(s1, s2, p, q)?;
    let (r1, r2) = (order_for(s1), order_for(s2));
    let nt = n_max + extra_levels(domain.time.length());
    let nx = n_max + extra_levels(domain.space.diameter());
    let t = direction_terms(f, domain, Direction::Temporal, r1, s1, nt, p, kind, sampling)?;
    let x = direction_terms(f, domain, Direction::Spatial, r2, s2, nx, p, kind, sampling)?;
    let seminorm = if q.is_infinite() {
        let max = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a));
        max(&t) + max(&x)
    } else {
        let sum: f64 = t.iter().chain(&x).map(|a| a.powf(q)).sum();
        sum.powf(1.0 / q)
    };
    let tail_ratio = tail(&t).max(tail(&x));
    let per_level = (0..=nt.max(nx))
        .map(|n| LevelTerm {
            n,
            temporal: t.get(n as usize).copied().unwrap_or(0.0),
            spatial: x.get(n as usize).copied().unwrap_or(0.0),
        })
        .collect();
    Ok(BesovEstimate {
        seminorm,
        s1,
        s2,
        p,
        q,
        r1,
        r2,
        kind,
        n_max,
        temporal_levels: nt,
        spatial_levels: nx,
        per_level,
        tail_ratio,
        truncation_warning: tail_ratio > TRUNCATION_RATIO,
    })
}

/// `|f|_{B^{s1,s2}_{p,q}}` from supremum moduli.
#[allow(clippy::too_many_arguments)]
pub fn besov_seminorm<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
    n_max: u32,
    sampling: &Sampling,
) -> Result<BesovEstimate> {
    estimate(f, domain, s1, s2, p, q, n_max, Kind::Sup, sampling)
}

/// `|f|^•_{B^{s1,s2}_{q,q}}` from averaged moduli, integrability `p = q`.
pub fn averaged_seminorm<F: Field + ?Sized>(
    f: &F,
    domain: &Cylinder,
    s1: f64,
    s2: f64,
    q: f64,
    n_max: u32,
    sampling: &Sampling,
) -> Result<BesovEstimate> {
    estimate(f, domain, s1, s2, q, q, n_max, Kind::Averaged, sampling)
}

/// `Σ_{J×S ∈ P} |f|^q_{B^{s1,s2}_{q,q}(J×S)}`, or the largest local seminorm
/// for `q = ∞`.
#[allow(clippy::too_many_arguments)]
pub fn partition_seminorm_sum<F: Field + ?Sized>(
    f: &F,
    partition: &Partition,
    s1: f64,
    s2: f64,
    q: f64,
    n_max: u32,
    kind: Kind,
    sampling: &Sampling,
) -> Result<f64> {
    let local = par::try_map(&partition.elements, |el| {
        estimate(f, &Cylinder::from(el), s1, s2, q, q, n_max, kind, sampling).map(|e| e.seminorm)
    })?;
    Ok(if q.is_infinite() {
        local.iter().fold(0.0, |m: f64, &v| m.max(v))
    } else {
        local.iter().map(|v| v.powf(q)).sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::builtin;
    use crate::geometry::{Interval, Prism, Simplex};
    use crate::polyspace::AnisoPolynomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde_json::json;

    fn unit(d: usize) -> Cylinder {
        Cylinder::unit(d).unwrap()
    }

    fn quick() -> Sampling {
        Sampling {
            n_mag: 6,
            n_dir: Some(8),
            quad_order: 4,
            ..Sampling::default()
        }
    }

    #[test]
    fn orders_from_smoothness() {
        assert_eq!(order_for(0.5), 1);
        assert_eq!(order_for(1.0), 2);
        assert_eq!(order_for(2.7), 3);
    }

    #[test]
    fn polynomials_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=2 {
            for _ in 0..5 {
                let poly = AnisoPolynomial::random(3, 3, d, &mut rng);
                let e = besov_seminorm(&poly, &unit(d), 2.0, 2.0, 2.0, 2.0, DEFAULT_N_MAX, &quick()).unwrap();
                assert!(e.seminorm <= 1e-8, "{d} {}", e.seminorm);
            }
        }
    }

    #[test]
    fn smooth_wave_terms_decay() {
        let f = builtin("smooth_wave", &json!({}), 1).unwrap();
        let e = besov_seminorm(&f, &unit(1), 1.0, 1.0, 2.0, 2.0, DEFAULT_N_MAX, &quick()).unwrap();
        assert!(e.seminorm.is_finite() && e.seminorm > 0.0);
        assert!(e.tail_ratio < 1.0, "{}", e.tail_ratio);
        assert!(!e.truncation_warning);
        let late: Vec<f64> = e.per_level[4..].iter().map(|l| l.temporal).collect();
        assert!(late.windows(2).all(|w| w[1] < w[0]), "{late:?}");
    }

    #[test]
    fn monotone_in_truncation() {
        let f = builtin("mixed_cusp", &json!({}), 1).unwrap();
        let mut prev = 0.0;
        for n in [2, 4, 6, 8] {
            let e = besov_seminorm(&f, &unit(1), 0.8, 0.8, 2.0, 2.0, n, &quick()).unwrap();
            assert!(e.seminorm >= prev);
            prev = e.seminorm;
        }
    }

    #[test]
    fn small_domains_extend_levels() {
        let f = builtin("smooth_wave", &json!({}), 1).unwrap();
        let prism = Prism::new(
            Interval::new(0.0, 0.125).unwrap(),
            Simplex::new(vec![vec![0.0], vec![0.25]], 1).unwrap(),
        );
        let e = besov_seminorm(&f, &Cylinder::from(&prism), 1.0, 1.0, 2.0, 2.0, 4, &quick()).unwrap();
        assert_eq!((e.temporal_levels, e.spatial_levels), (7, 6));
        assert_eq!(e.per_level.len(), 8);
        assert_eq!(e.per_level[7].spatial, 0.0);
    }

    #[test]
    fn averaged_below_sup() {
        let f = builtin("mixed_cusp", &json!({}), 2).unwrap();
        let a = averaged_seminorm(&f, &unit(2), 0.7, 0.7, 2.0, 6, &quick()).unwrap();
        let s = besov_seminorm(&f, &unit(2), 0.7, 0.7, 2.0, 2.0, 6, &quick()).unwrap();
        assert!(a.seminorm <= s.seminorm);
        assert!(s.seminorm / a.seminorm < 100.0);
    }

    #[test]
    fn infinite_q_adds_direction_maxima() {
        let f = builtin("smooth_wave", &json!({}), 1).unwrap();
        let e = besov_seminorm(&f, &unit(1), 1.0, 1.0, 2.0, f64::INFINITY, 6, &quick()).unwrap();
        let mt = e.per_level.iter().map(|l| l.temporal).fold(0.0, f64::max);
        let mx = e.per_level.iter().map(|l| l.spatial).fold(0.0, f64::max);
        assert_eq!(e.seminorm, mt + mx);
    }

    #[test]
    fn single_element_sum_is_the_seminorm() {
        let f = builtin("smooth_wave", &json!({}), 1).unwrap();
        let prism = Prism::new(Interval::unit(), Simplex::reference(1));
        let part = Partition::single(prism.clone(), 1.0, 1.0);
        let q = 2.0;
        let sum = partition_seminorm_sum(&f, &part, 1.0, 1.0, q, 6, Kind::Sup, &quick()).unwrap();
        let e = besov_seminorm(&f, &Cylinder::from(&prism), 1.0, 1.0, q, q, 6, &quick()).unwrap();
        assert_eq!(sum, e.seminorm.powf(q));
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = |t: f64, _: &[f64]| t;
        assert!(besov_seminorm(&f, &unit(1), 0.0, 1.0, 2.0, 2.0, 4, &quick()).is_err());
        assert!(besov_seminorm(&f, &unit(1), 1.0, 1.0, 2.0, 0.0, 4, &quick()).is_err());
    }

    #[test]
    fn serialises_with_infinite_exponents() {
        let f = |t: f64, _: &[f64]| t * t;
        let e = besov_seminorm(&f, &unit(1), 1.0, 1.0, f64::INFINITY, f64::INFINITY, 3, &quick()).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.contains("\"q\":\"inf\""));
        let back: BesovEstimate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
    }
}
