use super::*;
use crate::fields::builtin;
use crate::geometry::{Interval, Prism, Simplex, SpaceDomain};
use crate::mu;
use crate::polyspace::{AffineMap, AnisoPolynomial};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn small() -> Sampling {
    Sampling {
        n_mag: 6,
        n_dir: Some(8),
        seed: 7,
        quad_order: 4,
        subdivisions: 0,
        scheme: Scheme::Gauss,
    }
}

/// Lattice sampling whose shifts at `δ = k·n_mag·g` nest exactly.
fn lattice() -> Sampling {
    Sampling {
        n_mag: 4,
        scheme: Scheme::Lattice { spacing: 1.0 / 64.0 },
        ..small()
    }
}

fn unit(d: usize) -> Cylinder {
    Cylinder::unit(d).unwrap()
}

fn both(d: usize) -> [Direction; 2] {
    let _ = d;
    [Direction::Temporal, Direction::Spatial]
}

#[test]
fn polynomials_have_zero_moduli() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in 1..=2 {
        let p = AnisoPolynomial::random(3, 2, d, &mut rng);
        for (dir, r) in [(Direction::Temporal, 3), (Direction::Spatial, 2)] {
            for pe in [1.0, 2.0, f64::INFINITY] {
                let w = sup_modulus(&p, &unit(d), dir, r, 0.3, pe, &small()).unwrap();
                assert!(w.value <= 1e-10, "{dir:?} {pe} {}", w.value);
            }
        }
    }
}

#[test]
fn linear_in_time_sup() {
    let f = |t: f64, _: &[f64]| t;
    for delta in [0.1, 0.5, 1.0] {
        let w = sup_modulus(&f, &unit(1), Direction::Temporal, 1, delta, f64::INFINITY, &small()).unwrap();
        assert!((w.value - delta).abs() < 1e-12, "{delta} {}", w.value);
    }
}

#[test]
fn zero_delta() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    for dir in both(2) {
        let w = averaged_modulus(&f, &unit(2), dir, 2, 0.0, 2.0, &small()).unwrap();
        assert_eq!(w.value, 0.0);
    }
}

#[test]
fn infinity_aliases_sup() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let a = averaged_modulus(&f, &unit(1), Direction::Spatial, 2, 0.2, f64::INFINITY, &small()).unwrap();
    let s = sup_modulus(&f, &unit(1), Direction::Spatial, 2, 0.2, f64::INFINITY, &small()).unwrap();
    assert_eq!(a.value, s.value);
}

#[test]
fn shrunken_triangle_area_matches_monte_carlo() {
    let tri = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
    let dom = Cylinder::new(Interval::unit(), SpaceDomain::simplex(tri.clone()));
    let tensor = tensor_rule(2, 2, 2).unwrap();
    let h = [0.3, 0.0];
    let area = shifted::spatial(&dom, 1, &h, &tensor, 0, false).unwrap().rule.measure();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 200_000;
    let hits = (0..n)
        .filter(|_| {
            let z = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            tri.contains(&z, 0.0) && tri.contains(&[z[0] + h[0], z[1] + h[1]], 0.0)
        })
        .count();
    let mc = hits as f64 / n as f64;
    assert!((area - mc).abs() / mc < 0.02, "{area} {mc}");
    assert!((area - 0.245).abs() < 1e-12);
}

#[test]
fn filtering_agrees_with_clipping() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let convex = unit(2);
    let filtered = Cylinder::new(
        convex.time,
        SpaceDomain::new(convex.space.simplices().to_vec(), false).unwrap(),
    );
    let s = Sampling {
        quad_order: 8,
        ..small()
    };
    let a = sup_modulus(&f, &convex, Direction::Spatial, 1, 0.2, 2.0, &s).unwrap().value;
    let b = sup_modulus(&f, &filtered, Direction::Spatial, 1, 0.2, 2.0, &s).unwrap().value;
    assert!((a - b).abs() / a < 0.05, "{a} {b}");
}

#[test]
fn averaged_below_sup_and_monotone_profile() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let deltas = [0.02, 0.05, 0.1, 0.2, 0.4, 0.8];
    for dir in both(2) {
        for p in [0.5, 1.0, 2.0, f64::INFINITY] {
            let prof = modulus_profile(&f, &unit(2), dir, 2, &deltas, p, &small()).unwrap();
            for w in prof.windows(2) {
                assert!(w[1].sup >= w[0].sup);
            }
            for pt in &prof {
                assert!(pt.averaged <= pt.sup + 1e-12, "{dir:?} {p} {pt:?}");
            }
        }
    }
}

#[test]
fn temporal_equivalence_ratio_is_stable() {
    // ω ≤ C w for δ ≤ |I|/(4r)
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let dom = unit(1);
    let r = 2;
    let d0 = equivalence_threshold(&dom, Direction::Temporal, r);
    assert_eq!(d0, 0.125);
    let ratios: Vec<f64> = [d0 / 8.0, d0 / 4.0, d0 / 2.0, d0]
        .iter()
        .map(|&delta| {
            let s = sup_modulus(&f, &dom, Direction::Temporal, r, delta, 2.0, &small()).unwrap();
            let a = averaged_modulus(&f, &dom, Direction::Temporal, r, delta, 2.0, &small()).unwrap();
            s.value / a.value
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(lo >= 1.0 && hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn affine_scaling_identity() {
    // ω(f∘φ, φ^{-1}(I×D), δ/a) = (|φ^{-1}(I×D)|/|I×D|)^{1/p} ω(f, I×D, δ) for temporal
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let prism = Prism::new(Interval::unit(), Simplex::reference(2));
    let (a, b, c, v) = (0.5, 0.25, 2.0, vec![0.1, -0.2]);
    let phi = AffineMap::scaling(a, b, c, v.clone());
    let g = f.composed(phi);
    let pre = prism
        .scaled(1.0 / a, -b / a, 1.0 / c, &v.iter().map(|s| -s / c).collect::<Vec<_>>())
        .unwrap();
    let (dom, dom2) = (Cylinder::from(&prism), Cylinder::from(&pre));
    let p = 2.0;
    let ratio = (dom2.measure() / dom.measure()).powf(1.0 / p);
    for (dir, scale) in [(Direction::Temporal, a), (Direction::Spatial, c)] {
        let w = sup_modulus(&f, &dom, dir, 2, 0.2, p, &small()).unwrap().value;
        let w2 = sup_modulus(&g, &dom2, dir, 2, 0.2 / scale, p, &small()).unwrap().value;
        assert!((w2 - ratio * w).abs() <= 1e-6 * w, "{dir:?} {w2} {}", ratio * w);
    }
}

#[test]
fn estimate_serialises() {
    let f = |t: f64, _: &[f64]| t;
    let w = sup_modulus(&f, &unit(1), Direction::Temporal, 1, 0.5, f64::INFINITY, &small()).unwrap();
    let text = serde_json::to_string(&w).unwrap();
    assert!(text.contains("\"p\":\"inf\"") && text.contains("\"kind\":\"sup\""));
    let back: ModulusEstimate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, w);
}

fn shared(
    f: &dyn Field,
    d: usize,
    dir: Direction,
    r: usize,
    samples: &[HSample],
    p: f64,
) -> Vec<f64> {
    shared_with(f, d, dir, r, samples, p, &small())
}

fn shared_with(
    f: &dyn Field,
    d: usize,
    dir: Direction,
    r: usize,
    samples: &[HSample],
    p: f64,
    s: &Sampling,
) -> Vec<f64> {
    shift_norms(f, &unit(d), dir, r, samples, p, s).unwrap()
}

fn max(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subadditive_on_shared_samples(seed in 0u64..1000, d in 1usize..=2, pi in 0usize..4, spatial in any::<bool>()) {
        let p = [0.5, 1.0, 2.0, f64::INFINITY][pi];
        let dir = if spatial { Direction::Spatial } else { Direction::Temporal };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = builtin("smooth_wave", &json!({"k": rng.gen_range(0.5..2.0)}), d).unwrap();
        let g = builtin("mixed_cusp", &json!({"alpha": 0.7, "beta": 0.6}), d).unwrap();
        let fg = f.plus(&g);
        let dd = if spatial { d } else { 1 };
        let samples = h_samples(dd, rng.gen_range(0.05..0.4), &small());
        let (a, b, c) = (shared(&f, d, dir, 2, &samples, p), shared(&g, d, dir, 2, &samples, p), shared(&fg, d, dir, 2, &samples, p));
        let m = mu(p);
        for i in 0..samples.len() {
            prop_assert!(c[i].powf(m) <= a[i].powf(m) + b[i].powf(m) + 1e-12);
        }
        prop_assert!(max(&c).powf(m) <= max(&a).powf(m) + max(&b).powf(m) + 1e-12);
    }

    #[test]
    fn order_reduction_on_shared_samples(seed in 0u64..1000, d in 1usize..=2, pi in 0usize..4, spatial in any::<bool>(), r in 2usize..=3) {
        let p = [0.5, 1.0, 2.0, f64::INFINITY][pi];
        let dir = if spatial { Direction::Spatial } else { Direction::Temporal };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = builtin("smooth_wave", &json!({"k": rng.gen_range(0.5..3.0)}), d).unwrap();
        let dd = if spatial { d } else { 1 };
        let s = lattice();
        let samples = h_samples(dd, rng.gen_range(1..=4) as f64 * s.n_mag as f64 / 64.0, &s);
        let m = mu(p);
        let wr = max(&shared_with(&f, d, dir, r, &samples, p, &s));
        for k in 1..r {
            let wk = max(&shared_with(&f, d, dir, k, &samples, p, &s));
            prop_assert!(wr.powf(m) <= 2f64.powi((r - k) as i32) * wk.powf(m) + 1e-12);
        }
    }

    #[test]
    fn scaling_law(seed in 0u64..1000, d in 1usize..=2, pi in 0usize..4, spatial in any::<bool>(), m in 2usize..=3) {
        let p = [0.5, 1.0, 2.0, f64::INFINITY][pi];
        let dir = if spatial { Direction::Spatial } else { Direction::Temporal };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = builtin("smooth_wave", &json!({"k": rng.gen_range(0.5..2.0)}), d).unwrap();
        let r = 2;
        let s = lattice();
        let delta = rng.gen_range(1..=2) as f64 * s.n_mag as f64 / 64.0;
        let w1 = sup_modulus(&f, &unit(d), dir, r, delta, p, &s).unwrap().value;
        let wm = sup_modulus(&f, &unit(d), dir, r, m as f64 * delta, p, &s).unwrap().value;
        let e = mu(p);
        prop_assert!(wm.powf(e) <= (m as f64).powi(r as i32) * w1.powf(e) + 1e-12, "{} {}", wm, w1);
    }
}

#[test]
fn lattice_agrees_with_gauss() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    for dir in both(2) {
        let a = sup_modulus(&f, &unit(2), dir, 2, 0.125, 2.0, &small()).unwrap().value;
        let s = Sampling { n_mag: 6, ..lattice() };
        let b = sup_modulus(&f, &unit(2), dir, 2, 0.125, 2.0, &s).unwrap().value;
        assert!((a - b).abs() / a < 0.05, "{dir:?} {a} {b}");
    }
}
