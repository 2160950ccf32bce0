use super::*;
use crate::fields::builtin;
use crate::geometry::{Cylinder, Interval, Partition, Simplex};
use crate::polyspace::AnisoPolynomial;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn root(d: usize, s1: f64, s2: f64) -> Partition {
    Partition::tensor(Cylinder::unit(d).unwrap(), 1, s1, s2).unwrap()
}

fn quick() -> Sampling {
    Sampling {
        n_mag: 6,
        n_dir: Some(8),
        quad_order: 4,
        ..Sampling::default()
    }
}

fn cfg(d: usize, s1: f64, s2: f64, delta: f64) -> RefinementConfig {
    RefinementConfig {
        delta: Some(delta),
        n_max: 6,
        sampling: quick(),
        ..RefinementConfig::new(d, s1, s2)
    }
}

fn chain_counts(d: usize, s1: f64, s2: f64, n: usize) -> Vec<usize> {
    let mut el = root(d, s1, s2).elements[0].clone();
    let mut counts = Vec::new();
    for _ in 0..n {
        let kids = atomic_split(&el, s1, s2).unwrap();
        counts.push(kids.len());
        el = kids[0].clone();
    }
    counts
}

#[test]
fn child_counts() {
    assert_eq!(chain_counts(2, 1.0, 4.0, 10), vec![8; 10]);
    assert_eq!(chain_counts(1, 1.0, 1.0, 6), vec![4; 6]);
    assert_eq!(chain_counts(1, 2.0, 1.0, 4), vec![4, 2, 4, 2]);
    assert_eq!(chain_counts(3, 1.0, 1.0, 6), vec![4, 2, 2, 4, 2, 2]);
}

#[test]
fn temporal_split_counts() {
    assert_eq!((1..=4).map(|n| temporal_splits(n, 0.5)).collect::<Vec<_>>(), vec![1, 0, 1, 0]);
    assert_eq!((1..=3).map(|n| temporal_splits(n, 1.0 / 3.0)).collect::<Vec<_>>(), vec![1, 0, 0]);
    assert_eq!(max_children(2.0), 8);
    assert_eq!(max_children(0.5), 4);
}

#[test]
fn children_tile_the_parent() {
    let el = root(2, 1.0, 4.0).elements[0].clone();
    let kids = atomic_split(&el, 1.0, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let t = rng.gen_range(0.0..1.0);
        let (a, b): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let x = if a + b <= 1.0 { [a, b] } else { [1.0 - a, 1.0 - b] };
        let hits = kids
            .iter()
            .filter(|k| k.time.contains(t, -1e-12) && k.space.contains(&x, -1e-12))
            .count();
        assert!(hits <= 1);
    }
}

#[test]
fn uniform_rounds_keep_shape() {
    let mut p = root(2, 1.0, 2.0);
    p.elements = Simplex::reference(2)
        .bisect_times(0)
        .unwrap()
        .into_iter()
        .map(|s| Prism::new(Interval::unit(), s))
        .collect();
    let k0 = p.kappa().unwrap();
    let a0 = p.anisotropy_ratio().unwrap();
    for _ in 0..5 {
        p.elements = p
            .elements
            .iter()
            .flat_map(|e| atomic_split(e, 1.0, 2.0).unwrap())
            .collect();
        assert!((p.measure() - 0.5).abs() < 1e-14);
        assert!(p.elements.iter().all(|e| e.levels_consistent(1.0, 2.0)));
        assert!(p.kappa().unwrap() <= 4.0 * k0);
        assert!(p.anisotropy_ratio().unwrap() <= 4.0 * a0);
    }
    assert_eq!(p.len(), 4usize.pow(5));
}

#[test]
fn chain_shrinks_around_the_point() {
    let p0 = root(2, 1.0, 2.0);
    let chain = refinement_chain(&p0, 0.3, &[0.2, 0.2], 6).unwrap();
    assert_eq!(chain.len(), 7);
    for (k, w) in chain.windows(2).enumerate() {
        assert_eq!(w[1].level, k as u32 + 1);
        assert!(w[1].measure() < w[0].measure());
        assert!(w[1].time.contains(0.3, 1e-12) && w[1].space.contains(&[0.2, 0.2], 1e-12));
    }
    assert!(matches!(refinement_chain(&p0, 2.0, &[0.2, 0.2], 1), Err(Error::OutOfDomain)));
}

#[test]
fn polynomial_needs_no_rounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 1..=2 {
        let poly = AnisoPolynomial::random(2, 2, d, &mut rng);
        let out = greedy(&poly, &root(d, 1.0, 1.0), &cfg(d, 1.0, 1.0, 1e-6)).unwrap();
        assert!(out.trace.terminated);
        assert_eq!(out.trace.refinements(), 0);
        assert_eq!(out.partition.len(), root(d, 1.0, 1.0).len());
        assert!(out.approximant.global_error() <= 1e-10);
    }
}

#[test]
fn greedy_meets_the_threshold() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let c = cfg(1, 1.0, 1.0, 1e-3);
    let out = greedy(&f, &root(1, 1.0, 1.0), &c).unwrap();
    assert!(out.trace.terminated);
    let a = audit(&f, &out, &c).unwrap();
    assert!(a.passed, "{a:?}");
    for w in out.trace.rounds.windows(2) {
        assert!(w[0].marked > 0 && w[1].elements > w[0].elements);
    }
    // complexity accounting
    let added: usize = out.trace.rounds.iter().map(|r| r.added).sum();
    assert_eq!(out.partition.len() - 1, added);
    assert!(added <= (max_children(c.ratio()) - 1) * out.trace.total_marked());
    assert!(out.partition.elements.iter().all(|e| e.levels_consistent(1.0, 1.0)));
    assert!((out.partition.measure() - 1.0).abs() < 1e-13);
}

#[test]
fn smaller_threshold_more_elements() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let mut last = 0;
    for delta in [1e-1, 3e-2, 1e-2, 3e-3] {
        let n = greedy(&f, &root(1, 1.0, 1.0), &cfg(1, 1.0, 1.0, delta)).unwrap().partition.len();
        assert!(n >= last);
        last = n;
    }
    assert!(last > 1);
}

#[test]
fn round_and_element_limits() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let c = RefinementConfig {
        max_rounds: 2,
        ..cfg(1, 1.0, 1.0, 1e-8)
    };
    let out = greedy(&f, &root(1, 1.0, 1.0), &c).unwrap();
    assert!(!out.trace.terminated);
    assert_eq!(out.trace.rounds.len(), 3);
    assert!(matches!(out.ensure_terminated(), Err(Error::MaxRoundsExceeded { .. })));
    let c = RefinementConfig {
        max_elements: 10,
        ..cfg(1, 1.0, 1.0, 1e-8)
    };
    assert!(matches!(greedy(&f, &root(1, 1.0, 1.0), &c), Err(Error::ElementCap { cap: 10 })));
}

#[test]
fn approximant_evaluates_pieces() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let out = greedy(&f, &root(2, 1.0, 2.0), &cfg(2, 1.0, 2.0, 2e-2)).unwrap();
    assert!(out.partition.len() > 2);
    let (t, x) = (0.3, [0.2, 0.3]);
    let v = out.approximant.eval(t, &x).unwrap();
    assert!((v - f.eval(t, &x)).abs() < 0.2);
    assert!(out.approximant.eval(0.3, &[1.5, 0.5]).is_none());
}

#[test]
fn direct_run_on_a_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let poly = AnisoPolynomial::random(2, 2, 1, &mut rng);
    let c = RefinementConfig {
        epsilon: Some(0.1),
        ..cfg(1, 1.0, 1.0, 1.0)
    };
    let (run, _) = direct_theorem_run(&poly, &root(1, 1.0, 1.0), &c).unwrap();
    assert_eq!(run.added, 0);
    assert!(run.global_error <= 1e-10);
}

#[test]
fn direct_run_threshold() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let c = RefinementConfig {
        epsilon: Some(0.2),
        delta: None,
        ..cfg(1, 1.0, 1.0, 1.0)
    };
    let (run, approx) = direct_theorem_run(&f, &root(1, 1.0, 1.0), &c).unwrap();
    assert!((run.delta - 0.2f64.powi(2) * run.seminorm).abs() <= 1e-14 * run.delta);
    assert!(run.added > 0 && run.c2.unwrap().is_finite());
    assert!((approx.unwrap().global_error() - run.global_error).abs() < 1e-15);
}

#[test]
fn direct_run_preconditions() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let bad = RefinementConfig {
        r1: 1,
        epsilon: Some(0.1),
        ..cfg(1, 1.0, 1.0, 1.0)
    };
    assert!(matches!(
        direct_theorem_run(&f, &root(1, 1.0, 1.0), &bad),
        Err(Error::PreconditionViolated(_))
    ));
    let none = cfg(1, 1.0, 1.0, 1.0);
    assert!(direct_theorem_run(&f, &root(1, 1.0, 1.0), &none).is_err());
}

#[test]
fn config_and_trace_serialise() {
    let c = RefinementConfig {
        p: f64::INFINITY,
        ..cfg(1, 1.0, 1.0, 0.1)
    };
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(serde_json::from_str::<RefinementConfig>(&text).unwrap(), c);
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let out = greedy(&f, &root(1, 1.0, 1.0), &cfg(1, 1.0, 1.0, 0.05)).unwrap();
    let text = serde_json::to_string(&out.trace).unwrap();
    assert_eq!(serde_json::from_str::<GreedyTrace>(&text).unwrap(), out.trace);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_split_chains(seed in 0u64..10_000, d in 1usize..=3, ri in 0usize..5) {
        let s2 = [0.5, 1.0, 2.0, 3.0, 4.0][ri];
        let s1 = 1.0;
        let ratio = s2 / (s1 * d as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p0 = root(d, s1, s2);
        let mut el = p0.elements[rng.gen_range(0..p0.len())].clone();
        let a0 = el.imbalance(s1, s2);
        for _ in 0..10 {
            let kids = atomic_split(&el, s1, s2).unwrap();
            let m = temporal_splits(el.level + 1, ratio);
            prop_assert_eq!(kids.len(), 1 << (m + 1));
            prop_assert!(kids.len() <= max_children(ratio));
            let total: f64 = kids.iter().map(|k| k.measure()).sum();
            prop_assert!((total - el.measure()).abs() <= 1e-14 * el.measure());
            for k in &kids {
                prop_assert!(k.levels_consistent(s1, s2));
                prop_assert!(k.imbalance(s1, s2) <= 4.0 * a0);
            }
            el = kids[rng.gen_range(0..kids.len())].clone();
        }
    }
}
