use super::*;
use crate::fields::builtin;
use crate::geometry::{Interval, Simplex};
use crate::moduli::Sampling;
use crate::quadrature::lp_norm_on_rule;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn unit_prism(d: usize) -> Prism {
    Prism::new(Interval::unit(), Simplex::reference(d))
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
fn reproduces_polynomials_for_every_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in 1..=2 {
        let prism = Prism::new(
            Interval::new(0.2, 0.45).unwrap(),
            Simplex::reference(d).affine_image(0.3, &vec![0.1; d]).unwrap(),
        );
        let poly = AnisoPolynomial::random(3, 2, d, &mut rng);
        for p in [0.5, 1.0, 2.0, 3.0, f64::INFINITY] {
            let fit = fit(&poly, &prism, 3, 2, p, false).unwrap();
            assert!(fit.error <= 1e-10, "{d} {p} {}", fit.error);
            for (a, b) in fit.poly.coeffs.iter().zip(&poly.coeffs) {
                assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{a} {b}");
            }
        }
    }
}

#[test]
fn constant_fit_of_time() {
    // ∫_0^1 (t − 1/2)^2 dt = 1/12
    let f = |t: f64, _: &[f64]| t;
    let fit = fit(&f, &unit_prism(1), 1, 1, 2.0, false).unwrap();
    assert!((fit.poly.coeffs[0] - 0.5).abs() < 1e-14);
    assert!((fit.error - (1.0f64 / 12.0).sqrt()).abs() < 1e-12, "{}", fit.error);
}

#[test]
fn l1_constant_fit_is_the_median() {
    // argmin_c ∫_0^1 |t − c| dt = 1/2 with value 1/4
    let f = |t: f64, _: &[f64]| t;
    let prism = unit_prism(1);
    let rule = RuleSpec::new(40, 1).rule(&prism).unwrap();
    let fit = best_fit(&f, &prism, 1, 1, 1.0, &rule).unwrap();
    assert!(fit.solver_meta.converged);
    assert!((fit.poly.coeffs[0] - 0.5).abs() < 1e-3, "{}", fit.poly.coeffs[0]);
    assert!((fit.error - 0.25).abs() < 1e-3, "{}", fit.error);
}

#[test]
fn minimax_fits() {
    let prism = unit_prism(1);
    let rule = RuleSpec::new(30, 1).rule(&prism).unwrap();
    let (lo, hi) = rule.t.iter().fold((f64::MAX, f64::MIN), |(l, h), &t| (l.min(t), h.max(t)));
    let f = |t: f64, _: &[f64]| t;
    let c = best_fit(&f, &prism, 1, 1, f64::INFINITY, &rule).unwrap();
    assert!((c.error - (hi - lo) / 2.0).abs() <= 1e-4 * c.error, "{}", c.error);
    // best linear approximation of t² on [0, 1] equioscillates with error 1/8
    let g = |t: f64, _: &[f64]| t * t;
    let l = best_fit(&g, &prism, 2, 1, f64::INFINITY, &rule).unwrap();
    assert!(l.solver_meta.converged);
    assert!((l.error - 0.125).abs() < 2e-3, "{}", l.error);
}

#[test]
fn least_squares_residual_is_orthogonal() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let fit = fit(&f, &unit_prism(2), 2, 3, 2.0, false).unwrap();
    assert!(fit.gram_residual <= 1e-9, "{}", fit.gram_residual);
}

#[test]
fn least_squares_beats_random_candidates() {
    let f = builtin("mixed_cusp", &json!({}), 2).unwrap();
    let prism = unit_prism(2);
    let rule = fit_rule(&prism, 2, 2, true).unwrap();
    let best = best_fit(&f, &prism, 2, 2, 2.0, &rule).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let mut cand = best.poly.clone();
        for c in &mut cand.coeffs {
            *c += rng.gen_range(-0.1..0.1);
        }
        let diff = |t: f64, x: &[f64]| f.eval(t, x) - cand.eval(t, x);
        let err = lp_norm_on_rule(&diff, &rule, 2.0).unwrap();
        assert!(best.error <= err);
    }
}

#[test]
fn enlarging_the_space_never_hurts() {
    let f = builtin("temporal_cusp", &json!({}), 1).unwrap();
    let prism = unit_prism(1);
    let rule = fit_rule(&prism, 4, 4, true).unwrap();
    for p in [1.0, 2.0] {
        let base = best_fit(&f, &prism, 2, 2, p, &rule).unwrap().error;
        let more_t = best_fit(&f, &prism, 3, 2, p, &rule).unwrap().error;
        let more_x = best_fit(&f, &prism, 2, 3, p, &rule).unwrap().error;
        let slack = if p == 2.0 { 1e-14 } else { 1e-6 * base };
        assert!(more_t <= base + slack && more_x <= base + slack, "{p} {base} {more_t} {more_x}");
    }
}

#[test]
fn eval_matches_global_polynomial() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let prism = Prism::new(
        Interval::new(0.5, 0.625).unwrap(),
        Simplex::reference(2).affine_image(0.125, &[0.25, 0.5]).unwrap(),
    );
    let fit = fit(&f, &prism, 3, 3, 2.0, false).unwrap();
    let (t, x) = (0.55, [0.3, 0.55]);
    assert!((fit.eval(t, &x) - fit.poly.eval(t, &x)).abs() < 1e-9);
}

#[test]
fn degenerate_rule_is_singular() {
    let f = |t: f64, _: &[f64]| t;
    let prism = unit_prism(2);
    let rule = RuleSpec::new(1, 1).rule(&prism).unwrap();
    assert!(matches!(best_fit(&f, &prism, 3, 3, 2.0, &rule), Err(Error::SingularGram)));
}

#[test]
fn jackson_exact_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let poly = AnisoPolynomial::random(2, 2, 1, &mut rng);
    let rep = jackson_check(&poly, &unit_prism(1), 2, 2, 2.0, false, &quick()).unwrap();
    assert!(rep.exact && rep.ratio.is_none());
    assert!(rep.lhs <= 1e-10);
}

#[test]
fn jackson_ratio_is_stable_under_shrinking() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    for p in [2.0, f64::INFINITY] {
        let mut ratios = Vec::new();
        for k in 0..4 {
            let s = 0.5f64.powi(k);
            let prism = unit_prism(2).scaled(s, 0.1, s, &[0.1, 0.1]).unwrap();
            let rep = jackson_check(&f, &prism, 2, 2, p, false, &quick()).unwrap();
            ratios.push(rep.ratio.unwrap());
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(lo > 0.0 && hi.is_finite());
        if p == 2.0 {
            assert!(hi / lo < 3.0, "{ratios:?}");
        }
    }
}

#[test]
fn jackson_ratio_is_scale_invariant() {
    let f = builtin("smooth_wave", &json!({}), 2).unwrap();
    let prism = unit_prism(2);
    let (a, b, c, v) = (0.5, 0.25, 2.0, vec![0.1, -0.2]);
    let g = f.composed(AffineMap::scaling(a, b, c, v.clone()));
    let pre = prism
        .scaled(1.0 / a, -b / a, 1.0 / c, &v.iter().map(|s| -s / c).collect::<Vec<_>>())
        .unwrap();
    let r1 = jackson_check(&f, &prism, 2, 2, 2.0, false, &quick()).unwrap().ratio.unwrap();
    let r2 = jackson_check(&g, &pre, 2, 2, 2.0, false, &quick()).unwrap().ratio.unwrap();
    assert!((r1 - r2).abs() <= 1e-6 * r1, "{r1} {r2}");
}

#[test]
fn whitney_exponent_values() {
    assert_eq!(whitney_exponent(1.0, 1.0, 1, 2.0, 2.0), 0.5);
    assert!((whitney_exponent(1.0, 4.0, 2, 1.0, 2.0) - (2.0 / 3.0 + 0.5)).abs() < 1e-15);
    assert_eq!(whitney_exponent(1.0, 1.0, 1, f64::INFINITY, f64::INFINITY), 0.5);
}

#[test]
fn whitney_precondition() {
    let f = |t: f64, _: &[f64]| t;
    let err = whitney_check(&f, &unit_prism(2), 0.5, 0.5, 1.0, 0.2, 4, false, &quick());
    assert!(matches!(err, Err(Error::PreconditionViolated(_))));
}

#[test]
fn whitney_polynomial_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let poly = AnisoPolynomial::random(2, 2, 1, &mut rng);
    let rep = whitney_check(&poly, &unit_prism(1), 1.0, 1.0, 2.0, 2.0, 6, false, &quick()).unwrap();
    assert_eq!(rep.exponent, 0.5);
    assert!(rep.lhs <= 1e-10 && rep.rhs <= 1e-8, "{} {}", rep.lhs, rep.rhs);
}

#[test]
fn report_serialises() {
    let f = builtin("smooth_wave", &json!({}), 1).unwrap();
    let rep = whitney_check(&f, &unit_prism(1), 1.0, 1.0, 2.0, f64::INFINITY, 4, false, &quick()).unwrap();
    let text = serde_json::to_string(&rep).unwrap();
    assert!(text.contains("\"q\":\"inf\""));
    let back: WhitneyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fit_error_is_affine_covariant(seed in 0u64..500, d in 1usize..=2, pi in 0usize..3) {
        // ‖f∘φ − P∘φ‖ on φ^{-1}(J×S) = |det ∇φ|^{-1/p} ‖f − P‖ on J×S
        let p = [1.0, 2.0, f64::INFINITY][pi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = builtin("smooth_wave", &json!({"k": rng.gen_range(0.5..2.0)}), d).unwrap();
        let prism = unit_prism(d);
        let (a, c) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let g = f.composed(AffineMap::scaling(a, b, c, v.clone()));
        let pre = prism.scaled(1.0 / a, -b / a, 1.0 / c, &v.iter().map(|s| -s / c).collect::<Vec<_>>()).unwrap();
        let e1 = fit(&f, &prism, 2, 2, p, false).unwrap().error;
        let e2 = fit(&g, &pre, 2, 2, p, false).unwrap().error;
        let jac: f64 = a * c.powi(d as i32);
        let expect = if p.is_infinite() { e1 } else { e1 * jac.powf(-1.0 / p) };
        let tol = if p == 2.0 { 1e-8 } else { 1e-3 };
        prop_assert!((e2 - expect).abs() <= tol * expect, "{} {}", e2, expect);
    }
}
