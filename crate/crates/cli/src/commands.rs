use aniso_st::adaptive::{audit, greedy, rate_study, refinement_chain, RefinementConfig};
use aniso_st::approx::{jackson_check, whitney_check, whitney_exponent, JacksonReport, WhitneyReport};
use aniso_st::besov::besov_seminorm;
use aniso_st::fields::ScalarField;
use aniso_st::geometry::{Cylinder, Partition, Prism};
use aniso_st::moduli::{modulus_profile, Direction, ProfilePoint};
use aniso_st::stats::{linear_fit, loglog_fit, LineFit};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::output::{num, opt, Plot, Report, Table};

/// Validates `cfg` and runs its subcommand.
pub fn run(cfg: &RunConfig) -> anyhow::Result<Report> {
    cfg.validate()?;
    let f = cfg.build_field()?;
    match cfg.command {
        Command::Moduli => moduli(cfg, &f),
        Command::Besov => besov(cfg, &f),
        Command::Jackson => jackson(cfg, &f),
        Command::Whitney => whitney(cfg, &f),
        Command::Greedy => greedy_run(cfg, &f),
        Command::Rates => rates(cfg, &f),
    }
}

fn domain(cfg: &RunConfig) -> anyhow::Result<Cylinder> {
    Cylinder::unit(cfg.d).ok_or_else(|| anyhow::anyhow!("no unit mesh in dimension {}", cfg.d))
}

fn initial_partition(cfg: &RunConfig) -> anyhow::Result<Partition> {
    Ok(Partition::tensor(domain(cfg)?, cfg.n_time, cfg.s1, cfg.s2)?)
}

fn refinement(cfg: &RunConfig, f: &ScalarField) -> RefinementConfig {
    RefinementConfig {
        r1: cfg.r1(),
        r2: cfg.r2(),
        p: cfg.p,
        q: cfg.q,
        delta: Some(cfg.delta),
        max_rounds: cfg.max_rounds,
        n_max: cfg.n_max,
        nonsmooth: f.nonsmooth,
        sampling: cfg.sampling(),
        ..RefinementConfig::new(cfg.d, cfg.s1, cfg.s2)
    }
}

fn positive_loglog(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (*a, *b))
        .unzip();
    loglog_fit(&x, &y).ok()
}

fn slope_text(fit: &Option<LineFit>) -> String {
    fit.map_or_else(|| "n/a".into(), |f| format!("{:.4}", f.slope))
}

fn moduli(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let dom = domain(cfg)?;
    let deltas = cfg.delta_grid();
    let s = cfg.sampling();
    let t: Vec<ProfilePoint> = modulus_profile(f, &dom, Direction::Temporal, cfg.r1(), &deltas, cfg.p, &s)?;
    let x: Vec<ProfilePoint> = modulus_profile(f, &dom, Direction::Spatial, cfg.r2(), &deltas, cfg.p, &s)?;
    let mut table = Table::new(&["delta", "omega_t", "w_t", "omega_x", "w_x"]);
    for (a, b) in t.iter().zip(&x) {
        table.push(vec![num(a.delta), num(a.sup), num(a.averaged), num(b.sup), num(b.averaged)]);
    }
    let col = |v: &[ProfilePoint], sup: bool| -> Vec<f64> { v.iter().map(|p| if sup { p.sup } else { p.averaged }).collect() };
    let fit_t = positive_loglog(&deltas, &col(&t, true));
    let fit_x = positive_loglog(&deltas, &col(&x, true));
    let summary = format!(
        "moduli of {} (r1={}, r2={}, p={}): log-log slope omega_t {}, omega_x {}",
        f.label,
        cfg.r1(),
        cfg.r2(),
        num(cfg.p),
        slope_text(&fit_t),
        slope_text(&fit_x)
    );
    let plot = Plot {
        title: format!("moduli of {}", f.label),
        x_label: "delta".into(),
        y_label: "modulus".into(),
        series: vec![
            ("omega_t".into(), deltas.iter().copied().zip(col(&t, true)).collect()),
            ("w_t".into(), deltas.iter().copied().zip(col(&t, false)).collect()),
            ("omega_x".into(), deltas.iter().copied().zip(col(&x, true)).collect()),
            ("w_x".into(), deltas.iter().copied().zip(col(&x, false)).collect()),
        ],
    };
    Ok(Report {
        table,
        json: json!({ "temporal": t, "spatial": x, "slope_t": fit_t, "slope_x": fit_x }),
        summary,
        plot: Some(plot),
    })
}

fn besov(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let est = besov_seminorm(f, &domain(cfg)?, cfg.s1, cfg.s2, cfg.p, cfg.q, cfg.n_max, &cfg.sampling())?;
    let mut table = Table::new(&["n", "temporal", "spatial"]);
    for t in &est.per_level {
        table.push(vec![t.n.to_string(), num(t.temporal), num(t.spatial)]);
    }
    // decay rate of the level terms in log2
    let fit = |pick: fn(&aniso_st::besov::LevelTerm) -> f64| -> Option<LineFit> {
        let (n, v): (Vec<f64>, Vec<f64>) = est
            .per_level
            .iter()
            .filter(|t| pick(t) > 0.0)
            .map(|t| (t.n as f64, pick(t).log2()))
            .unzip();
        linear_fit(&n, &v).ok()
    };
    let fit_t = fit(|t| t.temporal);
    let fit_x = fit(|t| t.spatial);
    let summary = format!(
        "seminorm {} (s1={}, s2={}, p={}, q={}); level-term log2 slopes {} / {}{}",
        num(est.seminorm),
        est.s1,
        est.s2,
        num(est.p),
        num(est.q),
        slope_text(&fit_t),
        slope_text(&fit_x),
        if est.truncation_warning { "; truncation warning" } else { "" }
    );
    let plot = Plot {
        title: format!("level terms of {}", f.label),
        x_label: "2^n".into(),
        y_label: "term".into(),
        series: vec![
            ("temporal".into(), est.per_level.iter().map(|t| (2f64.powi(t.n as i32), t.temporal)).collect()),
            ("spatial".into(), est.per_level.iter().map(|t| (2f64.powi(t.n as i32), t.spatial)).collect()),
        ],
    };
    Ok(Report {
        table,
        json: json!({ "estimate": est, "slope_t": fit_t, "slope_x": fit_x }),
        summary,
        plot: Some(plot),
    })
}

/// Elements containing the configured point under `levels` atomic splits.
pub fn chain(cfg: &RunConfig) -> anyhow::Result<Vec<Prism>> {
    let z = cfg.point();
    Ok(refinement_chain(&initial_partition(cfg)?, z[0], &z[1..], cfg.levels)?)
}

#[derive(Serialize)]
struct Sweep<T> {
    rows: Vec<T>,
    fit: Option<LineFit>,
}

fn jackson(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let els = chain(cfg)?;
    let s = cfg.sampling();
    let reports: Vec<JacksonReport> = els
        .iter()
        .enumerate()
        .map(|(i, el)| {
            jackson_check(f, el, cfg.r1(), cfg.r2(), cfg.p, f.nonsmooth, &s).map(|mut r| {
                r.element_id = i;
                r
            })
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["level", "measure", "lhs", "omega_t", "omega_x", "rhs", "ratio"]);
    for (el, r) in els.iter().zip(&reports) {
        table.push(vec![
            el.level.to_string(),
            num(r.measure),
            num(r.lhs),
            num(r.omega_t),
            num(r.omega_x),
            num(r.rhs),
            opt(r.ratio),
        ]);
    }
    let ratios: Vec<f64> = reports.iter().filter_map(|r| r.ratio).collect();
    let summary = if ratios.is_empty() {
        "exact reproduction on every element".to_string()
    } else {
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        format!("Jackson ratio in [{}, {}] over {} levels (spread {:.3})", num(lo), num(hi), els.len(), hi / lo)
    };
    let plot = Plot {
        title: format!("Jackson sweep of {}", f.label),
        x_label: "|J x S|".into(),
        y_label: "value".into(),
        series: vec![
            ("lhs".into(), reports.iter().map(|r| (r.measure, r.lhs)).collect()),
            ("rhs".into(), reports.iter().map(|r| (r.measure, r.rhs)).collect()),
        ],
    };
    Ok(Report {
        table,
        json: serde_json::to_value(Sweep { rows: reports, fit: None })?,
        summary,
        plot: Some(plot),
    })
}

/// Whitney reports along the refinement chain with the fit of
/// `lhs / |f|_B(J×S)` against `|J×S|` over levels `1..=levels`.
pub fn whitney_sweep(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<(Vec<WhitneyReport>, Option<LineFit>)> {
    let els = chain(cfg)?;
    let s = cfg.sampling();
    let reports: Vec<WhitneyReport> = els
        .iter()
        .enumerate()
        .map(|(i, el)| {
            whitney_check(f, el, cfg.s1, cfg.s2, cfg.p, cfg.q, cfg.n_max, f.nonsmooth, &s).map(|mut r| {
                r.element_id = i;
                r
            })
        })
        .collect::<Result<_, _>>()?;
    let used = &reports[1..];
    let x: Vec<f64> = used.iter().map(|r| r.measure).collect();
    let y: Vec<f64> = used.iter().map(|r| r.normalized.unwrap_or(0.0)).collect();
    let fit = positive_loglog(&x, &y);
    Ok((reports, fit))
}

fn whitney(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let (reports, fit) = whitney_sweep(cfg, f)?;
    let target = whitney_exponent(cfg.s1, cfg.s2, cfg.d, cfg.p, cfg.q);
    let mut table = Table::new(&["level", "measure", "lhs", "seminorm", "normalized", "rhs", "ratio"]);
    for r in &reports {
        table.push(vec![
            r.element_id.to_string(),
            num(r.measure),
            num(r.lhs),
            num(r.seminorm),
            opt(r.normalized),
            num(r.rhs),
            opt(r.ratio),
        ]);
    }
    let summary = format!("target exponent {}, fitted slope {}", num(target), slope_text(&fit));
    let plot = Plot {
        title: format!("Whitney sweep of {}", f.label),
        x_label: "|J x S|".into(),
        y_label: "lhs / seminorm".into(),
        series: vec![(
            "normalized".into(),
            reports.iter().filter_map(|r| r.normalized.map(|n| (r.measure, n))).collect(),
        )],
    };
    Ok(Report {
        table,
        json: json!({ "target_exponent": target, "sweep": Sweep { rows: reports, fit } }),
        summary,
        plot: Some(plot),
    })
}

fn greedy_run(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let rc = refinement(cfg, f);
    let out = greedy(f, &initial_partition(cfg)?, &rc)?;
    let check = audit(f, &out, &rc)?;
    let mut table = Table::new(&["k", "marked", "elements", "max_error", "added"]);
    for r in &out.trace.rounds {
        table.push(vec![
            r.k.to_string(),
            r.marked.to_string(),
            r.elements.to_string(),
            num(r.max_error),
            r.added.to_string(),
        ]);
    }
    let summary = format!(
        "{} after {} refinement rounds: {} elements, global error {}, audit max {} vs delta {} ({})",
        if out.trace.terminated { "terminated" } else { "stopped at max_rounds" },
        out.trace.refinements(),
        out.partition.len(),
        num(out.approximant.global_error()),
        num(check.max_error),
        num(check.delta),
        if check.passed { "pass" } else { "fail" }
    );
    let plot = Plot {
        title: format!("greedy on {}", f.label),
        x_label: "elements".into(),
        y_label: "max local error".into(),
        series: vec![(
            "max_error".into(),
            out.trace.rounds.iter().map(|r| (r.elements as f64, r.max_error)).collect(),
        )],
    };
    Ok(Report {
        table,
        json: json!({
            "trace": out.trace,
            "audit": check,
            "global_error": out.approximant.global_error(),
            "partition": out.partition.to_record(),
        }),
        summary,
        plot: Some(plot),
    })
}

fn rates(cfg: &RunConfig, f: &ScalarField) -> anyhow::Result<Report> {
    let rc = RefinementConfig {
        delta: None,
        ..refinement(cfg, f)
    };
    let study = rate_study(f, &initial_partition(cfg)?, &rc, &cfg.eps_list)?;
    let mut table = Table::new(&[
        "epsilon",
        "delta",
        "seminorm",
        "initial",
        "final",
        "added",
        "global_error",
        "c2",
    ]);
    for r in &study.runs {
        table.push(vec![
            num(r.epsilon),
            num(r.delta),
            num(r.seminorm),
            r.initial_elements.to_string(),
            r.final_elements.to_string(),
            r.added.to_string(),
            num(r.global_error),
            opt(r.c2),
        ]);
    }
    let summary = if study.runs.iter().all(|r| r.added == 0) && f.polynomial.is_some() {
        "exact reproduction, 0 refinements".to_string()
    } else {
        format!(
            "fitted complexity exponent {} (expected {}), C2 spread {}",
            slope_text(&study.complexity),
            num(study.expected_exponent),
            opt(study.c2_spread)
        )
    };
    let plot = Plot {
        title: format!("direct estimate on {}", f.label),
        x_label: "1/epsilon".into(),
        y_label: "#P - #P0".into(),
        series: vec![(
            "added".into(),
            study.runs.iter().map(|r| (1.0 / r.epsilon, r.added as f64)).collect(),
        )],
    };
    let json: Value = serde_json::to_value(&study)?;
    Ok(Report {
        table,
        json,
        summary,
        plot: Some(plot),
    })
}
