use serde::{Deserialize, Serialize};

use super::{greedy, Approximant, GreedyTrace, RefinementConfig};
use crate::besov::averaged_seminorm;
use crate::fields::Field;
use crate::geometry::Partition;
use crate::stats::{loglog_fit, LineFit};
use crate::{Error, Result};

/// Seminorm estimates at or below this are treated as zero.
pub const ZERO_SEMINORM: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectRun {
    pub epsilon: f64,
    /// `ε^{1 + 1/(s1 p) + d/(s2 p)} |f|_B`, zero when short-circuited.
    pub delta: f64,
    pub seminorm: f64,
    pub truncation_warning: bool,
    pub initial_elements: usize,
    pub final_elements: usize,
    /// `#P − #P_0`.
    pub added: usize,
    pub global_error: f64,
    /// `global_error / (ε |f|_B)`.
    pub c2: Option<f64>,
    /// The seminorm vanished and `f` itself is the approximant.
    pub short_circuit: bool,
    pub trace: Option<GreedyTrace>,
}

/// Greedy run at the threshold of the direct estimate for accuracy
/// `cfg.epsilon`.
pub fn direct_theorem_run<F: Field + ?Sized>(
    f: &F,
    p0: &Partition,
    cfg: &RefinementConfig,
) -> Result<(DirectRun, Option<Approximant>)> {
    cfg.validate_direct()?;
    let eps = cfg.epsilon.expect("validated");
    let semi = averaged_seminorm(f, &p0.domain, cfg.s1, cfg.s2, cfg.q, cfg.n_max, &cfg.sampling)?;
    if semi.seminorm <= ZERO_SEMINORM {
        let run = DirectRun {
            epsilon: eps,
            delta: 0.0,
            seminorm: semi.seminorm,
            truncation_warning: semi.truncation_warning,
            initial_elements: p0.len(),
            final_elements: p0.len(),
            added: 0,
            global_error: 0.0,
            c2: None,
            short_circuit: true,
            trace: None,
        };
        return Ok((run, None));
    }
    let inv_p = if cfg.p.is_infinite() { 0.0 } else { 1.0 / cfg.p };
    let exponent = 1.0 + inv_p / cfg.s1 + cfg.d as f64 * inv_p / cfg.s2;
    let delta = eps.powf(exponent) * semi.seminorm;
    let gcfg = RefinementConfig {
        delta: Some(delta),
        ..cfg.clone()
    };
    let out = greedy(f, p0, &gcfg)?;
    let global_error = out.approximant.global_error();
    let run = DirectRun {
        epsilon: eps,
        delta,
        seminorm: semi.seminorm,
        truncation_warning: semi.truncation_warning,
        initial_elements: p0.len(),
        final_elements: out.partition.len(),
        added: out.partition.len() - p0.len(),
        global_error,
        c2: Some(global_error / (eps * semi.seminorm)),
        short_circuit: false,
        trace: Some(out.trace),
    };
    Ok((run, Some(out.approximant)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateStudy {
    pub runs: Vec<DirectRun>,
    /// `1/s1 + d/s2`.
    pub expected_exponent: f64,
    /// Fit of `log(#P − #P_0)` against `log(1/ε)` over runs that refined.
    pub complexity: Option<LineFit>,
    /// Largest over smallest `c2` across the sweep.
    pub c2_spread: Option<f64>,
}

/// [`direct_theorem_run`] for every `ε` in `eps`.
pub fn rate_study<F: Field + ?Sized>(
    f: &F,
    p0: &Partition,
    cfg: &RefinementConfig,
    eps: &[f64],
) -> Result<RateStudy> {
    if eps.is_empty() {
        return Err(Error::param("eps", "need at least one accuracy"));
    }
    let runs = eps
        .iter()
        .map(|&e| {
            let c = RefinementConfig {
                epsilon: Some(e),
                ..cfg.clone()
            };
            direct_theorem_run(f, p0, &c).map(|r| r.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let refined: Vec<&DirectRun> = runs.iter().filter(|r| r.added > 0).collect();
    let complexity = if refined.len() >= 2 {
        let x: Vec<f64> = refined.iter().map(|r| 1.0 / r.epsilon).collect();
        let y: Vec<f64> = refined.iter().map(|r| r.added as f64).collect();
        loglog_fit(&x, &y).ok()
    } else {
        None
    };
    let c2: Vec<f64> = runs.iter().filter_map(|r| r.c2).filter(|c| *c > 0.0).collect();
    let c2_spread = (c2.len() >= 2).then(|| {
        let hi = c2.iter().copied().fold(0.0, f64::max);
        let lo = c2.iter().copied().fold(f64::MAX, f64::min);
        hi / lo
    });
    Ok(RateStudy {
        runs,
        expected_exponent: 1.0 / cfg.s1 + cfg.d as f64 / cfg.s2,
        complexity,
        c2_spread,
    })
}
