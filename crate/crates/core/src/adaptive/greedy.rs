use serde::{Deserialize, Serialize};

use super::{atomic_split, Approximant, RefinementConfig};
use crate::approx::{best_fit, fit, fit_rule, LocalFit, NONSMOOTH_LEVELS};
use crate::fields::Field;
use crate::geometry::{Partition, Prism};
use crate::quadrature::RuleSpec;
use crate::{par, Error, Result};

/// Relative slack of the post-termination audit.
pub const AUDIT_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub k: usize,
    pub marked: usize,
    /// `#P_k` before the split.
    pub elements: usize,
    pub max_error: f64,
    /// Elements created by this round's splits, net of the marked parents.
    pub added: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub delta: f64,
    pub rounds: Vec<Round>,
    pub initial_elements: usize,
    pub final_elements: usize,
    pub terminated: bool,
}

impl GreedyTrace {
    /// Number of rounds that split something.
    pub fn refinements(&self) -> usize {
        self.rounds.iter().filter(|r| r.marked > 0).count()
    }

    pub fn total_marked(&self) -> usize {
        self.rounds.iter().map(|r| r.marked).sum()
    }
}

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub partition: Partition,
    pub trace: GreedyTrace,
    pub approximant: Approximant,
}

impl GreedyOutcome {
    /// Turns a run cut off by `max_rounds` into an error.
    pub fn ensure_terminated(self) -> Result<Self> {
        if self.trace.terminated {
            Ok(self)
        } else {
            Err(Error::MaxRoundsExceeded {
                rounds: self.trace.rounds.len(),
            })
        }
    }
}

/// Marks every element whose local best-fit error exceeds `δ` and applies
/// [`atomic_split`] to all of them, until nothing is marked or
/// `cfg.max_rounds` splitting rounds have run.
pub fn greedy<F: Field + ?Sized>(f: &F, p0: &Partition, cfg: &RefinementConfig) -> Result<GreedyOutcome> {
    cfg.validate()?;
    let delta = cfg
        .delta
        .ok_or_else(|| Error::param("delta", "greedy needs a marking threshold"))?;
    if p0.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if p0.dim() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: p0.dim(),
        });
    }
    if p0.s1 != cfg.s1 || p0.s2 != cfg.s2 {
        return Err(Error::param("s1/s2", "partition and configuration disagree"));
    }

    let mut elements: Vec<Prism> = p0.elements.clone();
    let mut fits: Vec<Option<LocalFit>> = vec![None; elements.len()];
    let mut rounds = Vec::new();
    let mut terminated = false;
    for k in 0..=cfg.max_rounds {
        let todo: Vec<usize> = (0..elements.len()).filter(|&i| fits[i].is_none()).collect();
        let fresh = par::try_map(&todo, |&i| fit(f, &elements[i], cfg.r1, cfg.r2, cfg.p, cfg.nonsmooth))?;
        for (i, fit) in todo.into_iter().zip(fresh) {
            fits[i] = Some(fit);
        }
        let errors: Vec<f64> = fits.iter().map(|f| f.as_ref().map_or(f64::NAN, |f| f.error)).collect();
        let max_error = errors.iter().copied().fold(0.0, f64::max);
        let marked: Vec<bool> = errors.iter().map(|&e| e > delta).collect();
        let n_marked = marked.iter().filter(|&&m| m).count();
        if n_marked == 0 {
            rounds.push(Round {
                k,
                marked: 0,
                elements: elements.len(),
                max_error,
                added: 0,
            });
            terminated = true;
            break;
        }
        if k == cfg.max_rounds {
            rounds.push(Round {
                k,
                marked: n_marked,
                elements: elements.len(),
                max_error,
                added: 0,
            });
            break;
        }
        let before = elements.len();
        let mut next = Vec::with_capacity(before + n_marked);
        let mut next_fits = Vec::with_capacity(before + n_marked);
        for ((el, fit), m) in elements.into_iter().zip(fits).zip(&marked) {
            if *m {
                for child in atomic_split(&el, cfg.s1, cfg.s2)? {
                    next.push(child);
                    next_fits.push(None);
                }
            } else {
                next.push(el);
                next_fits.push(fit);
            }
            if next.len() > cfg.max_elements {
                return Err(Error::ElementCap { cap: cfg.max_elements });
            }
        }
        rounds.push(Round {
            k,
            marked: n_marked,
            elements: before,
            max_error,
            added: next.len() - before,
        });
        elements = next;
        fits = next_fits;
    }

    let pieces: Vec<LocalFit> = fits.into_iter().map(|f| f.expect("every element is fitted")).collect();
    let trace = GreedyTrace {
        delta,
        rounds,
        initial_elements: p0.len(),
        final_elements: elements.len(),
        terminated,
    };
    let partition = Partition {
        elements,
        domain: p0.domain.clone(),
        initial_count: p0.initial_count,
        s1: p0.s1,
        s2: p0.s2,
    };
    Ok(GreedyOutcome {
        partition,
        trace,
        approximant: Approximant { pieces, p: cfg.p },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    /// Largest refitted error with the marking rule.
    pub max_error: f64,
    /// Largest refitted error on a rule with one extra subdivision level.
    pub finer_max_error: f64,
    pub delta: f64,
    pub passed: bool,
}

/// Refits every final element and checks `error ≤ δ (1 + AUDIT_SLACK)`.
pub fn audit<F: Field + ?Sized>(f: &F, outcome: &GreedyOutcome, cfg: &RefinementConfig) -> Result<Audit> {
    let delta = outcome.trace.delta;
    let levels = if cfg.nonsmooth { NONSMOOTH_LEVELS + 1 } else { 1 };
    let errs = par::try_map(&outcome.partition.elements, |el| {
        let same = best_fit(f, el, cfg.r1, cfg.r2, cfg.p, &fit_rule(el, cfg.r1, cfg.r2, cfg.nonsmooth)?)?;
        let finer_rule = RuleSpec::for_orders(cfg.r1, cfg.r2).subdivided(levels).rule(el)?;
        let finer = best_fit(f, el, cfg.r1, cfg.r2, cfg.p, &finer_rule)?;
        Ok::<_, Error>((same.error, finer.error))
    })?;
    let max_error = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let finer_max_error = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(Audit {
        max_error,
        finer_max_error,
        delta,
        passed: max_error <= delta * (1.0 + AUDIT_SLACK),
    })
}
