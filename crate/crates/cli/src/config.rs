use std::fmt;
use std::path::{Path, PathBuf};

use aniso_st::besov::{order_for, DEFAULT_N_MAX};
use aniso_st::exponent;
use aniso_st::fields::{builtin, ScalarField, BUILTIN_NAMES};
use aniso_st::moduli::Sampling;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const DEFAULT_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const MAX_LEVELS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Moduli,
    Besov,
    Jackson,
    Whitney,
    Greedy,
    Rates,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Moduli => "moduli",
            Command::Besov => "besov",
            Command::Jackson => "jackson",
            Command::Whitney => "whitney",
            Command::Greedy => "greedy",
            Command::Rates => "rates",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub params: Value,
}

/// Everything a run depends on. Paths and thread counts are kept out of
/// the run id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub field: FieldSpec,
    pub d: usize,
    /// Root intervals of the initial tensor partition.
    pub n_time: usize,
    pub s1: f64,
    pub s2: f64,
    /// Defaults to `⌊s⌋ + 1`.
    pub r1: Option<usize>,
    pub r2: Option<usize>,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
    pub eps_list: Vec<f64>,
    /// Greedy threshold.
    pub delta: f64,
    /// Explicit `δ` values for `moduli`; dyadic by default.
    pub deltas: Vec<f64>,
    /// Refinement levels for the `jackson`/`whitney` chains and dyadic
    /// `moduli` sweeps.
    pub levels: u32,
    /// Point the refinement chains shrink towards.
    pub point: Option<Vec<f64>>,
    pub n_max: u32,
    pub max_rounds: usize,
    pub seed: u64,
    pub sampling: Sampling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Rates,
            field: FieldSpec {
                name: "smooth_wave".into(),
                params: json!({}),
            },
            d: 1,
            n_time: 1,
            s1: 1.0,
            s2: 1.0,
            r1: None,
            r2: None,
            p: 2.0,
            q: 2.0,
            eps_list: DEFAULT_EPS.to_vec(),
            delta: 1e-3,
            deltas: Vec::new(),
            levels: 6,
            point: None,
            n_max: DEFAULT_N_MAX,
            max_rounds: aniso_st::adaptive::DEFAULT_MAX_ROUNDS,
            seed: 0,
            sampling: Sampling::default(),
            threads: None,
            out: None,
            plot: false,
        }
    }
}

/// A rejected configuration value.
#[derive(Debug)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn r1(&self) -> usize {
        self.r1.unwrap_or_else(|| order_for(self.s1))
    }

    pub fn r2(&self) -> usize {
        self.r2.unwrap_or_else(|| order_for(self.s2))
    }

    pub fn point(&self) -> Vec<f64> {
        self.point.clone().unwrap_or_else(|| {
            let mut z = vec![0.3];
            z.extend(std::iter::repeat_n(0.2, self.d));
            z
        })
    }

    /// Dyadic `δ = 2^{-k}`, `k = levels, …, 1`, unless given explicitly.
    pub fn delta_grid(&self) -> Vec<f64> {
        if self.deltas.is_empty() {
            (1..=self.levels).rev().map(|k| 0.5f64.powi(k as i32)).collect()
        } else {
            let mut v = self.deltas.clone();
            v.sort_by(f64::total_cmp);
            v
        }
    }

    /// Field parameters with the run seed filled in for random polynomials.
    pub fn field_params(&self) -> Value {
        let mut params = match &self.field.params {
            Value::Null => json!({}),
            v => v.clone(),
        };
        if self.field.name == "polynomial" {
            if let Value::Object(m) = &mut params {
                m.entry("seed").or_insert(json!(self.seed));
            }
        }
        params
    }

    pub fn build_field(&self) -> Result<ScalarField, ConfigError> {
        builtin(&self.field.name, &self.field_params(), self.d).map_err(|e| bad("field-params", e.to_string()))
    }

    /// Sampling with the run seed.
    pub fn sampling(&self) -> Sampling {
        Sampling {
            seed: self.seed,
            ..self.sampling.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !BUILTIN_NAMES.contains(&self.field.name.as_str()) {
            return Err(bad(
                "field",
                format!("unknown field `{}`; expected one of {}", self.field.name, BUILTIN_NAMES.join(", ")),
            ));
        }
        if !(1..=3).contains(&self.d) {
            return Err(bad("d", "space dimension must be 1, 2 or 3"));
        }
        if self.n_time == 0 {
            return Err(bad("n_time", "need at least one root interval"));
        }
        if !(self.s1 > 0.0 && self.s1.is_finite()) {
            return Err(bad("s1", "must be positive and finite"));
        }
        if !(self.s2 > 0.0 && self.s2.is_finite()) {
            return Err(bad("s2", "must be positive and finite"));
        }
        if self.r1() == 0 {
            return Err(bad("r1", "must be at least 1"));
        }
        if self.r2() == 0 {
            return Err(bad("r2", "must be at least 1"));
        }
        if !(self.p > 0.0) {
            return Err(bad("p", "must be positive or inf"));
        }
        if !(self.q > 0.0) {
            return Err(bad("q", "must be positive or inf"));
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(bad("eps-list", "need values in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(bad("delta", "must be positive"));
        }
        if self.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(bad("deltas", "must be positive"));
        }
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return Err(bad("levels", format!("must lie in 1..={MAX_LEVELS}")));
        }
        if self.n_max == 0 || self.n_max > 30 {
            return Err(bad("n_max", "must lie in 1..=30"));
        }
        if self.point().len() != self.d + 1 {
            return Err(bad("point", format!("need {} coordinates (t, x)", self.d + 1)));
        }
        if self.threads == Some(0) {
            return Err(bad("threads", "must be at least 1"));
        }
        self.sampling.validate().map_err(|e| bad("sampling", e.to_string()))?;
        self.build_field()?;
        Ok(())
    }

    /// Canonical JSON of the parameters that determine the results.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        c.out = None;
        c.plot = false;
        serde_json::to_string(&c).expect("config serialises")
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| bad("eps-list", format!("`{s}`: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn messages_name_the_field() {
        let c = RunConfig {
            s1: -1.0,
            ..RunConfig::default()
        };
        assert_eq!(c.validate().unwrap_err().field, "s1");
        let c = RunConfig {
            field: FieldSpec {
                name: "nope".into(),
                params: json!({}),
            },
            ..RunConfig::default()
        };
        assert!(c.validate().unwrap_err().to_string().contains("unknown field"));
        let c = RunConfig {
            eps_list: vec![2.0],
            ..RunConfig::default()
        };
        assert_eq!(c.validate().unwrap_err().field, "eps-list");
    }

    #[test]
    fn json_round_trip() {
        let c = RunConfig {
            p: f64::INFINITY,
            r1: Some(3),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"p\":\"inf\""));
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        assert!(serde_json::from_str::<RunConfig>("{\"bogus\":1}").is_err());
    }

    #[test]
    fn canonical_ignores_plumbing() {
        let a = RunConfig::default();
        let b = RunConfig {
            threads: Some(3),
            out: Some("x".into()),
            plot: true,
            ..RunConfig::default()
        };
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.2, 0.1,0.05").unwrap(), vec![0.2, 0.1, 0.05]);
        assert!(parse_list("0.2,x").is_err());
    }
}
