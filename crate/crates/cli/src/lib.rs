//! Experiment driver: argument handling, the six subcommands and their
//! CSV / JSON / SVG artifacts.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use commands::run;
pub use config::{Command, ConfigError, FieldSpec, RunConfig};
pub use output::{run_id, write_artifacts, Report};

#[derive(Debug, Parser)]
#[command(name = "aniso-st", version, about = "Adaptive anisotropic space-time approximation experiments")]
pub struct Cli {
    /// moduli | besov | jackson | whitney | greedy | rates
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub field: Option<String>,
    /// JSON object of field parameters.
    #[arg(long)]
    pub field_params: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub r1: Option<usize>,
    #[arg(long)]
    pub r2: Option<usize>,
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub s2: Option<f64>,
    /// Integrability exponent; `inf` allowed.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Comma-separated accuracies for `rates`.
    #[arg(long)]
    pub eps_list: Option<String>,
    /// Marking threshold for `greedy`.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Refinement levels of the `jackson`/`whitney` chains.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Root time intervals of the initial partition.
    #[arg(long)]
    pub n_time: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "ANISO_ST_THREADS")]
    pub threads: Option<usize>,
    /// Directory for CSV, JSON and SVG output; CSV goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub plot: bool,
}

fn exponent_arg(field: &'static str, text: &str) -> Result<f64, ConfigError> {
    aniso_st::exponent::parse(text).map_err(|message| ConfigError { field, message })
}

impl Cli {
    /// The configuration file (or defaults) with every given flag applied.
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        c.command = self.command;
        if let Some(name) = &self.field {
            c.field.name = name.clone();
        }
        if let Some(text) = &self.field_params {
            c.field.params = serde_json::from_str(text).map_err(|e| ConfigError {
                field: "field-params",
                message: e.to_string(),
            })?;
        }
        macro_rules! take {
            ($($name:ident),*) => { $( if let Some(v) = self.$name { c.$name = v; } )* };
        }
        take!(d, s1, s2, delta, levels, n_time, seed);
        if self.r1.is_some() {
            c.r1 = self.r1;
        }
        if self.r2.is_some() {
            c.r2 = self.r2;
        }
        if let Some(p) = &self.p {
            c.p = exponent_arg("p", p)?;
        }
        if let Some(q) = &self.q {
            c.q = exponent_arg("q", q)?;
        }
        if let Some(list) = &self.eps_list {
            c.eps_list = config::parse_list(list)?;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        c.plot |= self.plot;
        Ok(c)
    }
}
