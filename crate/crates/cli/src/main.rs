use std::process::ExitCode;

use aniso_st_cli::{run, run_id, write_artifacts, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match try_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let cfg = cli.resolve()?;
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let report = run(&cfg)?;
    let id = run_id(&cfg);
    eprintln!("run {id} (seed {})", cfg.seed);
    match &cfg.out {
        Some(dir) => {
            for path in write_artifacts(dir, &cfg, &report)? {
                eprintln!("wrote {}", path.display());
            }
            println!("{}", report.summary);
        }
        None => {
            print!("{}", report.table.to_csv());
            eprintln!("{}", report.summary);
        }
    }
    Ok(())
}
