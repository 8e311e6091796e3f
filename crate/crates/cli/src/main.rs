use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pnc_lab_cli::{parse_config, run, CliError};

/// Run a pnc-lab experiment described by a JSON config.
#[derive(Debug, Parser)]
#[command(name = "pnc-lab", version)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Affects speed only, never results.
    #[arg(long, env = "PNC_LAB_THREADS")]
    threads: Option<usize>,
    /// Output file; overrides the config `output`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn main_inner(args: Args) -> Result<bool, CliError> {
    if let Some(n) = args.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = std::fs::read_to_string(&args.config).map_err(|e| io_err(&args.config, e))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = run(&config)?;
    let bytes = report.render(config.format)?;
    match args.out.or(config.output) {
        Some(path) => std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| io_err("<stdout>".as_ref(), e))?,
    }
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let unconverged = report
        .records
        .iter()
        .filter(|r| r.status == Some(pnc_lab_core::PointStatus::Unconverged))
        .count();
    if unconverged > 0 {
        eprintln!("note: {unconverged} point(s) hit max_trials before min_errors (status = unconverged)");
    }
    Ok(report.success())
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
