use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ctnoma_sim::config::{parse_list, read_config, ConfigFile};
use ctnoma_sim::validate::self_check;
use ctnoma_sim::{emit_csv, render_csv, run_sweep, Protocol, SweepSpec, SweepVariable};

/// Monte Carlo round-delay sweeps for CT-NOMA and a TDMA baseline.
#[derive(Debug, Parser)]
#[command(name = "ctnoma-sim", version)]
struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Swept parameter: emax or payload.
    #[arg(long)]
    sweep: Option<SweepVariable>,
    /// Comma-separated sweep values in SI units.
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of ts, fdo, tdma.
    #[arg(long)]
    protocols: Option<String>,
    /// Outer-search tolerance in seconds.
    #[arg(long)]
    tol: Option<f64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Run the oracle self-check on small instances before the sweep.
    #[arg(long)]
    validate: bool,
}

fn build_spec(cli: &Cli) -> Result<SweepSpec, String> {
    let file = match &cli.config {
        Some(path) => read_config(path).map_err(|e| e.to_string())?,
        None => ConfigFile::default(),
    };
    let variable = match cli.sweep {
        Some(v) => v,
        None => file.sweep_variable().map_err(|e| e.to_string())?.unwrap_or(SweepVariable::MaxEnergy),
    };
    let mut spec = SweepSpec::new(variable);
    file.apply(&mut spec).map_err(|e| e.to_string())?;
    if let Some(v) = &cli.values {
        spec.values = parse_list(v).map_err(|e| format!("--values: {e}"))?;
    }
    if let Some(p) = &cli.protocols {
        spec.protocols = parse_list::<Protocol>(p).map_err(|e| format!("--protocols: {e}"))?;
    }
    if let Some(t) = cli.trials {
        spec.trials = t;
    }
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(t) = cli.tol {
        spec.tol_s = t;
    }
    spec.validate()?;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match build_spec(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    if cli.validate {
        let reports = self_check(&spec.base, spec.seed, spec.tol_s);
        let mut failed = false;
        for r in &reports {
            let status = if r.passed { "ok" } else { "FAIL" };
            eprintln!("[{status}] {}: {}", r.name, r.detail);
            failed |= !r.passed;
        }
        if failed {
            eprintln!("self-check failed");
            return ExitCode::from(3);
        }
    }

    let result = match run_sweep(&spec, cli.workers) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = emit_csv(&result, path) {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        None => print!("{}", render_csv(&result)),
    }
    ExitCode::SUCCESS
}
