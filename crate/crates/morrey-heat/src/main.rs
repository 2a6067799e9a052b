use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use morrey_heat::cli::config::Config;
use morrey_heat::cli::report::write_outputs;
use morrey_heat::cli::run_suites;
use morrey_heat::cli::suites::Suite;

/// Numerical verification suites for heat flow on model manifolds.
#[derive(Debug, Parser)]
#[command(name = "morrey-heat", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; omitted sections use the acceptance defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV, JSON and plot files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for independent suites.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Reserved; nothing here is random. Rejected if set.
    #[arg(long, global = true)]
    seed_irrelevant: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    VerifyVolumes,
    VerifyKernel,
    VerifyMorrey,
    VerifyDispersive,
    VerifySmoothing,
    VerifyRiesz,
    SolveMild,
    VerifyFixedPoint,
    ReportAll,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyVolumes => "verify-volumes",
            Command::VerifyKernel => "verify-kernel",
            Command::VerifyMorrey => "verify-morrey",
            Command::VerifyDispersive => "verify-dispersive",
            Command::VerifySmoothing => "verify-smoothing",
            Command::VerifyRiesz => "verify-riesz",
            Command::SolveMild => "solve-mild",
            Command::VerifyFixedPoint => "verify-fixed-point",
            Command::ReportAll => "report-all",
        }
    }

    fn suites(self) -> Vec<Suite> {
        match self {
            Command::VerifyVolumes => vec![Suite::Volumes],
            Command::VerifyKernel => vec![Suite::Kernel],
            Command::VerifyMorrey => vec![Suite::Morrey],
            Command::VerifyDispersive => vec![Suite::Dispersive],
            Command::VerifySmoothing => vec![Suite::Smoothing],
            Command::VerifyRiesz => vec![Suite::Riesz],
            Command::SolveMild => vec![Suite::Mild],
            Command::VerifyFixedPoint => vec![Suite::FixedPoint],
            Command::ReportAll => Suite::ALL.to_vec(),
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.seed_irrelevant {
        return usage("--seed-irrelevant is reserved: no randomness is used");
    }
    if args.threads == 0 {
        return usage("--threads must be at least 1");
    }
    let cfg = match &args.config {
        Some(path) => match Config::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return usage(e),
        },
        None => Config::default(),
    };
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let outputs = run_suites(&args.command.suites(), &cfg, args.threads);
    let total = clock.elapsed().as_secs_f64();
    for o in &outputs {
        let passed = o.rows.iter().filter(|r| r.pass).count();
        println!("{}: {passed}/{} passed in {:.1} s", o.suite, o.rows.len(), o.seconds);
        for r in o.rows.iter().filter(|r| !r.pass) {
            println!("  FAIL {} measured {:e} predicted {:e} tol {:e}", r.check, r.measured, r.predicted, r.tol);
            if let Some(note) = &r.note {
                println!("       {note}");
            }
        }
    }
    if let Err(e) = write_outputs(&args.out, args.command.name(), &outputs, started_unix, total, args.threads) {
        eprintln!("error: writing {}: {e}", args.out.display());
        return ExitCode::from(2);
    }
    if outputs.iter().all(|o| o.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
