//! Command-line front end: runs a verification suite and writes a JSON report (CSV for
//! the Kloosterman tables). Exit codes: 0 all checks pass, 1 a check failed, 2 usage or
//! configuration error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gl2k::config::RunConfig;
use gl2k::report::VerificationReport;
use gl2k::suites;
use gl2k::Error;

#[derive(Parser)]
#[command(name = "gl2k", version, about = "Verification suites for elliptic-term identities over Q and real quadratic fields")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report destination (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides every suite tolerance; must lie in (0, 1).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Node cap for brute-force enumerations.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Brute-force against closed-form local Kloosterman-type sums, as CSV.
    KloostermanTables,
    /// Truncated against closed-form Dirichlet series of Kloosterman-type sums.
    VerifyDirichlet,
    /// Functional equation and approximate functional equation over Q.
    VerifyLfun,
    /// Finite orbital values, the congruence criterion and symbol identities.
    VerifyOrbital,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.tol {
        cfg.override_tolerance(t)?;
    }
    if cli.budget.is_some() {
        cfg.run.budget = cli.budget;
    }
    if cli.workers.is_some() {
        cfg.run.workers = cli.workers;
    }
    if cli.seed.is_some() {
        cfg.run.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.run.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn writer(cfg: &RunConfig) -> Result<Box<dyn Write>, Error> {
    match &cfg.run.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok(Box::new(f))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit(cfg: &RunConfig, report: &VerificationReport) -> Result<(), Failure> {
    let mut w = writer(cfg)?;
    writeln!(w, "{}", report.to_json()).map_err(|e| Failure::Usage(format!("writing report: {e}")))?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    let failed = report.failures().count();
    eprintln!("{}: {} checks, {failed} failed, {} ms", report.suite, report.checks.len(), report.wall_ms);
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load(cli)?;
    if let Some(n) = cfg.run.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::KloostermanTables => {
            let start = std::time::Instant::now();
            let field = cfg.field()?;
            let run = suites::kloosterman_table(&field, &cfg.kloosterman, cfg.node_cap())?;
            suites::write_table_csv(&run.rows, writer(&cfg)?)?;
            let mut report = suites::table_report(&run);
            report.wall_ms = start.elapsed().as_millis() as u64;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            let failed = report.failures().count();
            eprintln!("{}: {} rows, {failed} mismatches, {} ms", report.suite, run.rows.len(), report.wall_ms);
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::VerifyDirichlet => emit(&cfg, &suites::verify_dirichlet(&cfg)?),
        Command::VerifyLfun => emit(&cfg, &suites::verify_lfun(&cfg)?),
        Command::VerifyOrbital => emit(&cfg, &suites::verify_orbital(&cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
