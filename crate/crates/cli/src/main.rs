//! `qals`: instance generation, benchmark runs, report merging and
//! report verification.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver or transport
//! error, 4 verification failure.

mod config;
mod error;
mod instance;
mod report;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Backend, RunConfig};
use error::{CliError, CliResult};
use instance::{Instance, Kind};
use report::{aggregate, render_table, Report};

#[derive(Parser)]
#[command(
    name = "qals",
    version,
    about = "QUBO benchmarks with quantum annealing learning search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen {
        kind: Kind,
        /// Numbers to partition, or cities.
        #[arg(long)]
        size: usize,
        /// NPP: numbers drawn from 1..=range (default 100). TSP: distances
        /// drawn from [0, range] (default 10).
        #[arg(long)]
        range: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the solvers of a config file and write a report.
    Solve {
        config: PathBuf,
        /// Base run seed; run r uses seed + r.
        #[arg(long)]
        seed: Option<u64>,
        /// Write QALS iteration traces here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Sampler for every QALS solver: exhaustive, sa, random or
        /// bridge:<command>.
        #[arg(long)]
        backend: Option<Backend>,
        /// Report path, overriding the config.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Aggregate CSV path, overriding the config.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Merge reports into one comparison table.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Also write the merged table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-check every row of the given reports against their instances.
    Verify {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qals: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen {
            kind,
            size,
            range,
            seed,
            out,
        } => {
            let inst = Instance::generate(kind, size, range.unwrap_or(kind.default_range()), seed)?;
            inst.save(&out)
        }
        Command::Solve {
            config,
            seed,
            trace,
            backend,
            report,
            csv,
        } => {
            let cfg = RunConfig::load(&config)?;
            let base = config.parent().unwrap_or(Path::new(""));
            let mut plan = cfg.plan(base, backend.as_ref())?;
            if let Some(seed) = seed {
                plan.seed = seed;
            }
            plan.trace = trace.or(plan.trace);
            plan.report = report.unwrap_or(plan.report);
            plan.csv = csv.or(plan.csv);
            let outcome = solve::solve(&plan)?;
            print!("{}", render_table(&outcome.report.aggregates));
            if outcome.failures > 0 {
                return Err(CliError::Runtime(format!(
                    "{} run(s) failed; see the error fields in {}",
                    outcome.failures,
                    plan.report.display()
                )));
            }
            Ok(())
        }
        Command::Report { inputs, csv } => {
            let mut records = Vec::new();
            for path in &inputs {
                records.extend(Report::read(path)?.records);
            }
            let merged = aggregate(&records);
            print!("{}", render_table(&merged));
            match csv {
                Some(path) => report::write_csv(&merged, &path),
                None => Ok(()),
            }
        }
        Command::Verify { inputs } => {
            let mut problems = Vec::new();
            let mut rows = 0;
            for path in &inputs {
                rows += Report::read(path)?.records.len();
                problems.extend(
                    verify::verify_report(path)?
                        .into_iter()
                        .map(|p| format!("{}: {p}", path.display())),
                );
            }
            if problems.is_empty() {
                println!("verified {rows} record(s) in {} report(s)", inputs.len());
                Ok(())
            } else {
                for p in &problems {
                    eprintln!("{p}");
                }
                Err(CliError::Verify(format!("{} problem(s)", problems.len())))
            }
        }
    }
}
