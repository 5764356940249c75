use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsub_cli::config::parse_config;
use qsub_cli::experiment::{run_experiment, run_sweep, Report, SweepReport};
use qsub_cli::CliError;

/// Run quasi-subgradient experiments and verify their convergence guarantees.
///
/// Exit status: 0 when every check holds, 2 when a check fails or aborts,
/// 1 on configuration or I/O errors.
#[derive(Parser)]
#[command(name = "qsub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write <out>/<name>.trace.csv and <out>/<name>.report.json
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (defaults to $QSUB_OUT_DIR); must exist
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override run.seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Run the experiment once per value of a dotted config key
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted key, e.g. stepsize.v or run.max_iter
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn out_dir(out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    out.or_else(|| env::var_os("QSUB_OUT_DIR").map(PathBuf::from))
        .ok_or(CliError::NoOutDir)
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn print_report(r: &Report) {
    println!(
        "{}: {} iterations ({:?}), min gap {:.6e}",
        r.experiment, r.run.iterations, r.run.termination, r.run.min_gap
    );
    for c in &r.checks {
        let reason = c
            .details
            .get("reason")
            .and_then(|v| v.as_str())
            .unwrap_or("");
        let status = format!("{:?}", c.status).to_lowercase();
        println!("  {:<13} {status:<12} {reason}", c.id);
    }
    println!("  summary: {}", r.summary);
}

fn print_sweep(r: &SweepReport) {
    println!("{} sweep over {}:", r.experiment, r.param);
    for m in &r.members {
        println!(
            "  {} = {:<12} {}  min gap {:.6e}",
            r.param, m.value, m.summary, m.min_gap
        );
    }
    if let Some(e) = r.min_gap_fit.and_then(|f| f.exponent()) {
        println!("  min gap ~ value^(-{e:.4})");
    }
    println!("  summary: {}", r.summary);
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            quiet,
        } => {
            let out = out_dir(out)?;
            let exp = parse_config(&read(&config)?)?;
            let report = run_experiment(&exp, &out, seed)?;
            if !quiet {
                print_report(&report);
            }
            Ok(if report.passed() {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
            seed,
            quiet,
        } => {
            let out = out_dir(out)?;
            let report = run_sweep(&read(&config)?, &param, &values, &out, seed)?;
            if !quiet {
                print_sweep(&report);
            }
            Ok(if report.passed() {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
