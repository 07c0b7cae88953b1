//! `brank`: Kronecker coefficients, highest weight bases, vanishing kernels,
//! border rank certificates and numerical witness sets from the command line.
//!
//! Every command prints one JSON report (or writes it to `--out`). Exit codes:
//! 0 on success, 2 when a numerical result is inconclusive, 1 on errors.

mod args;
mod commands;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use args::Cli;

/// What a command produced, and whether it settled its question.
pub struct Outcome {
    pub result: Value,
    pub primes: Vec<u64>,
    pub seed: Option<u64>,
    pub conclusive: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: &'a Cli,
    seed: Option<u64>,
    primes: &'a [u64],
    versions: Value,
    result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

fn write_json(value: &impl Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command)?;
    let report = Report {
        command: cli.command.name(),
        config: cli,
        seed: outcome.seed,
        primes: &outcome.primes,
        versions: json!({ "border-rank": border_rank::VERSION, "brank": env!("CARGO_PKG_VERSION") }),
        result: &outcome.result,
        wall_time_s: (!cli.no_timing).then(|| start.elapsed().as_secs_f64()),
    };
    write_json(&report, cli.out.as_deref())?;
    Ok(outcome.conclusive)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are errors (1), not inconclusive results (2)
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
