//! Command-line front end. Exit codes: 0 success, 1 a checked inequality
//! failed, 2 bad input.

pub mod commands;
pub mod config;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::arith::Rational;
use crate::counterexample::{build, demonstrate_failure};
use crate::error::{Error, Result};
pub use commands::Outcome;
pub use config::Distribution;
pub use table::{Format, Table};

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "SIEVELAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "sievelab", version, about = "Numerical checks of large sieve inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the Farey points of order Q with their gaps.
    Farey {
        #[arg(long)]
        order: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random linear-amplitude instances against the classical bounds.
    VerifyClassical {
        #[arg(long, default_value_t = 200)]
        instances: u64,
        /// Largest order; each instance draws Q from [2, Q].
        #[arg(long = "Q", default_value_t = 32)]
        q: u64,
        /// Largest window length.
        #[arg(long = "N", default_value_t = 256)]
        n: u64,
        /// Largest |M|.
        #[arg(long = "M", default_value_t = 64)]
        m: i64,
        #[arg(long, default_value = "gaussian")]
        dist: Distribution,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        rhs_scale: f64,
        /// Add a runtime_ms column (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Grid sweep of the quadratic-amplitude bound shapes.
    Theorem2Sweep {
        #[arg(long = "Q", value_delimiter = ',', default_values_t = [4u64, 8, 16, 32])]
        q: Vec<u64>,
        #[arg(long = "N", value_delimiter = ',', default_values_t = [16u64, 64, 256])]
        n: Vec<u64>,
        #[arg(long = "M", value_delimiter = ',', default_values_t = [0i64], allow_hyphen_values = true)]
        m: Vec<i64>,
        #[arg(long, value_delimiter = ',', default_values_t = default_sweep().alphas)]
        alpha: Vec<Rational>,
        /// Values of β/α as reduced fractions a/b.
        #[arg(long, value_delimiter = ',', default_values_t = default_sweep().ratios, allow_hyphen_values = true)]
        ratio: Vec<Rational>,
        #[arg(long, value_delimiter = ',', default_values_t = default_sweep().eps)]
        eps: Vec<f64>,
        #[arg(long, default_value = "unit")]
        dist: Distribution,
        #[arg(long, default_value_t = default_sweep().seed)]
        seed: u64,
        /// Skip the double large sieve chain columns.
        #[arg(long)]
        no_chain: bool,
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// The prime-square construction breaking the naive bound. Prints a
    /// summary line, then the report as JSON (or to --out in --format).
    Counterexample {
        #[arg(long)]
        p: u64,
        #[arg(long = "N")]
        n: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Random instances of the double large sieve inequality.
    DlsCheck {
        #[arg(long, default_value_t = 500)]
        instances: u64,
        #[arg(long, default_value_t = 50)]
        max_size: usize,
        #[arg(long, default_value_t = 0.25)]
        span_min: f64,
        #[arg(long, default_value_t = 100.0)]
        span_max: f64,
        #[arg(long, default_value = "gaussian")]
        dist: Distribution,
        #[arg(long, default_value_t = 3)]
        seed: u64,
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Pair counts |g(s,t) - g(m,n)| <= 1/(2α) by brute force and by divisors.
    Lemma4 {
        #[arg(long = "N")]
        n: u64,
        #[arg(long = "M", default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        alpha: Rational,
        #[arg(long, default_value = "0/1", allow_hyphen_values = true)]
        ratio: Rational,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = crate::dls::LEMMA4_CAP)]
        cap: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn default_sweep() -> commands::SweepConfig {
    commands::SweepConfig::default()
}

/// Applies [`THREADS_ENV`] to the global pool. Ignored if unset or invalid.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if the pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn emit(output: &Output, table: &Table) -> Result<()> {
    let io_err = |e: io::Error| Error::Parse(format!("output: {e}"));
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            table.write(&mut w, output.format)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, output.format)?;
            lock.flush().map_err(io_err)
        }
    }
}

fn finish(output: &Output, outcome: Outcome) -> Result<i32> {
    emit(output, &outcome.table)?;
    eprintln!("{}", outcome.summary);
    Ok(if outcome.passed { 0 } else { 1 })
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Farey { order, output } => {
            let table = commands::farey_table(order)?;
            emit(&output, &table)?;
            Ok(0)
        }
        Command::VerifyClassical {
            instances,
            q,
            n,
            m,
            dist,
            seed,
            rhs_scale,
            timing,
            output,
        } => {
            let cfg = commands::ClassicalConfig {
                instances,
                max_q: q,
                max_n: n,
                max_abs_m: m,
                dist,
                seed,
                rhs_scale,
                timing,
            };
            finish(&output, commands::verify_classical(&cfg)?)
        }
        Command::Theorem2Sweep {
            q,
            n,
            m,
            alpha,
            ratio,
            eps,
            dist,
            seed,
            no_chain,
            timing,
            output,
        } => {
            let cfg = commands::SweepConfig {
                qs: q,
                ns: n,
                ms: m,
                alphas: alpha,
                ratios: ratio,
                eps,
                dist,
                seed,
                chain: !no_chain,
                timing,
            };
            finish(&output, commands::theorem2_sweep(&cfg)?)
        }
        Command::Counterexample { p, n, output } => {
            let report = demonstrate_failure(&build(p, n)?)?;
            let mut table = Table::new();
            let value = serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
            let serde_json::Value::Object(map) = value else {
                unreachable!("report serializes to an object")
            };
            table.push(map.into_iter().collect());
            println!("{}", report.summary());
            match &output.out {
                Some(_) => emit(&output, &table)?,
                None => emit(
                    &Output {
                        out: None,
                        format: Format::Json,
                    },
                    &table,
                )?,
            }
            Ok(0)
        }
        Command::DlsCheck {
            instances,
            max_size,
            span_min,
            span_max,
            dist,
            seed,
            timing,
            output,
        } => {
            let cfg = commands::DlsConfig {
                instances,
                max_size,
                span_min,
                span_max,
                dist,
                seed,
                timing,
            };
            finish(&output, commands::dls_check_run(&cfg)?)
        }
        Command::Lemma4 {
            n,
            m,
            alpha,
            ratio,
            eps,
            cap,
            output,
        } => {
            let cfg = commands::Lemma4Config {
                offset: m,
                len: n,
                alpha,
                ratio,
                eps,
                cap,
            };
            finish(&output, commands::lemma4_run(&cfg)?)
        }
    }
}
