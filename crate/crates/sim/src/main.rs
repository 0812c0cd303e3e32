//! fdrelay: finite-N Monte Carlo trials, antenna-count sweeps, and large-N
//! rate limits for the multi-pair full-duplex relay model.
//!
//! Exit codes: 0 success, 1 semantic failure (validation violations, degenerate
//! trials, failed concentration checks), 2 I/O or parse failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fdrelay_core::asymptotic::{
    asymptotic_rate, asymptotic_rate_perfect_csi, lemma1_check, lemma2_check, MatrixSpec,
};
use fdrelay_core::channel::sample_channels;
use fdrelay_core::finite_rate::{InterferenceBreakdown, RateReport};
use fdrelay_core::{validate, SystemConfig};
use fdrelay_sim::experiment::{run_sweep, run_trial, run_trial_with_breakdown};
use fdrelay_sim::output::{sweep_to_csv, sweep_to_json};

#[derive(Parser)]
#[command(
    name = "fdrelay",
    version,
    about = "Finite-N rates and large-N limits for a multi-pair full-duplex relay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one finite-N trial and print its rate report as JSON.
    Simulate {
        /// System config (JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial index; (seed, trial) fixes every random draw.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Include the per-pair interference coefficient tables.
        #[arg(long)]
        with_breakdown: bool,
        /// Write the sampled estimated channels to this file before the trial
        /// (.json extension for JSON, anything else for raw little-endian
        /// re/im f64 pairs).
        #[arg(long)]
        dump_channels: Option<PathBuf>,
    },
    /// Print the closed-form large-N rate limits as JSON.
    Asymptote {
        /// System config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Weight the destination side by the full downlink channel power
        /// instead of the estimated part only.
        #[arg(long)]
        perfect_csi: bool,
    },
    /// Sweep antenna counts, averaging trial rates, and compare to the limits.
    Sweep {
        /// System config (JSON); its antenna count is overridden per sweep point.
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated strictly ascending antenna counts, e.g. 64,256,1024.
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads. Defaults to FDRELAY_PARALLELISM, then the CPU count.
        /// Results are identical for every value.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check the random-vector concentration bounds behind the limits and
    /// print the measured statistics as JSON.
    VerifyLemmas {
        /// System config (JSON); validated for interface consistency, the
        /// checks themselves draw fresh unit-variance vectors.
        #[arg(long)]
        config: PathBuf,
        /// Vector dimension for the concentration checks.
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Standard deviation of the first test vector's entries.
        #[arg(long, default_value_t = 1.0)]
        sigma_p: f64,
        /// Standard deviation of the second, independent test vector's entries.
        #[arg(long, default_value_t = 1.0)]
        sigma_q: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            trial,
            with_breakdown,
            dump_channels,
        } => simulate(
            &load_config(&config)?,
            seed,
            trial,
            with_breakdown,
            dump_channels.as_deref(),
        ),
        Command::Asymptote {
            config,
            perfect_csi,
        } => asymptote(&load_config(&config)?, perfect_csi),
        Command::Sweep {
            config,
            n_values,
            trials,
            seed,
            parallelism,
            out,
            format,
        } => sweep(
            &load_config(&config)?,
            &n_values,
            trials,
            seed,
            parallelism,
            out.as_deref(),
            format,
        ),
        Command::VerifyLemmas {
            config,
            n,
            trials,
            seed,
            sigma_p,
            sigma_q,
        } => {
            load_config(&config)?;
            verify_lemmas(n, trials, seed, sigma_p, sigma_q)
        }
    }
}

fn load_config(path: &Path) -> Result<SystemConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let config = SystemConfig::from_json(&text)
        .map_err(|e| Failure::io(format!("cannot parse {}: {e}", path.display())))?;
    let report = validate(&config);
    if !report.passed() {
        return Err(Failure::semantic(format!("invalid config:\n{report}")));
    }
    Ok(config)
}

#[derive(Serialize)]
struct TrialOutput<'a> {
    report: &'a RateReport,
    breakdown: &'a InterferenceBreakdown,
}

fn simulate(
    config: &SystemConfig,
    seed: u64,
    trial: u64,
    with_breakdown: bool,
    dump_channels: Option<&Path>,
) -> Result<(), Failure> {
    if let Some(path) = dump_channels {
        // Resampling inside run_trial reproduces these draws exactly.
        let channels = sample_channels(config, seed, trial);
        let bytes = if path.extension().is_some_and(|e| e == "json") {
            channels.to_json().into_bytes()
        } else {
            channels.to_interleaved_bytes()
        };
        fs::write(path, bytes)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
    }
    if with_breakdown {
        let (report, breakdown) = run_trial_with_breakdown(config, seed, trial)
            .map_err(|e| Failure::semantic(e.to_string()))?;
        print_json(&TrialOutput {
            report: &report,
            breakdown: &breakdown,
        });
    } else {
        let report =
            run_trial(config, seed, trial).map_err(|e| Failure::semantic(e.to_string()))?;
        print_json(&report);
    }
    Ok(())
}

fn asymptote(config: &SystemConfig, perfect_csi: bool) -> Result<(), Failure> {
    let limits = if perfect_csi {
        asymptotic_rate_perfect_csi(config)
    } else {
        asymptotic_rate(config)
    }
    .map_err(|e| Failure::semantic(e.to_string()))?;
    print_json(&limits);
    Ok(())
}

fn sweep(
    config: &SystemConfig,
    n_values: &[usize],
    trials: u64,
    seed: u64,
    parallelism: Option<usize>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let parallelism = resolve_parallelism(parallelism)?;
    let result = run_sweep(config, n_values, trials, seed, parallelism)
        .map_err(|e| Failure::semantic(e.to_string()))?;
    let text = match format {
        Format::Json => sweep_to_json(&result),
        Format::Csv => sweep_to_csv(&result).expect("csv rows are plain scalars"),
    };
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn resolve_parallelism(flag: Option<usize>) -> Result<usize, Failure> {
    let from = |p: usize, what: &str| {
        if p == 0 {
            Err(Failure::semantic(format!("{what} must be at least 1")))
        } else {
            Ok(p)
        }
    };
    if let Some(p) = flag {
        return from(p, "--parallelism");
    }
    if let Ok(text) = std::env::var("FDRELAY_PARALLELISM") {
        let p = text.trim().parse::<usize>().map_err(|_| {
            Failure::semantic(format!(
                "FDRELAY_PARALLELISM must be a positive integer, got {text:?}"
            ))
        })?;
        return from(p, "FDRELAY_PARALLELISM");
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn verify_lemmas(
    n: usize,
    trials: u64,
    seed: u64,
    sigma_p: f64,
    sigma_q: f64,
) -> Result<(), Failure> {
    let reports = [
        lemma1_check(n, sigma_p, sigma_q, trials, seed),
        lemma2_check(n, MatrixSpec::Identity, trials, seed),
        lemma2_check(n, MatrixSpec::DiagonalRamp, trials, seed),
        lemma2_check(n, MatrixSpec::TracelessReflected, trials, seed),
    ];
    print_json(&reports);
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::semantic("concentration bounds violated"))
    }
}

fn print_json(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports always serialize")
    );
}
