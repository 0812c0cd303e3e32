//! Seeded trials and antenna sweeps with deterministic aggregation.
//!
//! Every trial is a pure function of (config, seed, trial_index), so a sweep
//! can fan trials out across any number of workers and still reduce to
//! bit-identical results: per-trial outputs are collected in trial order and
//! summed pairwise, ascending.

use fdrelay_core::asymptotic::{asymptotic_rate, AsymptoticError};
use fdrelay_core::beamform::{build_mrc_mrt, BeamformError};
use fdrelay_core::channel::sample_channels;
use fdrelay_core::config::{validate, ValidationReport};
use fdrelay_core::finite_rate::{rates, InterferenceBreakdown, RateReport};
use fdrelay_core::linalg::pairwise_sum;
use fdrelay_core::SystemConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One full finite-N evaluation: sample channels, build filters, decompose
/// interference, rate it. Deterministic in (config, seed, trial_index).
pub fn run_trial(
    config: &SystemConfig,
    seed: u64,
    trial_index: u64,
) -> Result<RateReport, BeamformError> {
    let channels = sample_channels(config, seed, trial_index);
    let filters = build_mrc_mrt(&channels)?;
    let breakdown = InterferenceBreakdown::compute(&channels, &filters, config);
    Ok(rates(&breakdown, config))
}

/// [`run_trial`] that also returns the interference decomposition.
pub fn run_trial_with_breakdown(
    config: &SystemConfig,
    seed: u64,
    trial_index: u64,
) -> Result<(RateReport, InterferenceBreakdown), BeamformError> {
    let channels = sample_channels(config, seed, trial_index);
    let filters = build_mrc_mrt(&channels)?;
    let breakdown = InterferenceBreakdown::compute(&channels, &filters, config);
    Ok((rates(&breakdown, config), breakdown))
}

/// Aggregated sweep over antenna counts; all statistics are on rate_total.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n_values: Vec<usize>,
    /// Mean rate_total over trials, indexed `[pair][subcarrier][n_index]`.
    pub mean_rate: Vec<Vec<Vec<f64>>>,
    /// Sample standard deviation (n-1 denominator; 0 for a single trial).
    pub std_rate: Vec<Vec<Vec<f64>>>,
    /// Closed-form limit, independent of N.
    pub asymptotic_rate: Vec<Vec<f64>>,
    /// |mean_rate - asymptotic_rate| per `[pair][subcarrier][n_index]`.
    pub gap: Vec<Vec<Vec<f64>>>,
    pub trials: u64,
    pub seed: u64,
    /// SHA-256 of the canonical config JSON; ties results to their input.
    pub config_digest: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid config:\n{0}")]
    InvalidConfig(ValidationReport),
    #[error("trial {trial} at N={n} failed: {source}")]
    Trial {
        n: usize,
        trial: u64,
        source: BeamformError,
    },
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error("{0}")]
    BadArgs(String),
}

/// SHA-256 hex digest of the canonical serialized config.
pub fn config_digest(config: &SystemConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.to_json().as_bytes());
    hex::encode(hasher.finalize())
}

/// Runs `trials` trials of the template config at each antenna count and
/// aggregates rate_total into means, standard deviations, and gaps to the
/// closed-form limit. `parallelism` sets the worker count and has no effect
/// on the result, bit for bit.
pub fn run_sweep(
    template: &SystemConfig,
    n_values: &[usize],
    trials: u64,
    seed: u64,
    parallelism: usize,
) -> Result<SweepResult, SweepError> {
    let report = validate(template);
    if !report.passed() {
        return Err(SweepError::InvalidConfig(report));
    }
    if n_values.is_empty() {
        return Err(SweepError::BadArgs("n_values must be non-empty".into()));
    }
    if !n_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(SweepError::BadArgs("n_values must be strictly ascending".into()));
    }
    if trials == 0 {
        return Err(SweepError::BadArgs("trials must be at least 1".into()));
    }
    if parallelism == 0 {
        return Err(SweepError::BadArgs("parallelism must be at least 1".into()));
    }

    // The closed-form limit does not depend on N, so the template's antenna
    // count is irrelevant here.
    let limits = asymptotic_rate(template)?;

    let l = template.num_pairs;
    let kk = template.num_subcarriers;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| SweepError::BadArgs(format!("cannot build worker pool: {e}")))?;

    let mut mean_rate = vec![vec![vec![0.0; n_values.len()]; kk]; l];
    let mut std_rate = vec![vec![vec![0.0; n_values.len()]; kk]; l];
    let mut gap = vec![vec![vec![0.0; n_values.len()]; kk]; l];

    for (ni, &n) in n_values.iter().enumerate() {
        let mut cfg = template.clone();
        cfg.num_antennas = n;
        // Workers produce independent trials; collect() keeps trial order.
        let per_trial: Result<Vec<RateReport>, SweepError> = pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    run_trial(&cfg, seed, t)
                        .map_err(|source| SweepError::Trial { n, trial: t, source })
                })
                .collect()
        });
        let per_trial = per_trial?;

        for i in 0..l {
            for k in 0..kk {
                let samples: Vec<f64> =
                    per_trial.iter().map(|r| r.rate_total[i][k]).collect();
                let mean = pairwise_sum(&samples) / trials as f64;
                let std = if trials > 1 {
                    let sq: Vec<f64> =
                        samples.iter().map(|x| (x - mean) * (x - mean)).collect();
                    (pairwise_sum(&sq) / (trials as f64 - 1.0)).sqrt()
                } else {
                    0.0
                };
                mean_rate[i][k][ni] = mean;
                std_rate[i][k][ni] = std;
                gap[i][k][ni] = (mean - limits.rate_limit[i][k]).abs();
            }
        }
    }

    Ok(SweepResult {
        n_values: n_values.to_vec(),
        mean_rate,
        std_rate,
        asymptotic_rate: limits.rate_limit,
        gap,
        trials,
        seed,
        config_digest: config_digest(template),
    })
}
