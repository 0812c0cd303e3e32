//! Monte Carlo sanity checks tying the finite-N pipeline to known limits:
//! matched-filter SINR growth without impairments, and shrinking gap to the
//! closed-form limit with them. The acceptance suite runs the full-scale
//! versions; these are smaller smoke-level counterparts.

use fdrelay_core::asymptotic::asymptotic_rate;
use fdrelay_core::beamform::build_mrc_mrt;
use fdrelay_core::channel::sample_channels;
use fdrelay_core::config::{RelayDistortion, SystemConfig};
use fdrelay_core::finite_rate::{rates, InterferenceBreakdown};

fn clean_config(n: usize) -> SystemConfig {
    SystemConfig {
        num_pairs: 1,
        num_subcarriers: 1,
        num_antennas: n,
        p_s: vec![vec![1.5]],
        p_r: vec![vec![1.0]],
        kappa_s_tilde: vec![0.0],
        beta_d_tilde: vec![0.0],
        kappa_r_tilde: RelayDistortion::Scalar(0.0),
        beta_r_tilde: RelayDistortion::Scalar(0.0),
        sigma2_n_r: vec![0.8],
        sigma2_n_d: vec![vec![1.0]],
        psi_hat_sr: vec![vec![1.0]],
        psi_hat_rd: vec![vec![1.0]],
        psi_hat_sd: vec![vec![vec![0.0]]],
        psi_hat_rr: vec![1.0],
        sigma2_e_sr: vec![vec![0.0]],
        sigma2_e_rd: vec![vec![0.0]],
        sigma2_e_sd: vec![vec![vec![0.0]]],
        sigma2_e_rr: vec![0.0],
        gamma0: 1.0,
    }
}

fn impaired_config(n: usize) -> SystemConfig {
    let (l, kk) = (1, 2);
    SystemConfig {
        num_pairs: l,
        num_subcarriers: kk,
        num_antennas: n,
        p_s: vec![vec![1.0; kk]; l],
        p_r: vec![vec![1.0; kk]; l],
        kappa_s_tilde: vec![0.02; l],
        beta_d_tilde: vec![0.02; l],
        kappa_r_tilde: RelayDistortion::Scalar(0.05),
        beta_r_tilde: RelayDistortion::Scalar(0.05),
        sigma2_n_r: vec![1.0; kk],
        sigma2_n_d: vec![vec![1.0; kk]; l],
        psi_hat_sr: vec![vec![1.0; kk]; l],
        psi_hat_rd: vec![vec![1.0; kk]; l],
        psi_hat_sd: vec![vec![vec![0.1; kk]; l]; l],
        psi_hat_rr: vec![1.0; kk],
        sigma2_e_sr: vec![vec![0.1; kk]; l],
        sigma2_e_rd: vec![vec![0.1; kk]; l],
        sigma2_e_sd: vec![vec![vec![0.01; kk]; l]; l],
        sigma2_e_rr: vec![0.1; kk],
        gamma0: 1.0,
    }
}

fn mean_uplink_sinr(cfg: &SystemConfig, seed: u64, trials: u64) -> f64 {
    let mut acc = 0.0;
    for t in 0..trials {
        let ch = sample_channels(cfg, seed, t);
        let f = build_mrc_mrt(&ch).unwrap();
        let r = rates(&InterferenceBreakdown::compute(&ch, &f, cfg), cfg);
        acc += r.sinr_sr[0][0];
    }
    acc / trials as f64
}

#[test]
fn matched_filter_sinr_tracks_antenna_count_without_impairments() {
    // Without distortion or estimation error the uplink SINR is
    // ||h||^2 p / sigma^2, whose mean is N psi p / sigma^2.
    for n in [64usize, 256] {
        let cfg = clean_config(n);
        let mean = mean_uplink_sinr(&cfg, 97, 100);
        let want = n as f64 * 1.0 * 1.5 / 0.8;
        let rel = ((mean - want) / want).abs();
        assert!(rel < 0.05, "N={n}: mean SINR {mean:.2} vs {want:.2} (rel {rel:.3})");
    }
}

#[test]
fn impaired_rates_approach_the_closed_form_limit() {
    let cfg = impaired_config(512);
    let limit = asymptotic_rate(&cfg).unwrap();
    let trials = 40;
    let mut mean = vec![0.0; 2];
    for t in 0..trials {
        let ch = sample_channels(&cfg, 11, t);
        let f = build_mrc_mrt(&ch).unwrap();
        let r = rates(&InterferenceBreakdown::compute(&ch, &f, &cfg), &cfg);
        for k in 0..2 {
            mean[k] += r.rate_total[0][k];
        }
    }
    for k in 0..2 {
        mean[k] /= trials as f64;
        let gap = (mean[k] - limit.rate_limit[0][k]).abs();
        let rel = gap / limit.rate_limit[0][k];
        assert!(
            rel < 0.35,
            "subcarrier {k}: mean {:.3} vs limit {:.3} (rel gap {rel:.3})",
            mean[k],
            limit.rate_limit[0][k]
        );
    }
}

#[test]
fn finite_rate_stays_below_limit_on_average_at_large_n() {
    // The limit is an upper bound; at N=512 the average should sit under it.
    let cfg = impaired_config(512);
    let limit = asymptotic_rate(&cfg).unwrap();
    let trials = 20;
    let mut mean = 0.0;
    for t in 0..trials {
        let ch = sample_channels(&cfg, 23, t);
        let f = build_mrc_mrt(&ch).unwrap();
        let r = rates(&InterferenceBreakdown::compute(&ch, &f, &cfg), &cfg);
        mean += r.rate_total[0][0];
    }
    mean /= trials as f64;
    assert!(
        mean < limit.rate_limit[0][0],
        "mean {mean:.3} should not exceed limit {:.3}",
        limit.rate_limit[0][0]
    );
}
