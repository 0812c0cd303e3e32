//! One Monte Carlo realization of the estimated channels (and, on demand,
//! the true channels including estimation error).
//!
//! Sampling is a pure function of `(config, seed, trial_index)`: each tensor
//! draws from its own counter-based stream, so realizations are reproducible,
//! order-independent, and trivially parallel across trials. Estimate and
//! error tensors use disjoint stream tags, which makes them independent by
//! construction.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::linalg::{C64, CMatrix};
use crate::rng::{fill_cn, sample_cn_vec, stream, StreamTag};

/// Estimation-error variances copied from the config, so rate formulas can
/// consume a [`ChannelSet`] without the original config at hand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorVariances {
    /// `[i][k]`, source to relay.
    pub sr: Vec<Vec<f64>>,
    /// `[i][k]`, relay to destination.
    pub rd: Vec<Vec<f64>>,
    /// `[i][j][k]`, direct link.
    pub sd: Vec<Vec<Vec<f64>>>,
    /// `[k]`, self-interference.
    pub rr: Vec<f64>,
}

/// Estimated channels for every pair and subcarrier.
///
/// `h_hat_sr[i][k]` and `h_hat_rd[i][k]` are length-N vectors (the rd channel
/// is a row vector in the model; both are stored as plain vectors),
/// `h_hat_sd[i][j][k]` is the scalar direct channel from source j to
/// destination i, and `h_hat_rr[k]` is the N-by-N self-interference matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub num_pairs: usize,
    pub num_subcarriers: usize,
    pub num_antennas: usize,
    pub h_hat_sr: Vec<Vec<Vec<C64>>>,
    pub h_hat_rd: Vec<Vec<Vec<C64>>>,
    pub h_hat_sd: Vec<Vec<Vec<C64>>>,
    pub h_hat_rr: Vec<CMatrix>,
    pub error_variances: ErrorVariances,
}

/// True channels h = h_hat + error, sampled only for validation and demos;
/// the rate formulas consume estimates plus error variances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrueChannelSet {
    pub h_sr: Vec<Vec<Vec<C64>>>,
    pub h_rd: Vec<Vec<Vec<C64>>>,
    pub h_sd: Vec<Vec<Vec<C64>>>,
    pub h_rr: Vec<CMatrix>,
}

/// Draws every estimated channel as i.i.d. CN(0, psi_hat) with real and
/// imaginary parts independent N(0, psi_hat/2). Expects a validated config.
pub fn sample_channels(config: &SystemConfig, seed: u64, trial_index: u64) -> ChannelSet {
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let n = config.num_antennas;

    let mut h_hat_sr = Vec::with_capacity(l);
    let mut h_hat_rd = Vec::with_capacity(l);
    let mut h_hat_sd = Vec::with_capacity(l);
    for i in 0..l {
        let mut sr_i = Vec::with_capacity(kk);
        let mut rd_i = Vec::with_capacity(kk);
        for k in 0..kk {
            let mut rng = stream(seed, trial_index, StreamTag::SourceRelay, i as u64, 0, k as u64);
            sr_i.push(sample_cn_vec(&mut rng, config.psi_hat_sr[i][k], n));
            let mut rng = stream(seed, trial_index, StreamTag::RelayDest, i as u64, 0, k as u64);
            rd_i.push(sample_cn_vec(&mut rng, config.psi_hat_rd[i][k], n));
        }
        h_hat_sr.push(sr_i);
        h_hat_rd.push(rd_i);

        let mut sd_i = Vec::with_capacity(l);
        for j in 0..l {
            let mut sd_ij = Vec::with_capacity(kk);
            for k in 0..kk {
                let mut rng =
                    stream(seed, trial_index, StreamTag::SourceDest, i as u64, j as u64, k as u64);
                sd_ij.push(sample_cn_vec(&mut rng, config.psi_hat_sd[i][j][k], 1)[0]);
            }
            sd_i.push(sd_ij);
        }
        h_hat_sd.push(sd_i);
    }

    let mut h_hat_rr = Vec::with_capacity(kk);
    for k in 0..kk {
        let mut rng = stream(seed, trial_index, StreamTag::RelaySelf, 0, 0, k as u64);
        // Entries fill row-major, matching the CMatrix layout.
        let data = sample_cn_vec(&mut rng, config.psi_hat_rr[k], n * n);
        h_hat_rr.push(CMatrix::from_data(n, n, data));
    }

    ChannelSet {
        num_pairs: l,
        num_subcarriers: kk,
        num_antennas: n,
        h_hat_sr,
        h_hat_rd,
        h_hat_sd,
        h_hat_rr,
        error_variances: ErrorVariances {
            sr: config.sigma2_e_sr.clone(),
            rd: config.sigma2_e_rd.clone(),
            sd: config.sigma2_e_sd.clone(),
            rr: config.sigma2_e_rr.clone(),
        },
    }
}

/// Adds freshly drawn CN(0, sigma_e^2) errors to the estimates. Error streams
/// are keyed separately from estimate streams, so the two are independent.
pub fn sample_true_channels(
    channels: &ChannelSet,
    config: &SystemConfig,
    seed: u64,
    trial_index: u64,
) -> TrueChannelSet {
    let l = channels.num_pairs;
    let kk = channels.num_subcarriers;
    let n = channels.num_antennas;

    let add_error = |base: &[C64], rng: &mut rand_chacha::ChaCha8Rng, var: f64| -> Vec<C64> {
        let mut err = sample_cn_vec(rng, var, base.len());
        for (e, b) in err.iter_mut().zip(base) {
            *e += b;
        }
        err
    };

    let mut h_sr = Vec::with_capacity(l);
    let mut h_rd = Vec::with_capacity(l);
    let mut h_sd = Vec::with_capacity(l);
    for i in 0..l {
        let mut sr_i = Vec::with_capacity(kk);
        let mut rd_i = Vec::with_capacity(kk);
        for k in 0..kk {
            let mut rng =
                stream(seed, trial_index, StreamTag::ErrSourceRelay, i as u64, 0, k as u64);
            sr_i.push(add_error(&channels.h_hat_sr[i][k], &mut rng, config.sigma2_e_sr[i][k]));
            let mut rng =
                stream(seed, trial_index, StreamTag::ErrRelayDest, i as u64, 0, k as u64);
            rd_i.push(add_error(&channels.h_hat_rd[i][k], &mut rng, config.sigma2_e_rd[i][k]));
        }
        h_sr.push(sr_i);
        h_rd.push(rd_i);

        let mut sd_i = Vec::with_capacity(l);
        for j in 0..l {
            let mut sd_ij = Vec::with_capacity(kk);
            for k in 0..kk {
                let mut rng = stream(
                    seed,
                    trial_index,
                    StreamTag::ErrSourceDest,
                    i as u64,
                    j as u64,
                    k as u64,
                );
                let mut e = sample_cn_vec(&mut rng, config.sigma2_e_sd[i][j][k], 1)[0];
                e += channels.h_hat_sd[i][j][k];
                sd_ij.push(e);
            }
            sd_i.push(sd_ij);
        }
        h_sd.push(sd_i);
    }

    let mut h_rr = Vec::with_capacity(kk);
    for k in 0..kk {
        let mut rng = stream(seed, trial_index, StreamTag::ErrRelaySelf, 0, 0, k as u64);
        let mut data = vec_err(n * n, &mut rng, config.sigma2_e_rr[k]);
        for (e, b) in data.iter_mut().zip(channels.h_hat_rr[k].data()) {
            *e += b;
        }
        h_rr.push(CMatrix::from_data(n, n, data));
    }

    TrueChannelSet { h_sr, h_rd, h_sd, h_rr }
}

fn vec_err(n: usize, rng: &mut rand_chacha::ChaCha8Rng, var: f64) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(0.0, 0.0); n];
    fill_cn(rng, var, &mut out);
    out
}

impl ChannelSet {
    /// Raw binary dump for cross-implementation comparison: all tensors in
    /// declaration order (sr, rd, sd, rr), each traversed row-major over its
    /// indices (`[i][k][antenna]`, `[i][j][k]`, `[k][row][col]`), every
    /// complex entry written as little-endian f64 real part then f64
    /// imaginary part. No header; shapes come from the config.
    pub fn to_interleaved_bytes(&self) -> Vec<u8> {
        let n = self.num_antennas;
        let kk = self.num_subcarriers;
        let l = self.num_pairs;
        let scalars = 2 * (2 * l * kk * n + l * l * kk + kk * n * n);
        let mut out = Vec::with_capacity(scalars * 8);
        let push = |z: &C64, out: &mut Vec<u8>| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        };
        for per_pair in [&self.h_hat_sr, &self.h_hat_rd] {
            for per_k in per_pair {
                for v in per_k {
                    for z in v {
                        push(z, &mut out);
                    }
                }
            }
        }
        for sd_i in &self.h_hat_sd {
            for sd_ij in sd_i {
                for z in sd_ij {
                    push(z, &mut out);
                }
            }
        }
        for m in &self.h_hat_rr {
            for z in m.data() {
                push(z, &mut out);
            }
        }
        out
    }

    /// JSON dump of the full set (complex entries as `[re, im]` pairs).
    pub fn to_json(&self) -> alloc::string::String {
        serde_json::to_string(self).expect("channel serialization cannot fail")
    }
}
