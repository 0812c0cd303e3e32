//! Exact finite-N interference terms, SINRs, and achievable rates.
//!
//! Two independently coded evaluation paths cover the same physics:
//!
//! - [`uplink_terms`] / [`downlink_terms`] compute the per-pair interference
//!   coefficient arrays (gamma terms) that enter the rate denominators;
//! - [`covariance_relay`] / [`covariance_dest`] assemble the full
//!   interference-plus-noise covariances block by block.
//!
//! The quadratic form of the covariance in the receive filter must match the
//! gamma-decomposed denominator; tests and the acceptance suite hold the two
//! paths to a relative 1e-9 agreement. Keep them independent: a transcription
//! error in one is caught by the other.
//!
//! Distortion enters through diagonal weightings: every quadratic form
//! reduces to sums of theta_l |a_l|^2 |b_l|^2 over antenna chains, so all
//! coefficients are non-negative by construction and each is monotone in the
//! distortion coefficients.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::beamform::FilterSet;
use crate::channel::ChannelSet;
use crate::config::{derived_constants, SystemConfig};
use crate::linalg::{abs2, dotu, inner, norm_sqr, C64, CMatrix};

/// `[i][j][k][m]` interference coefficient array.
type Coeff4 = Vec<Vec<Vec<Vec<f64>>>>;

/// Uplink (source to relay) interference decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UplinkTerms {
    /// Desired-signal gain |u^H h_hat_sr|^2, `[i][k]`.
    pub mu_s: Vec<Vec<f64>>,
    /// Source-induced interference coefficients, multiply p_s`[j][m]`.
    pub gamma_s: Coeff4,
    /// Relay-induced (self-interference) coefficients, multiply p_r`[j][m]`.
    pub gamma_r: Coeff4,
    /// Noise floor at the filter output, `[i][k]`.
    pub alpha_n_r: Vec<Vec<f64>>,
}

/// Downlink (relay to destination) interference decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownlinkTerms {
    /// Desired-signal gain |h_hat_rd v|^2, `[i][k]`.
    pub mu_r: Vec<Vec<f64>>,
    pub gamma_bar_s: Coeff4,
    pub gamma_bar_r: Coeff4,
    pub alpha_n_d: Vec<Vec<f64>>,
}

/// Both link directions, labeled by physical origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferenceBreakdown {
    pub mu_s: Vec<Vec<f64>>,
    pub mu_r: Vec<Vec<f64>>,
    pub gamma_s: Coeff4,
    pub gamma_r: Coeff4,
    pub gamma_bar_s: Coeff4,
    pub gamma_bar_r: Coeff4,
    pub alpha_n_r: Vec<Vec<f64>>,
    pub alpha_n_d: Vec<Vec<f64>>,
}

impl InterferenceBreakdown {
    pub fn compute(channels: &ChannelSet, filters: &FilterSet, config: &SystemConfig) -> Self {
        let up = uplink_terms(channels, filters, config);
        let down = downlink_terms(channels, filters, config);
        InterferenceBreakdown {
            mu_s: up.mu_s,
            mu_r: down.mu_r,
            gamma_s: up.gamma_s,
            gamma_r: up.gamma_r,
            gamma_bar_s: down.gamma_bar_s,
            gamma_bar_r: down.gamma_bar_r,
            alpha_n_r: up.alpha_n_r,
            alpha_n_d: down.alpha_n_d,
        }
    }
}

fn abs2_vec(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| abs2(*z)).collect()
}

/// Uplink interference coefficients for every (i, j, k, m).
///
/// Term order follows the printed decomposition: co-channel leakage
/// (same-subcarrier beam collision plus estimation error), source transmit
/// distortion (kappa_s images of the same quadratics), relay receive
/// distortion (diagonal image of the source channels through Theta_r,r),
/// relay transmit distortion routed through the self-interference channel
/// (Theta_t,r), the residual SI estimation error, and the receive-distortion
/// image of the relay's own transmit signal.
pub fn uplink_terms(
    channels: &ChannelSet,
    filters: &FilterSet,
    config: &SystemConfig,
) -> UplinkTerms {
    let d = derived_constants(config);
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let theta_t = &d.kappa_r;
    let theta_r = &d.beta_r;
    let theta_t_active = !theta_t.is_zero();
    let theta_r_active = !theta_r.is_zero();

    // Shared across all (i,k): per-(j,m) elementwise powers of the precoders,
    // the source channels, and (when receive distortion is on) the SI channel
    // applied to each precoder.
    let v_abs2: Vec<Vec<Vec<f64>>> = (0..l)
        .map(|j| (0..kk).map(|m| abs2_vec(&filters.v_r[j][m])).collect())
        .collect();
    let h_sr_abs2: Vec<Vec<Vec<f64>>> = (0..l)
        .map(|j| (0..kk).map(|m| abs2_vec(&channels.h_hat_sr[j][m])).collect())
        .collect();
    let t_abs2: Vec<Vec<Vec<f64>>> = if theta_r_active {
        (0..l)
            .map(|j| {
                (0..kk)
                    .map(|m| abs2_vec(&channels.h_hat_rr[m].mul_vec(&filters.v_r[j][m])))
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    let e_sr = &config.sigma2_e_sr;
    let e_rr = &config.sigma2_e_rr;
    let sum_sigma_n_r: f64 = config.sigma2_n_r.iter().sum();

    let mut mu_s = vec![vec![0.0; kk]; l];
    let mut gamma_s = vec![vec![vec![vec![0.0; kk]; kk]; l]; l];
    let mut gamma_r = vec![vec![vec![vec![0.0; kk]; kk]; l]; l];
    let mut alpha_n_r = vec![vec![0.0; kk]; l];

    for i in 0..l {
        for k in 0..kk {
            let u = &filters.u_r[i][k];
            let u_abs2 = abs2_vec(u);
            // u^H Theta_r,r u, the receive-distortion weight of the filter.
            let theta_r_u = theta_r.weighted_trace(&u_abs2);
            let w_abs2: Vec<f64> = if theta_t_active {
                abs2_vec(&channels.h_hat_rr[k].adjoint_mul_vec(u))
            } else {
                Vec::new()
            };

            mu_s[i][k] = abs2(inner(u, &channels.h_hat_sr[i][k]));

            for j in 0..l {
                // |u^H h_hat_sr[j][k]|^2, shared by the co-channel and
                // transmit-distortion terms (both live on subcarrier k).
                let c_jk = abs2(inner(u, &channels.h_hat_sr[j][k]));
                for m in 0..kk {
                    let mut g = 0.0;
                    if k == m {
                        if i != j {
                            g += c_jk;
                        }
                        g += e_sr[j][k];
                    }
                    g += d.kappa_s[j] * c_jk;
                    g += e_sr[j][k] * d.kappa_s[j];
                    if theta_r_active {
                        g += theta_r.weighted_trace2(&u_abs2, &h_sr_abs2[j][m]);
                        g += e_sr[j][m] * theta_r_u;
                    }
                    gamma_s[i][j][k][m] = g;

                    let mut g = 0.0;
                    if theta_t_active {
                        g += theta_t.weighted_trace2(&w_abs2, &v_abs2[j][m]);
                    }
                    if k == m {
                        g += e_rr[k];
                    }
                    if theta_t_active {
                        g += e_rr[k] * theta_t.weighted_trace(&v_abs2[j][m]);
                    }
                    if theta_r_active {
                        g += theta_r.weighted_trace2(&u_abs2, &t_abs2[j][m]);
                        g += e_rr[m] * theta_r_u;
                    }
                    gamma_r[i][j][k][m] = g;
                }
            }

            alpha_n_r[i][k] = theta_r_u * sum_sigma_n_r + config.sigma2_n_r[k] * norm_sqr(u);
        }
    }

    UplinkTerms { mu_s, gamma_s, gamma_r, alpha_n_r }
}

/// Downlink interference coefficients for every (i, j, k, m): direct-channel
/// leakage, source transmit distortion, relay transmit distortion seen
/// through the rd channel, residual rd estimation error, and the destination
/// receive-distortion images (beta_d) of every arriving signal.
pub fn downlink_terms(
    channels: &ChannelSet,
    filters: &FilterSet,
    config: &SystemConfig,
) -> DownlinkTerms {
    let d = derived_constants(config);
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let theta_t = &d.kappa_r;
    let theta_t_active = !theta_t.is_zero();

    let v_abs2: Vec<Vec<Vec<f64>>> = (0..l)
        .map(|j| (0..kk).map(|m| abs2_vec(&filters.v_r[j][m])).collect())
        .collect();
    // |h_hat_rd[i][m] v_r[j][m]|^2 for every (i, j, m): the beam gain of
    // pair j's precoder toward destination i.
    let rd_v: Vec<Vec<Vec<f64>>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    (0..kk)
                        .map(|m| abs2(dotu(&channels.h_hat_rd[i][m], &filters.v_r[j][m])))
                        .collect()
                })
                .collect()
        })
        .collect();

    let e_sd = &config.sigma2_e_sd;
    let e_rd = &config.sigma2_e_rd;

    let mut mu_r = vec![vec![0.0; kk]; l];
    let mut gamma_bar_s = vec![vec![vec![vec![0.0; kk]; kk]; l]; l];
    let mut gamma_bar_r = vec![vec![vec![vec![0.0; kk]; kk]; l]; l];
    let mut alpha_n_d = vec![vec![0.0; kk]; l];

    for i in 0..l {
        let sum_sigma_n_d: f64 = config.sigma2_n_d[i].iter().sum();
        for k in 0..kk {
            mu_r[i][k] = rd_v[i][i][k];
            let h_rd_abs2 = abs2_vec(&channels.h_hat_rd[i][k]);

            for j in 0..l {
                let sd_jk = abs2(channels.h_hat_sd[i][j][k]);
                for m in 0..kk {
                    let mut g = 0.0;
                    if k == m {
                        g += sd_jk;
                        g += e_sd[i][j][k];
                    }
                    g += d.kappa_s[j] * sd_jk;
                    g += e_sd[i][j][k] * d.kappa_s[j];
                    g += d.beta_d[i] * (abs2(channels.h_hat_sd[i][j][m]) + e_sd[i][j][m]);
                    gamma_bar_s[i][j][k][m] = g;

                    let mut g = 0.0;
                    if k == m {
                        if i != j {
                            g += rd_v[i][j][k];
                        }
                        g += e_rd[i][k];
                    }
                    if theta_t_active {
                        g += theta_t.weighted_trace2(&h_rd_abs2, &v_abs2[j][m]);
                        g += e_rd[i][k] * theta_t.weighted_trace(&v_abs2[j][m]);
                    }
                    g += d.beta_d[i] * (rd_v[i][j][m] + e_rd[i][m]);
                    gamma_bar_r[i][j][k][m] = g;
                }
            }

            alpha_n_d[i][k] = d.beta_d[i] * sum_sigma_n_d + config.sigma2_n_d[i][k];
        }
    }

    DownlinkTerms { mu_r, gamma_bar_s, gamma_bar_r, alpha_n_d }
}

/// Canonical reduction of the uplink denominator: pairs ascending, then
/// subcarriers ascending. Rate evaluation and the covariance oracle tests
/// share this exact order.
pub fn uplink_denominator(b: &InterferenceBreakdown, config: &SystemConfig, i: usize, k: usize) -> f64 {
    let mut acc = b.alpha_n_r[i][k];
    for j in 0..config.num_pairs {
        for m in 0..config.num_subcarriers {
            acc += b.gamma_s[i][j][k][m] * config.p_s[j][m];
            acc += b.gamma_r[i][j][k][m] * config.p_r[j][m];
        }
    }
    acc
}

/// Downlink counterpart of [`uplink_denominator`].
pub fn downlink_denominator(
    b: &InterferenceBreakdown,
    config: &SystemConfig,
    i: usize,
    k: usize,
) -> f64 {
    let mut acc = b.alpha_n_d[i][k];
    for j in 0..config.num_pairs {
        for m in 0..config.num_subcarriers {
            acc += b.gamma_bar_s[i][j][k][m] * config.p_s[j][m];
            acc += b.gamma_bar_r[i][j][k][m] * config.p_r[j][m];
        }
    }
    acc
}

/// Interference-plus-noise covariance at the relay for pair `i`, subcarrier
/// `k`: an N-by-N Hermitian PSD matrix assembled block by block (co-channel,
/// source transmit distortion, SI estimation error, relay transmit
/// distortion, thermal noise, relay receive distortion).
///
/// This is the oracle path: it deliberately repeats no code with
/// [`uplink_terms`] beyond the shared linear-algebra primitives.
pub fn covariance_relay(
    i: usize,
    k: usize,
    channels: &ChannelSet,
    filters: &FilterSet,
    config: &SystemConfig,
) -> CMatrix {
    let d = derived_constants(config);
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let n = config.num_antennas;
    let theta_t = &d.kappa_r;
    let theta_r = &d.beta_r;

    let mut sigma = CMatrix::zeros(n, n);

    // Co-channel interference: beams of the other sources on this subcarrier
    // plus the estimation-error floor of all sources.
    for j in 0..l {
        if j != i {
            let h = &channels.h_hat_sr[j][k];
            sigma.add_scaled_outer(config.p_s[j][k], h, h);
        }
    }
    let mut err_floor = 0.0;
    for j in 0..l {
        err_floor += config.sigma2_e_sr[j][k] * config.p_s[j][k];
    }
    sigma.add_diag_scalar(err_floor);

    // Source transmit distortion: kappa_s-weighted images over total source
    // power on all subcarriers.
    for j in 0..l {
        let total_p: f64 = config.p_s[j].iter().sum();
        let h = &channels.h_hat_sr[j][k];
        sigma.add_scaled_outer(d.kappa_s[j] * total_p, h, h);
    }
    let mut dist_floor = 0.0;
    for j in 0..l {
        let total_p: f64 = config.p_s[j].iter().sum();
        dist_floor += config.sigma2_e_sr[j][k] * d.kappa_s[j] * total_p;
    }
    sigma.add_diag_scalar(dist_floor);

    // SI channel estimation error: residual after subtracting the estimated
    // SI contribution, white across antennas.
    let mut tr_vk = 0.0;
    for j in 0..l {
        tr_vk += config.p_r[j][k] * norm_sqr(&filters.v_r[j][k]);
    }
    sigma.add_diag_scalar(config.sigma2_e_rr[k] * tr_vk);

    // Relay transmit distortion: per-chain transmit power over all pairs and
    // subcarriers, routed through the estimated SI channel, plus its own
    // estimation-error image.
    let mut chain_power = vec![0.0; n];
    for j in 0..l {
        for m in 0..kk {
            for (cp, vl) in chain_power.iter_mut().zip(&filters.v_r[j][m]) {
                *cp += config.p_r[j][m] * abs2(*vl);
            }
        }
    }
    let theta_chain: Vec<f64> = (0..n).map(|a| theta_t.entry(a) * chain_power[a]).collect();
    sigma.add_diag_weighted_gram(&channels.h_hat_rr[k], &theta_chain);
    let tr_theta_chain: f64 = theta_chain.iter().sum();
    sigma.add_diag_scalar(config.sigma2_e_rr[k] * tr_theta_chain);

    // Thermal noise.
    sigma.add_diag_scalar(config.sigma2_n_r[k]);

    // Relay receive distortion: Theta_r,r times the diagonal of everything
    // arriving at the array, summed over all subcarriers.
    let mut arriving = vec![0.0; n];
    for m in 0..kk {
        let mut tr_vm = 0.0;
        for j in 0..l {
            tr_vm += config.p_r[j][m] * norm_sqr(&filters.v_r[j][m]);
        }
        let mut iso = 0.0; // antenna-independent part of the diagonal
        for j in 0..l {
            iso += config.sigma2_e_sr[j][m] * config.p_s[j][m];
        }
        iso += config.sigma2_e_rr[m] * tr_vm;
        iso += config.sigma2_n_r[m];
        for (ant, acc) in arriving.iter_mut().enumerate() {
            let mut diag_a = iso;
            for j in 0..l {
                diag_a += config.p_s[j][m] * abs2(channels.h_hat_sr[j][m][ant]);
            }
            *acc += diag_a;
        }
        for j in 0..l {
            let t = channels.h_hat_rr[m].mul_vec(&filters.v_r[j][m]);
            for (a, tl) in arriving.iter_mut().zip(&t) {
                *a += config.p_r[j][m] * abs2(*tl);
            }
        }
    }
    let rx_diag: Vec<f64> = (0..n).map(|a| theta_r.entry(a) * arriving[a]).collect();
    sigma.add_diag(&rx_diag);

    sigma
}

/// Interference-plus-noise power at destination `i`, subcarrier `k`: the
/// scalar counterpart of [`covariance_relay`], assembled independently of
/// [`downlink_terms`].
pub fn covariance_dest(
    i: usize,
    k: usize,
    channels: &ChannelSet,
    filters: &FilterSet,
    config: &SystemConfig,
) -> f64 {
    let d = derived_constants(config);
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let h_rd_k = &channels.h_hat_rd[i][k];

    let mut sigma = 0.0;

    // Co-channel interference from the other pairs' beams, plus the
    // rd-estimation-error image of the whole relay transmit power.
    for j in 0..l {
        if j != i {
            sigma += config.p_r[j][k] * abs2(dotu(h_rd_k, &filters.v_r[j][k]));
        }
    }
    let mut tr_vk = 0.0;
    for j in 0..l {
        tr_vk += config.p_r[j][k] * norm_sqr(&filters.v_r[j][k]);
    }
    sigma += config.sigma2_e_rd[i][k] * tr_vk;

    // Source transmit distortion over total source powers.
    for j in 0..l {
        let total_p: f64 = config.p_s[j].iter().sum();
        sigma += abs2(channels.h_hat_sd[i][j][k]) * d.kappa_s[j] * total_p;
        sigma += config.sigma2_e_sd[i][j][k] * d.kappa_s[j] * total_p;
    }

    // Thermal noise.
    sigma += config.sigma2_n_d[i][k];

    // Relay transmit distortion seen through the rd channel.
    let n = config.num_antennas;
    let mut chain_power = vec![0.0; n];
    for j in 0..l {
        for m in 0..kk {
            for (cp, vl) in chain_power.iter_mut().zip(&filters.v_r[j][m]) {
                *cp += config.p_r[j][m] * abs2(*vl);
            }
        }
    }
    let mut beam_dist = 0.0;
    let mut tr_theta_chain = 0.0;
    for (ant, cp) in chain_power.iter().enumerate() {
        let tc = d.kappa_r.entry(ant) * cp;
        beam_dist += abs2(h_rd_k[ant]) * tc;
        tr_theta_chain += tc;
    }
    sigma += beam_dist;
    sigma += config.sigma2_e_rd[i][k] * tr_theta_chain;

    // Direct channel interference on this subcarrier.
    for j in 0..l {
        sigma += (abs2(channels.h_hat_sd[i][j][k]) + config.sigma2_e_sd[i][j][k])
            * config.p_s[j][k];
    }

    // Destination receive distortion: beta_d image of everything the
    // destination hears, over all pairs and subcarriers, plus its noise.
    let mut heard = 0.0;
    for j in 0..l {
        for m in 0..kk {
            heard += config.p_r[j][m] * abs2(dotu(&channels.h_hat_rd[i][m], &filters.v_r[j][m]));
            heard += config.sigma2_e_rd[i][m] * config.p_r[j][m] * norm_sqr(&filters.v_r[j][m]);
            heard += abs2(channels.h_hat_sd[i][j][m]) * config.p_s[j][m];
            heard += config.sigma2_e_sd[i][j][m] * config.p_s[j][m];
        }
    }
    let sum_sigma_n_d: f64 = config.sigma2_n_d[i].iter().sum();
    sigma += d.beta_d[i] * heard;
    sigma += d.beta_d[i] * sum_sigma_n_d;

    sigma
}

/// Which link direction a rate or a degenerate SINR refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSide {
    SourceRelay,
    RelayDest,
}

/// Zero denominator with a positive numerator: the SINR is reported as +inf
/// and flagged here instead of raising an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateSinr {
    pub pair: usize,
    pub subcarrier: usize,
    pub side: RateSide,
}

/// Per-pair, per-subcarrier SINRs and achievable rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub sinr_sr: Vec<Vec<f64>>,
    pub sinr_rd: Vec<Vec<f64>>,
    pub rate_sr: Vec<Vec<f64>>,
    pub rate_rd: Vec<Vec<f64>>,
    /// min(rate_sr, rate_rd), the decode-and-forward bottleneck.
    pub rate_total: Vec<Vec<f64>>,
    /// Entries with infinite SINR from an exactly-zero denominator.
    pub degenerate: Vec<DegenerateSinr>,
}

/// SINRs and rates from an interference breakdown:
/// SINR = mu p / (alpha + sum_{j,m} (gamma_s p_s + gamma_r p_r)),
/// rate = gamma0 log2(1 + SINR), total = min of the two directions.
pub fn rates(b: &InterferenceBreakdown, config: &SystemConfig) -> RateReport {
    let l = config.num_pairs;
    let kk = config.num_subcarriers;
    let mut report = RateReport {
        sinr_sr: vec![vec![0.0; kk]; l],
        sinr_rd: vec![vec![0.0; kk]; l],
        rate_sr: vec![vec![0.0; kk]; l],
        rate_rd: vec![vec![0.0; kk]; l],
        rate_total: vec![vec![0.0; kk]; l],
        degenerate: Vec::new(),
    };

    for i in 0..l {
        for k in 0..kk {
            let num = b.mu_s[i][k] * config.p_s[i][k];
            let den = uplink_denominator(b, config, i, k);
            let sinr = if den == 0.0 {
                if num > 0.0 {
                    report.degenerate.push(DegenerateSinr {
                        pair: i,
                        subcarrier: k,
                        side: RateSide::SourceRelay,
                    });
                    f64::INFINITY
                } else {
                    0.0
                }
            } else {
                num / den
            };
            report.sinr_sr[i][k] = sinr;
            report.rate_sr[i][k] = config.gamma0 * Float::log2(1.0 + sinr);

            let num = b.mu_r[i][k] * config.p_r[i][k];
            let den = downlink_denominator(b, config, i, k);
            let sinr = if den == 0.0 {
                if num > 0.0 {
                    report.degenerate.push(DegenerateSinr {
                        pair: i,
                        subcarrier: k,
                        side: RateSide::RelayDest,
                    });
                    f64::INFINITY
                } else {
                    0.0
                }
            } else {
                num / den
            };
            report.sinr_rd[i][k] = sinr;
            report.rate_rd[i][k] = config.gamma0 * Float::log2(1.0 + sinr);

            report.rate_total[i][k] = report.rate_sr[i][k].min(report.rate_rd[i][k]);
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::build_mrc_mrt;
    use crate::channel::{sample_channels, ErrorVariances};
    use crate::config::RelayDistortion;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn base_config(l: usize, k: usize, n: usize) -> SystemConfig {
        SystemConfig {
            num_pairs: l,
            num_subcarriers: k,
            num_antennas: n,
            p_s: vec![vec![1.0; k]; l],
            p_r: vec![vec![1.0; k]; l],
            kappa_s_tilde: vec![0.0; l],
            beta_d_tilde: vec![0.0; l],
            kappa_r_tilde: RelayDistortion::Scalar(0.0),
            beta_r_tilde: RelayDistortion::Scalar(0.0),
            sigma2_n_r: vec![1.0; k],
            sigma2_n_d: vec![vec![1.0; k]; l],
            psi_hat_sr: vec![vec![1.0; k]; l],
            psi_hat_rd: vec![vec![1.0; k]; l],
            psi_hat_sd: vec![vec![vec![0.0; k]; l]; l],
            psi_hat_rr: vec![1.0; k],
            sigma2_e_sr: vec![vec![0.0; k]; l],
            sigma2_e_rd: vec![vec![0.0; k]; l],
            sigma2_e_sd: vec![vec![vec![0.0; k]; l]; l],
            sigma2_e_rr: vec![0.0; k],
            gamma0: 1.0,
        }
    }

    /// Config with every impairment switched on, for oracle tests.
    fn impaired_config(l: usize, k: usize, n: usize) -> SystemConfig {
        let mut c = base_config(l, k, n);
        c.kappa_s_tilde = vec![0.03; l];
        c.beta_d_tilde = vec![0.04; l];
        c.kappa_r_tilde = RelayDistortion::Scalar(0.05);
        c.beta_r_tilde = RelayDistortion::Scalar(0.06);
        c.psi_hat_sd = vec![vec![vec![0.1; k]; l]; l];
        c.sigma2_e_sr = vec![vec![0.1; k]; l];
        c.sigma2_e_rd = vec![vec![0.12; k]; l];
        c.sigma2_e_sd = vec![vec![vec![0.01; k]; l]; l];
        c.sigma2_e_rr = vec![0.15; k];
        for i in 0..l {
            for kc in 0..k {
                c.p_s[i][kc] = 0.5 + (i + kc) as f64 * 0.25;
                c.p_r[i][kc] = 0.75 + (i * kc) as f64 * 0.125;
            }
        }
        c
    }

    #[test]
    fn all_off_single_pair_has_pure_noise_denominator() {
        let cfg = base_config(1, 1, 8);
        let ch = sample_channels(&cfg, 1, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let up = uplink_terms(&ch, &f, &cfg);
        assert_eq!(up.gamma_s[0][0][0][0], 0.0);
        assert_eq!(up.gamma_r[0][0][0][0], 0.0);
        assert!((up.alpha_n_r[0][0] - 1.0).abs() < 1e-12);

        let down = downlink_terms(&ch, &f, &cfg);
        assert_eq!(down.gamma_bar_s[0][0][0][0], 0.0);
        assert_eq!(down.gamma_bar_r[0][0][0][0], 0.0);
        assert_eq!(down.alpha_n_d[0][0], 1.0);
    }

    #[test]
    fn co_channel_term_is_projection_onto_interferer() {
        // u = [1, 0] comes from h_sr[0] = [2, 0]; interferer h_sr[1] = [a, b].
        let (a, b) = (c(0.3, -0.7), c(1.1, 0.2));
        let cfg = base_config(2, 1, 2);
        let ch = ChannelSet {
            num_pairs: 2,
            num_subcarriers: 1,
            num_antennas: 2,
            h_hat_sr: vec![vec![vec![c(2.0, 0.0), c(0.0, 0.0)]], vec![vec![a, b]]],
            h_hat_rd: vec![
                vec![vec![c(1.0, 0.0), c(0.0, 0.0)]],
                vec![vec![c(0.0, 1.0), c(1.0, 0.0)]],
            ],
            h_hat_sd: vec![vec![vec![c(0.0, 0.0)]; 2]; 2],
            h_hat_rr: vec![CMatrix::zeros(2, 2)],
            error_variances: ErrorVariances {
                sr: vec![vec![0.0]; 2],
                rd: vec![vec![0.0]; 2],
                sd: vec![vec![vec![0.0]]; 2],
                rr: vec![0.0],
            },
        };
        let f = build_mrc_mrt(&ch).unwrap();
        assert_eq!(f.u_r[0][0], vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let up = uplink_terms(&ch, &f, &cfg);
        assert!((up.gamma_s[0][1][0][0] - abs2(a)).abs() < 1e-15);
        assert_eq!(up.gamma_s[0][0][0][0], 0.0);
    }

    #[test]
    fn downlink_co_channel_is_beam_gain_toward_other_destination() {
        let cfg = base_config(2, 1, 4);
        let ch = sample_channels(&cfg, 5, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let down = downlink_terms(&ch, &f, &cfg);
        let expect = abs2(dotu(&ch.h_hat_rd[0][0], &f.v_r[1][0]));
        assert!((down.gamma_bar_r[0][1][0][0] - expect).abs() < 1e-15);
    }

    #[test]
    fn relay_covariance_reduces_to_thermal_noise() {
        let mut cfg = base_config(1, 1, 4);
        cfg.sigma2_n_r = vec![2.0];
        let ch = sample_channels(&cfg, 2, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let sigma = covariance_relay(0, 0, &ch, &f, &cfg);
        for r in 0..4 {
            for cc in 0..4 {
                let want = if r == cc { 2.0 } else { 0.0 };
                assert_eq!(sigma.get(r, cc), c(want, 0.0));
            }
        }
    }

    #[test]
    fn relay_covariance_noise_and_its_receive_distortion_image() {
        let mut cfg = base_config(1, 1, 4);
        cfg.p_s = vec![vec![0.0]];
        cfg.p_r = vec![vec![0.0]];
        cfg.beta_r_tilde = RelayDistortion::Scalar(0.05);
        let ch = sample_channels(&cfg, 3, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let sigma = covariance_relay(0, 0, &ch, &f, &cfg);
        let want = 1.0 + 0.05 * 1.0;
        for r in 0..4 {
            assert_eq!(sigma.get(r, r), c(want, 0.0));
            for cc in 0..4 {
                if cc != r {
                    assert_eq!(sigma.get(r, cc), c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn dest_covariance_reduces_to_thermal_noise() {
        let mut cfg = base_config(1, 1, 4);
        cfg.p_s = vec![vec![0.0]];
        cfg.p_r = vec![vec![0.0]];
        cfg.sigma2_n_d = vec![vec![1.75]];
        let ch = sample_channels(&cfg, 4, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        assert_eq!(covariance_dest(0, 0, &ch, &f, &cfg), 1.75);
    }

    #[test]
    fn dest_covariance_direct_channel_only() {
        let mut cfg = base_config(1, 1, 4);
        cfg.p_r = vec![vec![0.0]];
        cfg.p_s = vec![vec![1.5]];
        cfg.psi_hat_sd = vec![vec![vec![0.2]]];
        let ch = sample_channels(&cfg, 7, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let want = abs2(ch.h_hat_sd[0][0][0]) * 1.5 + 1.0;
        assert_eq!(covariance_dest(0, 0, &ch, &f, &cfg), want);
    }

    #[test]
    fn oracle_identity_on_a_random_impaired_instance() {
        let cfg = impaired_config(2, 2, 8);
        let ch = sample_channels(&cfg, 11, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let b = InterferenceBreakdown::compute(&ch, &f, &cfg);
        for i in 0..2 {
            for k in 0..2 {
                let sigma = covariance_relay(i, k, &ch, &f, &cfg);
                let q = sigma.quadratic_form(&f.u_r[i][k]).re;
                let den = uplink_denominator(&b, &cfg, i, k);
                assert!(
                    ((q - den) / den).abs() < 1e-9,
                    "uplink ({i},{k}): quadratic form {q} vs decomposition {den}"
                );

                let sd = covariance_dest(i, k, &ch, &f, &cfg);
                let dden = downlink_denominator(&b, &cfg, i, k);
                assert!(
                    ((sd - dden) / dden).abs() < 1e-9,
                    "downlink ({i},{k}): covariance {sd} vs decomposition {dden}"
                );
            }
        }
    }

    #[test]
    fn doubling_relay_transmit_distortion_never_raises_sinr() {
        let cfg = impaired_config(2, 2, 16);
        let ch = sample_channels(&cfg, 13, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let base = rates(&InterferenceBreakdown::compute(&ch, &f, &cfg), &cfg);
        let mut worse_cfg = cfg.clone();
        worse_cfg.kappa_r_tilde = RelayDistortion::Scalar(0.10);
        let worse = rates(&InterferenceBreakdown::compute(&ch, &f, &worse_cfg), &worse_cfg);
        for i in 0..2 {
            for k in 0..2 {
                assert!(worse.sinr_sr[i][k] <= base.sinr_sr[i][k]);
                assert!(worse.sinr_rd[i][k] <= base.sinr_rd[i][k]);
            }
        }
    }

    #[test]
    fn rates_from_hand_built_breakdown() {
        let cfg = {
            let mut c = base_config(1, 1, 2);
            c.gamma0 = 0.9;
            c
        };
        let one = vec![vec![1.0]];
        let zero4 = vec![vec![vec![vec![0.0]]]];
        let b = InterferenceBreakdown {
            mu_s: one.clone(),
            mu_r: one.clone(),
            gamma_s: zero4.clone(),
            gamma_r: zero4.clone(),
            gamma_bar_s: zero4.clone(),
            gamma_bar_r: zero4.clone(),
            alpha_n_r: one.clone(),
            alpha_n_d: one.clone(),
        };
        let r = rates(&b, &cfg);
        // SINR = 1 exactly, so rate = gamma0 * log2(2) = 0.9.
        assert_eq!(r.sinr_sr[0][0], 1.0);
        assert_eq!(r.rate_sr[0][0], 0.9);
        assert_eq!(r.rate_total[0][0], 0.9);
        assert!(r.degenerate.is_empty());
    }

    #[test]
    fn zero_signal_gives_zero_rate() {
        let mut cfg = base_config(1, 1, 4);
        cfg.p_s = vec![vec![0.0]];
        let ch = sample_channels(&cfg, 17, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let r = rates(&InterferenceBreakdown::compute(&ch, &f, &cfg), &cfg);
        assert_eq!(r.rate_sr[0][0], 0.0);
        assert_eq!(r.rate_total[0][0], 0.0);
    }

    #[test]
    fn zero_denominator_with_signal_is_flagged_as_infinite() {
        let cfg = {
            let mut c = base_config(1, 1, 2);
            c.sigma2_n_r = vec![0.0];
            c.sigma2_n_d = vec![vec![0.0]];
            c
        };
        let one = vec![vec![1.0]];
        let zero2 = vec![vec![0.0]];
        let zero4 = vec![vec![vec![vec![0.0]]]];
        let b = InterferenceBreakdown {
            mu_s: one.clone(),
            mu_r: zero2.clone(),
            gamma_s: zero4.clone(),
            gamma_r: zero4.clone(),
            gamma_bar_s: zero4.clone(),
            gamma_bar_r: zero4.clone(),
            alpha_n_r: zero2.clone(),
            alpha_n_d: zero2.clone(),
        };
        let r = rates(&b, &cfg);
        assert!(r.sinr_sr[0][0].is_infinite());
        assert_eq!(
            r.degenerate,
            vec![DegenerateSinr { pair: 0, subcarrier: 0, side: RateSide::SourceRelay }]
        );
        // Zero numerator over zero denominator reads as zero SINR, unflagged.
        assert_eq!(r.sinr_rd[0][0], 0.0);
        assert_eq!(r.rate_total[0][0], 0.0);
    }

    #[test]
    fn no_impairment_sinr_matches_matched_filter_bound() {
        let mut cfg = base_config(1, 1, 32);
        cfg.p_s = vec![vec![1.8]];
        cfg.sigma2_n_r = vec![0.7];
        let ch = sample_channels(&cfg, 19, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let r = rates(&InterferenceBreakdown::compute(&ch, &f, &cfg), &cfg);
        let want = norm_sqr(&ch.h_hat_sr[0][0]) * 1.8 / 0.7;
        let got = r.sinr_sr[0][0];
        assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn single_subcarrier_denominator_collapses_to_flat_sum() {
        let cfg = impaired_config(3, 1, 8);
        let ch = sample_channels(&cfg, 23, 0);
        let f = build_mrc_mrt(&ch).unwrap();
        let b = InterferenceBreakdown::compute(&ch, &f, &cfg);
        for i in 0..3 {
            let mut den = b.alpha_n_r[i][0];
            for j in 0..3 {
                den += b.gamma_s[i][j][0][0] * cfg.p_s[j][0];
                den += b.gamma_r[i][j][0][0] * cfg.p_r[j][0];
            }
            assert_eq!(den, uplink_denominator(&b, &cfg, i, 0));
        }
    }
}
