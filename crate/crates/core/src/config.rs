//! System parameters: dimensions, powers, distortion coefficients, noise and
//! fading statistics, plus validation and the derived per-subcarrier
//! constants.
//!
//! Configs load from a JSON object keyed by the struct field names. Array
//! fields broadcast: a bare number expands to a constant array of the
//! required shape, so flat scenarios stay one-liners.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Relay transmit/receive distortion coefficient: one scalar shared by all
/// chains (the usual model), or one entry per antenna chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelayDistortion {
    Scalar(f64),
    PerChain(Vec<f64>),
}

impl RelayDistortion {
    pub fn is_scalar(&self) -> bool {
        matches!(self, RelayDistortion::Scalar(_))
    }

    /// True when every chain coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        match self {
            RelayDistortion::Scalar(c) => *c == 0.0,
            RelayDistortion::PerChain(v) => v.iter().all(|c| *c == 0.0),
        }
    }

    /// Applies `f` to every chain coefficient, preserving the representation.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> RelayDistortion {
        match self {
            RelayDistortion::Scalar(c) => RelayDistortion::Scalar(f(*c)),
            RelayDistortion::PerChain(v) => {
                RelayDistortion::PerChain(v.iter().map(|c| f(*c)).collect())
            }
        }
    }

    /// Diagonal entry for chain `l`.
    #[inline]
    pub fn entry(&self, l: usize) -> f64 {
        match self {
            RelayDistortion::Scalar(c) => *c,
            RelayDistortion::PerChain(v) => v[l],
        }
    }

    /// sum_l theta_l a_l.
    pub fn weighted_trace(&self, a: &[f64]) -> f64 {
        match self {
            RelayDistortion::Scalar(c) => {
                let mut s = 0.0;
                for x in a {
                    s += x;
                }
                c * s
            }
            RelayDistortion::PerChain(v) => {
                let mut s = 0.0;
                for (t, x) in v.iter().zip(a) {
                    s += t * x;
                }
                s
            }
        }
    }

    /// sum_l theta_l a_l b_l.
    pub fn weighted_trace2(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            RelayDistortion::Scalar(c) => {
                let mut s = 0.0;
                for (x, y) in a.iter().zip(b) {
                    s += x * y;
                }
                c * s
            }
            RelayDistortion::PerChain(v) => {
                let mut s = 0.0;
                for ((t, x), y) in v.iter().zip(a).zip(b) {
                    s += t * x * y;
                }
                s
            }
        }
    }
}

/// Full parameter set of the relay network. Indices are `[pair]`,
/// `[pair][subcarrier]`, `[k]` (subcarrier only), or
/// `[dest pair][source pair][subcarrier]` for the direct sd links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSystemConfig")]
pub struct SystemConfig {
    /// Number of source-destination pairs L.
    pub num_pairs: usize,
    /// Number of subcarriers K.
    pub num_subcarriers: usize,
    /// Number of relay antennas N.
    pub num_antennas: usize,
    /// Source transmit power, watts, `[i][k]`.
    pub p_s: Vec<Vec<f64>>,
    /// Relay transmit power, watts, `[i][k]`.
    pub p_r: Vec<Vec<f64>>,
    /// Source transmit distortion coefficient, `[i]`, in [0,1).
    pub kappa_s_tilde: Vec<f64>,
    /// Destination receive distortion coefficient, `[i]`, in [0,1).
    pub beta_d_tilde: Vec<f64>,
    /// Relay transmit distortion coefficient, in [0,1).
    pub kappa_r_tilde: RelayDistortion,
    /// Relay receive distortion coefficient, in [0,1).
    pub beta_r_tilde: RelayDistortion,
    /// Relay noise variance, watts, `[k]`.
    pub sigma2_n_r: Vec<f64>,
    /// Destination noise variance, watts, `[i][k]`.
    pub sigma2_n_d: Vec<Vec<f64>>,
    /// Estimated-channel variance, source to relay, `[i][k]`.
    pub psi_hat_sr: Vec<Vec<f64>>,
    /// Estimated-channel variance, relay to destination, `[i][k]`.
    pub psi_hat_rd: Vec<Vec<f64>>,
    /// Estimated-channel variance, direct source to destination, `[i][j][k]`.
    pub psi_hat_sd: Vec<Vec<Vec<f64>>>,
    /// Estimated-channel variance, relay self-interference, `[k]`.
    pub psi_hat_rr: Vec<f64>,
    /// Estimation-error variance, source to relay, `[i][k]`.
    pub sigma2_e_sr: Vec<Vec<f64>>,
    /// Estimation-error variance, relay to destination, `[i][k]`.
    pub sigma2_e_rd: Vec<Vec<f64>>,
    /// Estimation-error variance, direct link, `[i][j][k]`.
    pub sigma2_e_sd: Vec<Vec<Vec<f64>>>,
    /// Estimation-error variance, self-interference, `[k]`.
    pub sigma2_e_rr: Vec<f64>,
    /// Fraction of the coherence interval used for data, in (0,1].
    pub gamma0: f64,
}

impl SystemConfig {
    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Canonical serialization: compact JSON, fields in declaration order.
    /// Stable input for config digests; parses back bit-exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization cannot fail")
    }
}

/// Mirror of [`SystemConfig`] where array fields also accept bare numbers;
/// conversion broadcasts them to the full shape. Mis-shaped arrays survive
/// conversion untouched so `validate` can report them precisely.
#[derive(Deserialize)]
struct RawSystemConfig {
    num_pairs: usize,
    num_subcarriers: usize,
    num_antennas: usize,
    p_s: Broadcast2,
    p_r: Broadcast2,
    kappa_s_tilde: Broadcast1,
    beta_d_tilde: Broadcast1,
    kappa_r_tilde: RelayDistortion,
    beta_r_tilde: RelayDistortion,
    sigma2_n_r: Broadcast1,
    sigma2_n_d: Broadcast2,
    psi_hat_sr: Broadcast2,
    psi_hat_rd: Broadcast2,
    psi_hat_sd: Broadcast3,
    psi_hat_rr: Broadcast1,
    sigma2_e_sr: Broadcast2,
    sigma2_e_rd: Broadcast2,
    sigma2_e_sd: Broadcast3,
    sigma2_e_rr: Broadcast1,
    gamma0: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Broadcast1 {
    Scalar(f64),
    Array(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Broadcast2 {
    Scalar(f64),
    Array(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Broadcast3 {
    Scalar(f64),
    Array(Vec<Vec<Vec<f64>>>),
}

impl Broadcast1 {
    fn expand(self, n: usize) -> Vec<f64> {
        match self {
            Broadcast1::Scalar(x) => vec![x; n],
            Broadcast1::Array(v) => v,
        }
    }
}

impl Broadcast2 {
    fn expand(self, d0: usize, d1: usize) -> Vec<Vec<f64>> {
        match self {
            Broadcast2::Scalar(x) => vec![vec![x; d1]; d0],
            Broadcast2::Array(v) => v,
        }
    }
}

impl Broadcast3 {
    fn expand(self, d0: usize, d1: usize, d2: usize) -> Vec<Vec<Vec<f64>>> {
        match self {
            Broadcast3::Scalar(x) => vec![vec![vec![x; d2]; d1]; d0],
            Broadcast3::Array(v) => v,
        }
    }
}

impl From<RawSystemConfig> for SystemConfig {
    fn from(raw: RawSystemConfig) -> Self {
        let l = raw.num_pairs;
        let k = raw.num_subcarriers;
        SystemConfig {
            num_pairs: raw.num_pairs,
            num_subcarriers: raw.num_subcarriers,
            num_antennas: raw.num_antennas,
            p_s: raw.p_s.expand(l, k),
            p_r: raw.p_r.expand(l, k),
            kappa_s_tilde: raw.kappa_s_tilde.expand(l),
            beta_d_tilde: raw.beta_d_tilde.expand(l),
            kappa_r_tilde: raw.kappa_r_tilde,
            beta_r_tilde: raw.beta_r_tilde,
            sigma2_n_r: raw.sigma2_n_r.expand(k),
            sigma2_n_d: raw.sigma2_n_d.expand(l, k),
            psi_hat_sr: raw.psi_hat_sr.expand(l, k),
            psi_hat_rd: raw.psi_hat_rd.expand(l, k),
            psi_hat_sd: raw.psi_hat_sd.expand(l, l, k),
            psi_hat_rr: raw.psi_hat_rr.expand(k),
            sigma2_e_sr: raw.sigma2_e_sr.expand(l, k),
            sigma2_e_rd: raw.sigma2_e_rd.expand(l, k),
            sigma2_e_sd: raw.sigma2_e_sd.expand(l, l, k),
            sigma2_e_rr: raw.sigma2_e_rr.expand(k),
            gamma0: raw.gamma0,
        }
    }
}

/// One violated invariant: the offending field, its index (empty for whole
/// fields), and what failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub index: String,
    pub message: String,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}{} {}", self.field, self.index, self.message)
    }
}

/// Outcome of config validation. Violations are data, not errors.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl core::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.passed() {
            return write!(f, "config valid");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

enum ValueRule {
    NonNegative,
    Coefficient,
}

impl ValueRule {
    fn check(&self, x: f64) -> Option<&'static str> {
        match self {
            ValueRule::NonNegative => {
                if !x.is_finite() || x < 0.0 {
                    Some("must be finite and non-negative")
                } else {
                    None
                }
            }
            ValueRule::Coefficient => {
                if !(x >= 0.0 && x < 1.0) {
                    Some("outside [0,1)")
                } else {
                    None
                }
            }
        }
    }
}

fn shape_message(expected: &str, found: usize) -> String {
    format!("shape mismatch: expected {expected}, found length {found}")
}

fn check_1d(
    field: &'static str,
    arr: &[f64],
    len: usize,
    rule: ValueRule,
    out: &mut Vec<Violation>,
) {
    if arr.len() != len {
        out.push(Violation {
            field,
            index: String::new(),
            message: shape_message(&format!("({len})"), arr.len()),
        });
        return;
    }
    for (i, x) in arr.iter().enumerate() {
        if let Some(msg) = rule.check(*x) {
            out.push(Violation {
                field,
                index: format!("[{i}]"),
                message: String::from(msg),
            });
        }
    }
}

fn check_2d(
    field: &'static str,
    arr: &[Vec<f64>],
    d0: usize,
    d1: usize,
    rule: ValueRule,
    out: &mut Vec<Violation>,
) {
    if arr.len() != d0 || arr.iter().any(|row| row.len() != d1) {
        let found = if arr.len() != d0 {
            arr.len()
        } else {
            arr.iter().map(|r| r.len()).find(|l| *l != d1).unwrap_or(d1)
        };
        out.push(Violation {
            field,
            index: String::new(),
            message: shape_message(&format!("({d0}, {d1})"), found),
        });
        return;
    }
    for (i, row) in arr.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if let Some(msg) = rule.check(*x) {
                out.push(Violation {
                    field,
                    index: format!("[{i}][{k}]"),
                    message: String::from(msg),
                });
            }
        }
    }
}

fn check_3d(
    field: &'static str,
    arr: &[Vec<Vec<f64>>],
    d0: usize,
    d1: usize,
    d2: usize,
    rule: ValueRule,
    out: &mut Vec<Violation>,
) {
    let shape_ok = arr.len() == d0
        && arr
            .iter()
            .all(|a| a.len() == d1 && a.iter().all(|b| b.len() == d2));
    if !shape_ok {
        out.push(Violation {
            field,
            index: String::new(),
            message: format!("shape mismatch: expected ({d0}, {d1}, {d2})"),
        });
        return;
    }
    for (i, a) in arr.iter().enumerate() {
        for (j, b) in a.iter().enumerate() {
            for (k, x) in b.iter().enumerate() {
                if let Some(msg) = rule.check(*x) {
                    out.push(Violation {
                        field,
                        index: format!("[{i}][{j}][{k}]"),
                        message: String::from(msg),
                    });
                }
            }
        }
    }
}

fn check_relay_distortion(
    field: &'static str,
    rd: &RelayDistortion,
    n: usize,
    out: &mut Vec<Violation>,
) {
    match rd {
        RelayDistortion::Scalar(c) => {
            if let Some(msg) = ValueRule::Coefficient.check(*c) {
                out.push(Violation {
                    field,
                    index: String::new(),
                    message: String::from(msg),
                });
            }
        }
        RelayDistortion::PerChain(v) => check_1d(field, v, n, ValueRule::Coefficient, out),
    }
}

/// Checks every declared invariant: positive dimensions, exact array shapes,
/// finite non-negative powers and variances, coefficients in [0,1), gamma0 in
/// (0,1]. Returns all violations found rather than stopping at the first.
pub fn validate(config: &SystemConfig) -> ValidationReport {
    let mut out = Vec::new();
    let l = config.num_pairs;
    let k = config.num_subcarriers;
    let n = config.num_antennas;

    for (field, value) in [
        ("num_pairs", l),
        ("num_subcarriers", k),
        ("num_antennas", n),
    ] {
        if value == 0 {
            out.push(Violation {
                field,
                index: String::new(),
                message: String::from("must be a positive integer"),
            });
        }
    }

    check_2d("p_s", &config.p_s, l, k, ValueRule::NonNegative, &mut out);
    check_2d("p_r", &config.p_r, l, k, ValueRule::NonNegative, &mut out);
    check_1d(
        "kappa_s_tilde",
        &config.kappa_s_tilde,
        l,
        ValueRule::Coefficient,
        &mut out,
    );
    check_1d(
        "beta_d_tilde",
        &config.beta_d_tilde,
        l,
        ValueRule::Coefficient,
        &mut out,
    );
    check_relay_distortion("kappa_r_tilde", &config.kappa_r_tilde, n, &mut out);
    check_relay_distortion("beta_r_tilde", &config.beta_r_tilde, n, &mut out);
    check_1d(
        "sigma2_n_r",
        &config.sigma2_n_r,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_2d(
        "sigma2_n_d",
        &config.sigma2_n_d,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_2d(
        "psi_hat_sr",
        &config.psi_hat_sr,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_2d(
        "psi_hat_rd",
        &config.psi_hat_rd,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_3d(
        "psi_hat_sd",
        &config.psi_hat_sd,
        l,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_1d(
        "psi_hat_rr",
        &config.psi_hat_rr,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_2d(
        "sigma2_e_sr",
        &config.sigma2_e_sr,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_2d(
        "sigma2_e_rd",
        &config.sigma2_e_rd,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_3d(
        "sigma2_e_sd",
        &config.sigma2_e_sd,
        l,
        l,
        k,
        ValueRule::NonNegative,
        &mut out,
    );
    check_1d(
        "sigma2_e_rr",
        &config.sigma2_e_rr,
        k,
        ValueRule::NonNegative,
        &mut out,
    );

    if !(config.gamma0 > 0.0 && config.gamma0 <= 1.0) {
        out.push(Violation {
            field: "gamma0",
            index: String::new(),
            message: String::from("outside (0,1]"),
        });
    }

    ValidationReport { violations: out }
}

/// Per-subcarrier distortion coefficients and true-channel variances.
/// The tilde coefficients divide by K; true variances are psi_hat + sigma_e^2
/// per link (the error decomposition is orthogonal, so variances add).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedConstants {
    /// kappa_s[i] = kappa_s_tilde[i] / K.
    pub kappa_s: Vec<f64>,
    /// beta_d[i] = beta_d_tilde[i] / K.
    pub beta_d: Vec<f64>,
    /// Diagonal of Theta_t,r: kappa_r_tilde / K.
    pub kappa_r: RelayDistortion,
    /// Diagonal of Theta_r,r: beta_r_tilde / K.
    pub beta_r: RelayDistortion,
    pub psi_sr: Vec<Vec<f64>>,
    pub psi_rd: Vec<Vec<f64>>,
    pub psi_sd: Vec<Vec<Vec<f64>>>,
    pub psi_rr: Vec<f64>,
}

fn add_2d(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

/// Computes the derived constants. Expects a config that passed [`validate`].
pub fn derived_constants(config: &SystemConfig) -> DerivedConstants {
    let kf = config.num_subcarriers as f64;
    DerivedConstants {
        kappa_s: config.kappa_s_tilde.iter().map(|x| x / kf).collect(),
        beta_d: config.beta_d_tilde.iter().map(|x| x / kf).collect(),
        kappa_r: config.kappa_r_tilde.map(|x| x / kf),
        beta_r: config.beta_r_tilde.map(|x| x / kf),
        psi_sr: add_2d(&config.psi_hat_sr, &config.sigma2_e_sr),
        psi_rd: add_2d(&config.psi_hat_rd, &config.sigma2_e_rd),
        psi_sd: config
            .psi_hat_sd
            .iter()
            .zip(&config.sigma2_e_sd)
            .map(|(a, b)| add_2d(a, b))
            .collect(),
        psi_rr: config
            .psi_hat_rr
            .iter()
            .zip(&config.sigma2_e_rr)
            .map(|(x, y)| x + y)
            .collect(),
    }
}
