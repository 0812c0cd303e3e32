//! Maximum-ratio receive filters and transmit precoders.
//!
//! u_r[i][k] matches the estimated source-relay channel; v_r[i][k] is the
//! conjugate transpose of the estimated relay-destination row channel. Both
//! are normalized to unit Euclidean norm.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelSet;
use crate::linalg::{norm, C64};

/// Norm threshold below which a channel counts as zero. Only exact-zero
/// inputs (psi_hat = 0 for an active pair) can realistically trip it.
pub const NORM_FLOOR: f64 = 1e-300;

/// Which link a filter or error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelLink {
    SourceRelay,
    RelayDest,
}

impl core::fmt::Display for ChannelLink {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChannelLink::SourceRelay => write!(f, "source-relay"),
            ChannelLink::RelayDest => write!(f, "relay-destination"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BeamformError {
    #[error("zero {link} channel for pair {pair}, subcarrier {subcarrier}")]
    ZeroChannel {
        pair: usize,
        subcarrier: usize,
        link: ChannelLink,
    },
}

/// Unit-norm receive filters and transmit precoders, indexed `[i][k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSet {
    pub u_r: Vec<Vec<Vec<C64>>>,
    pub v_r: Vec<Vec<Vec<C64>>>,
}

/// Builds u_r[i][k] = h_hat_sr[i][k] / ||h_hat_sr[i][k]|| and
/// v_r[i][k] = h_hat_rd[i][k]^H / ||h_hat_rd[i][k]||.
pub fn build_mrc_mrt(channels: &ChannelSet) -> Result<FilterSet, BeamformError> {
    let mut u_r = Vec::with_capacity(channels.num_pairs);
    let mut v_r = Vec::with_capacity(channels.num_pairs);
    for i in 0..channels.num_pairs {
        let mut u_i = Vec::with_capacity(channels.num_subcarriers);
        let mut v_i = Vec::with_capacity(channels.num_subcarriers);
        for k in 0..channels.num_subcarriers {
            let h_sr = &channels.h_hat_sr[i][k];
            let nrm = norm(h_sr);
            if nrm < NORM_FLOOR {
                return Err(BeamformError::ZeroChannel {
                    pair: i,
                    subcarrier: k,
                    link: ChannelLink::SourceRelay,
                });
            }
            u_i.push(h_sr.iter().map(|z| z / nrm).collect());

            let h_rd = &channels.h_hat_rd[i][k];
            let nrm = norm(h_rd);
            if nrm < NORM_FLOOR {
                return Err(BeamformError::ZeroChannel {
                    pair: i,
                    subcarrier: k,
                    link: ChannelLink::RelayDest,
                });
            }
            v_i.push(h_rd.iter().map(|z| z.conj() / nrm).collect());
        }
        u_r.push(u_i);
        v_r.push(v_i);
    }
    Ok(FilterSet { u_r, v_r })
}
