//! Rate analysis for a multi-carrier full-duplex decode-and-forward relay
//! with a large receive/transmit antenna array, serving several half-duplex
//! source-destination pairs under limited-dynamic-range hardware and
//! imperfect channel knowledge.
//!
//! The crate covers the full pipeline:
//!
//! - [`config`]: system dimensions, powers, distortion coefficients, channel
//!   statistics; JSON loading with scalar broadcast and validation.
//! - [`channel`]: reproducible sampling of channel estimates and true
//!   channels from counter-based random streams.
//! - [`beamform`]: maximum-ratio receive filters and transmit precoders.
//! - [`finite_rate`]: exact finite-antenna SINR and rate evaluation, both as
//!   a per-pair interference decomposition and as full interference-plus-noise
//!   covariance assemblies.
//! - [`asymptotic`]: closed-form large-array rate limits and statistical
//!   checks of the concentration results they rest on.
//!
//! `no_std` with `alloc`; all floating-point math is `f64`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotic;
pub mod beamform;
pub mod channel;
pub mod config;
pub mod finite_rate;
pub mod linalg;
pub mod rng;

pub use config::{derived_constants, validate, DerivedConstants, SystemConfig, ValidationReport};
