//! Monte Carlo harness around the rate library: seeded trials, antenna-count
//! sweeps with deterministic aggregation, and file output.

pub mod experiment;
pub mod output;
