//! Sweep result serialization: JSON for round-tripping, CSV for plotting.

use serde::Serialize;

use crate::experiment::SweepResult;

/// Pretty-printed JSON with a trailing newline. Floats keep enough digits
/// that [`sweep_from_json`] recovers the result bit for bit.
pub fn sweep_to_json(result: &SweepResult) -> String {
    let mut text = serde_json::to_string_pretty(result).expect("sweep results always serialize");
    text.push('\n');
    text
}

pub fn sweep_from_json(text: &str) -> Result<SweepResult, serde_json::Error> {
    serde_json::from_str(text)
}

#[derive(Serialize)]
struct SweepCsvRow {
    pair: usize,
    subcarrier: usize,
    n: usize,
    mean_rate: f64,
    std_rate: f64,
    asymptotic_rate: f64,
    gap: f64,
}

/// One row per (pair, subcarrier, N), grouped by (pair, subcarrier) with N
/// ascending inside each group.
pub fn sweep_to_csv(result: &SweepResult) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for (i, per_k) in result.mean_rate.iter().enumerate() {
        for (k, per_n) in per_k.iter().enumerate() {
            for (idx, &mean) in per_n.iter().enumerate() {
                writer.serialize(SweepCsvRow {
                    pair: i,
                    subcarrier: k,
                    n: result.n_values[idx],
                    mean_rate: mean,
                    std_rate: result.std_rate[i][k][idx],
                    asymptotic_rate: result.asymptotic_rate[i][k],
                    gap: result.gap[i][k][idx],
                })?;
            }
        }
    }
    let bytes = writer.into_inner().expect("vec writer never fails to flush");
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}
