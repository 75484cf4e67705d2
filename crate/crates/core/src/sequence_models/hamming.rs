use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::poi::PoIHistogram;

/// How two histograms are compared when forming a delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HammingMode {
    /// Binarize by occupancy (count > 0) and count differing bits.
    #[default]
    Occupancy,
    /// Count bins whose counts differ.
    UnequalBins,
}

impl std::str::FromStr for HammingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "occupancy" => Ok(HammingMode::Occupancy),
            "unequal-bins" => Ok(HammingMode::UnequalBins),
            other => Err(format!("unknown hamming mode `{other}` (occupancy | unequal-bins)")),
        }
    }
}

impl std::fmt::Display for HammingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HammingMode::Occupancy => "occupancy",
            HammingMode::UnequalBins => "unequal-bins",
        })
    }
}

pub fn hamming_delta(h_t: &PoIHistogram, h_prev: &PoIHistogram, mode: HammingMode) -> Result<u32> {
    if h_t.bins.len() != h_prev.bins.len() {
        return Err(GaitError::BinCountMismatch(h_t.bins.len(), h_prev.bins.len()));
    }
    let pairs = h_t.bins.iter().zip(&h_prev.bins);
    let d = match mode {
        HammingMode::Occupancy => pairs.filter(|(a, b)| (**a > 0) != (**b > 0)).count(),
        HammingMode::UnequalBins => pairs.filter(|(a, b)| a != b).count(),
    };
    Ok(d as u32)
}

/// Deltas between consecutive histograms: element `t` compares `t + 1` with `t`.
pub fn delta_sequence(hists: &[PoIHistogram], mode: HammingMode) -> Result<Vec<f64>> {
    hists
        .windows(2)
        .map(|w| hamming_delta(&w[1], &w[0], mode).map(f64::from))
        .collect()
}
