//! Learning-regime classification from an entropy time series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SMOOTHING_WINDOW: usize = 5;
/// Relative thresholds for "sustained" drops and rises.
const DROP_THRESHOLD: f64 = 0.02;
const RISE_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    Compression,
    StructureFormation,
    CompressionThenStructure,
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub kind: RegimeKind,
    /// Epoch of the smoothed-series minimum; present iff the label is
    /// `CompressionThenStructure`.
    pub change_point: Option<usize>,
    pub window: usize,
}

/// Centered moving average; the window shrinks near the edges.
fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Classify an entropy trajectory: compression (sustained fall),
/// structure formation (sustained rise), compression followed by
/// structure formation (a >=2% initial drop then a >=2% recovery above
/// the minimum), or stationary.
pub fn classify_regime(series: &[(usize, f64)], window: usize) -> Result<RegimeLabel> {
    if window == 0 {
        return Err(Error::Config("smoothing window must be >= 1".into()));
    }
    if series.len() < 2 * window {
        return Err(Error::Config(format!(
            "series of length {} is too short for window {window} (need >= {})",
            series.len(),
            2 * window
        )));
    }
    let values: Vec<f64> = series.iter().map(|&(_, v)| v).collect();
    let smoothed = smooth(&values, window);
    let s0 = smoothed[0];
    let s_end = *smoothed.last().unwrap();
    let (argmin, &s_min) = smoothed
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let scale = s0.abs().max(1e-12);

    let dropped = (s0 - s_min) >= DROP_THRESHOLD * scale;
    let recovered = (s_end - s_min) >= RISE_THRESHOLD * s_min.abs().max(1e-12);

    // net change over the first and last thirds of the smoothed series
    let third = (smoothed.len() / 3).max(1);
    let first_third = smoothed[third - 1] - smoothed[0];
    let last_third = s_end - smoothed[smoothed.len() - third];
    let total = s_end - s0;

    let kind = if dropped && recovered {
        RegimeKind::CompressionThenStructure
    } else if total >= RISE_THRESHOLD * scale && first_third >= 0.0 && last_third >= 0.0 {
        RegimeKind::StructureFormation
    } else if total <= -DROP_THRESHOLD * scale && !recovered {
        RegimeKind::Compression
    } else {
        RegimeKind::Stationary
    };

    Ok(RegimeLabel {
        change_point: if kind == RegimeKind::CompressionThenStructure {
            Some(series[argmin].0)
        } else {
            None
        },
        kind,
        window,
    })
}
