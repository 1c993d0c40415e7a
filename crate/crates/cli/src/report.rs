//! Report files written by `solve` and `oracle`.

use std::collections::BTreeMap;

use rank3eq_core::Rank3Tensor;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_FORMAT: &str = "rank3eq-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format: String,
    pub tool_version: String,
    /// `structured` or `oracle`.
    pub solver: String,
    pub input_sha256: String,
    pub status: String,
    /// Flat layout `16α + 4μ + ν`.
    pub solution: Option<Vec<f64>>,
    /// The same components as `[α][μ][ν]`.
    pub solution_nested: Option<Vec<Vec<Vec<f64>>>>,
    pub det_gamma: f64,
    pub det_a: f64,
    pub rcond_gamma: f64,
    pub rcond_a: f64,
    pub residual_rel: Option<f64>,
    /// Stage durations in microseconds.
    pub timings_us: BTreeMap<String, f64>,
}

impl ReportFile {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn solution_tensor(&self) -> Option<Rank3Tensor> {
        let v = self.solution.as_ref()?;
        <[f64; 64]>::try_from(v.as_slice()).ok().map(Rank3Tensor)
    }
}

pub fn nested(t: &Rank3Tensor) -> Vec<Vec<Vec<f64>>> {
    (0..4)
        .map(|a| {
            (0..4)
                .map(|m| (0..4).map(|n| t.get(a, m, n)).collect())
                .collect()
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `max|x − y| / max|y|` and the flat index where it is attained.
pub fn max_rel_diff(x: &Rank3Tensor, y: &Rank3Tensor) -> (f64, usize) {
    let scale = y.max_abs().max(f64::MIN_POSITIVE);
    let (idx, diff) =
        x.0.iter()
            .zip(&y.0)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold(
                (0, 0.0),
                |best, (i, d)| if d > best.1 { (i, d) } else { best },
            );
    (diff / scale, idx)
}
