//! Paired-difference samples and their order statistics.
//!
//! All tests in this crate operate on differences `z_i = x_i - y_i` of
//! paired measurements. [`DifferenceSample`] keeps the arrival order, which
//! matters for sequential procedures; [`SortedDifferences`] provides the
//! order statistics with the index clamping convention used by the window
//! statistic: `z_(r) = z_(1)` for `r <= 1` and `z_(r) = z_(n)` for `r >= n`.

use crate::error::{Error, Result};

/// Differences of paired observations, in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSample {
    z: Vec<f64>,
}

impl DifferenceSample {
    /// Wraps a vector of differences. Rejects empty input and any
    /// non-finite value.
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::invalid("difference sample must be non-empty"));
        }
        if let Some((i, v)) = z.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "difference sample contains non-finite value {v} at index {i}"
            )));
        }
        Ok(Self { z })
    }

    /// Builds the sample from `(x, y)` pairs as `z = x - y`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(x, y)| x - y).collect())
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }
}

/// Order statistics of a difference sample, with clamped 1-based access.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedDifferences {
    values: Vec<f64>,
}

impl SortedDifferences {
    pub fn new(sample: &DifferenceSample) -> Self {
        let mut values = sample.values().to_vec();
        // No NaNs by the sample invariant, so total_cmp == partial order.
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// The non-decreasing values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `z_(r)` with the boundary convention `z_(r) = z_(1)` for `r <= 1`
    /// and `z_(r) = z_(n)` for `r >= n`.
    pub fn order(&self, r: i64) -> f64 {
        let n = self.values.len() as i64;
        let r = r.clamp(1, n);
        self.values[(r - 1) as usize]
    }
}
