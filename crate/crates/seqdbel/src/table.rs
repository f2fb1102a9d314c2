//! Critical-value tables and the empirical quantile estimators that
//! produce them.
//!
//! A table records, for one test, the Monte Carlo upper percentiles of the
//! running-maximum statistic over a grid of `(N, alpha)`, together with the
//! replication count and seed that produced them. The JSON layout is
//! `{test, delta?, reps, seed, entries: [{N, alpha, critical}]}` and
//! round-trips bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequential::TestKind;

/// One tabulated critical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueEntry {
    #[serde(rename = "N")]
    pub max_n: usize,
    pub alpha: f64,
    pub critical: f64,
}

/// Monte Carlo critical values for one test over a `(N, alpha)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub test: TestKind,
    /// Window exponent; present for the DBEL test only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub reps: u64,
    pub seed: u64,
    pub entries: Vec<CriticalValueEntry>,
}

impl CriticalValueTable {
    /// The critical value at `(max_n, alpha)`, matched exactly.
    pub fn lookup(&self, max_n: usize, alpha: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.max_n == max_n && e.alpha == alpha)
            .map(|e| e.critical)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// How to turn a Monte Carlo sample into an upper percentile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileMethod {
    /// The order statistic at rank `ceil((1 - alpha) * reps)`.
    OrderStatistic,
    /// R's default interpolating estimator (type 7).
    #[default]
    Type7,
}

impl std::str::FromStr for QuantileMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "order" | "order-statistic" => Ok(QuantileMethod::OrderStatistic),
            "type7" | "type-7" => Ok(QuantileMethod::Type7),
            other => Err(Error::invalid(format!(
                "unknown quantile method '{other}' (expected 'type7' or 'order')"
            ))),
        }
    }
}

/// Upper `alpha`-percentile of an ascending sample: the value `q` with
/// roughly `Pr(X >= q) = alpha`. `alpha = 1` degenerates to the sample
/// minimum.
pub fn empirical_upper_quantile(sorted: &[f64], alpha: f64, method: QuantileMethod) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let len = sorted.len();
    let p = 1.0 - alpha;
    Ok(match method {
        QuantileMethod::OrderStatistic => {
            let rank = (p * len as f64).ceil() as usize;
            sorted[rank.clamp(1, len) - 1]
        }
        QuantileMethod::Type7 => {
            let h = (len - 1) as f64 * p;
            let lo = h.floor() as usize;
            if lo + 1 >= len {
                sorted[len - 1]
            } else {
                sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_boundaries() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        // alpha = 1 -> minimum under both estimators.
        for m in [QuantileMethod::OrderStatistic, QuantileMethod::Type7] {
            assert_eq!(empirical_upper_quantile(&xs, 1.0, m).unwrap(), 1.0);
        }
        // Small alpha -> maximum.
        assert_eq!(
            empirical_upper_quantile(&xs, 1e-9, QuantileMethod::OrderStatistic).unwrap(),
            4.0
        );
        assert!(empirical_upper_quantile(&xs, 0.0, QuantileMethod::Type7).is_err());
        assert!(empirical_upper_quantile(&[], 0.5, QuantileMethod::Type7).is_err());
    }

    #[test]
    fn type7_interpolates_like_r() {
        // R: quantile(c(1,2,3,4), 0.95) == 3.85
        let xs = [1.0, 2.0, 3.0, 4.0];
        let q = empirical_upper_quantile(&xs, 0.05, QuantileMethod::Type7).unwrap();
        assert!((q - 3.85).abs() < 1e-12);
        // R: quantile(c(1,2,3,4), 0.5) == 2.5
        let q = empirical_upper_quantile(&xs, 0.5, QuantileMethod::Type7).unwrap();
        assert!((q - 2.5).abs() < 1e-12);
    }

    #[test]
    fn order_statistic_rank() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        // ceil(0.95 * 100) = 95th order statistic.
        let q = empirical_upper_quantile(&xs, 0.05, QuantileMethod::OrderStatistic).unwrap();
        assert_eq!(q, 95.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let table = CriticalValueTable {
            test: TestKind::Dbel,
            delta: Some(0.1),
            reps: 25_000,
            seed: 7,
            entries: vec![
                CriticalValueEntry {
                    max_n: 15,
                    alpha: 0.05,
                    critical: 4.288_000_000_000_001,
                },
                CriticalValueEntry {
                    max_n: 15,
                    alpha: 0.1,
                    critical: std::f64::consts::PI,
                },
            ],
        };
        let json = table.to_json().unwrap();
        let back = CriticalValueTable::from_json(&json).unwrap();
        assert_eq!(back, table);
        for (a, b) in back.entries.iter().zip(&table.entries) {
            assert_eq!(a.critical.to_bits(), b.critical.to_bits());
        }
    }

    #[test]
    fn lookup_is_exact_match() {
        let table = CriticalValueTable {
            test: TestKind::Ssrt,
            delta: None,
            reps: 10,
            seed: 0,
            entries: vec![CriticalValueEntry {
                max_n: 25,
                alpha: 0.05,
                critical: 2.5,
            }],
        };
        assert_eq!(table.lookup(25, 0.05), Some(2.5));
        assert_eq!(table.lookup(25, 0.1), None);
        assert_eq!(table.lookup(50, 0.05), None);
        let json = table.to_json().unwrap();
        assert!(!json.contains("delta"));
    }
}
