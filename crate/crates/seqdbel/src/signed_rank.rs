//! Wilcoxon signed-rank statistic in the standardized form used by the
//! sequential signed-rank test.
//!
//! `SR_n = Σ I(z_i >= 0) R_i` where `R_i` is the rank of `|z_i|` among
//! `|z_1| .. |z_n|`, and
//! `TS_n = |SR_n - n(n+1)/4| / sqrt(n(n+1)(2n+1)/24)`.
//!
//! Exact ties in `|z|` receive midranks and are flagged on the result; a
//! difference of exactly zero counts as nonnegative.

use crate::error::{Error, Result};
use crate::sample::DifferenceSample;

/// Signed-rank sum and its standardized absolute form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedRankEvaluation {
    pub n: usize,
    /// `SR_n`; an integer in `[0, n(n+1)/2]` when `|z|` has no ties,
    /// possibly half-integer with midranks.
    pub sr: f64,
    /// `TS_n >= 0`.
    pub ts: f64,
    /// True when `|z|` contained at least one exact tie, in which case
    /// midranks were used and the null calibration is approximate.
    pub ties: bool,
}

fn standardize(sr: f64, n: usize) -> f64 {
    let nf = n as f64;
    let center = nf * (nf + 1.0) / 4.0;
    let scale = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
    (sr - center).abs() / scale
}

/// Evaluates `SR_n` and `TS_n` on a full sample.
pub fn signed_rank_statistic(sample: &DifferenceSample) -> Result<SignedRankEvaluation> {
    let z = sample.values();
    let n = z.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| z[a].abs().total_cmp(&z[b].abs()));

    let mut sr = 0.0;
    let mut ties = false;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && z[idx[end + 1]].abs() == z[idx[start]].abs() {
            end += 1;
        }
        if end > start {
            ties = true;
        }
        // Midrank of the run occupying ranks start+1 ..= end+1.
        let rank = (start + end) as f64 / 2.0 + 1.0;
        for &i in &idx[start..=end] {
            if z[i] >= 0.0 {
                sr += rank;
            }
        }
        start = end + 1;
    }

    Ok(SignedRankEvaluation {
        n,
        sr,
        ts: standardize(sr, n),
        ties,
    })
}

/// Incremental signed-rank evaluator: keeps magnitudes sorted and rescans
/// them per step, which is linear in the prefix length.
#[derive(Debug, Clone, Default)]
pub struct SignedRankState {
    /// `(|z|, z >= 0)` sorted by magnitude.
    entries: Vec<(f64, bool)>,
    ties: bool,
}

impl SignedRankState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn ties(&self) -> bool {
        self.ties
    }

    pub fn push(&mut self, z: f64) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {z}")));
        }
        let a = z.abs();
        let at = self.entries.partition_point(|&(v, _)| v <= a);
        if (at > 0 && self.entries[at - 1].0 == a)
            || (at < self.entries.len() && self.entries[at].0 == a)
        {
            self.ties = true;
        }
        self.entries.insert(at, (a, z >= 0.0));
        Ok(())
    }

    /// `TS_n` on the current prefix.
    pub fn ts(&self) -> f64 {
        let n = self.entries.len();
        if n == 0 {
            return 0.0;
        }
        let mut sr = 0.0;
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && self.entries[end + 1].0 == self.entries[start].0 {
                end += 1;
            }
            let rank = (start + end) as f64 / 2.0 + 1.0;
            for &(_, nonneg) in &self.entries[start..=end] {
                if nonneg {
                    sr += rank;
                }
            }
            start = end + 1;
        }
        standardize(sr, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eval(z: &[f64]) -> SignedRankEvaluation {
        signed_rank_statistic(&DifferenceSample::new(z.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn all_positive_attains_maximum() {
        let e = eval(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.sr, 10.0); // n(n+1)/2
        assert_relative_eq!(e.ts, 5.0 / 7.5f64.sqrt(), max_relative = 1e-15);
        assert!(!e.ties);
    }

    #[test]
    fn hand_value_n2() {
        let e = eval(&[-1.0, 2.0]);
        assert_eq!(e.sr, 2.0);
        assert_relative_eq!(e.ts, 0.5 / 1.25f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn centered_sum_gives_zero() {
        // sr = 5 = n(n+1)/4 for n = 4.
        let e = eval(&[-1.0, 2.0, -3.0, 4.0]);
        assert_eq!(e.sr, 6.0);
        let e = eval(&[1.0, -2.0, 4.0, -3.0]);
        assert_eq!(e.sr, 5.0);
        assert_eq!(e.ts, 0.0);
    }

    #[test]
    fn zero_counts_as_nonnegative() {
        let e = eval(&[0.0, -2.0]);
        // |0| gets rank 1 and is counted in SR.
        assert_eq!(e.sr, 1.0);
    }

    #[test]
    fn midranks_on_ties() {
        let e = eval(&[1.0, -1.0, 2.0]);
        assert!(e.ties);
        // |z| = (1, 1, 2): midrank 1.5 for both ones; sr = 1.5 + 3 = 4.5.
        assert_eq!(e.sr, 4.5);
    }

    #[test]
    fn incremental_matches_batch() {
        let z = [0.4, -1.2, 2.2, -0.9, 0.4, 1.7, -0.05];
        let mut state = SignedRankState::new();
        for (i, &v) in z.iter().enumerate() {
            state.push(v).unwrap();
            let batch = eval(&z[..=i]);
            assert_eq!(state.ts(), batch.ts, "prefix {}", i + 1);
            assert_eq!(state.ties(), batch.ties, "prefix {}", i + 1);
        }
    }
}
