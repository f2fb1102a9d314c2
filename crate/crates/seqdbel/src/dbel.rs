//! The density-based empirical likelihood (DBEL) statistic for symmetry of
//! paired differences.
//!
//! For a sample of size `n >= 4` the log statistic is
//!
//! ```text
//! log V_n = min_m  sum_{j=1..n} log[ m (2n - m - 1) / (n^2 Δ_jm) ]
//! ```
//!
//! where `m` runs over the window grid of [`MGrid`] and `Δ_jm` is the
//! symmetrized empirical mass of the window `(z_(j-m), z_(j+m)]`, counting
//! both `z_i` and `-z_i` (see [`delta_jm`]). For `n <= 3` the statistic is
//! defined as `0`. Large values are evidence against symmetry about zero.
//!
//! The per-window factor is evaluated in the algebraic form
//! `m (2n - m - 1) / (n^2 Δ)`, identical to `2m (1 - (m+1)/(2n)) / (n Δ)`;
//! the equality is asserted by a unit test. Log factors are summed rather
//! than multiplied to keep the statistic stable for large `n`.

use crate::error::{Error, Result};
use crate::sample::{DifferenceSample, SortedDifferences};

/// Window-width exponent used throughout unless a caller overrides it.
pub const DEFAULT_DELTA: f64 = 0.1;

fn validate_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 0.25), got {delta}"
        )));
    }
    Ok(())
}

/// The grid of window widths `m` searched by the statistic at sample size
/// `n`: endpoints `round(n^(0.5+delta))` and
/// `min(round(n^(1-delta)), round(n/2))`, rounded half-to-even.
///
/// The endpoints are kept as computed; `members` spans them in either
/// order. With `delta = 0.1` the only sample size where `lo > hi` is
/// `n = 5` (lo = 3, hi = 2), and the searched set is `{2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MGrid {
    pub n: usize,
    pub lo: usize,
    pub hi: usize,
}

impl MGrid {
    /// Grid for sample size `n >= 4` and `delta` in `(0, 0.25)`.
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        validate_delta(delta)?;
        if n < 4 {
            return Err(Error::invalid(format!(
                "window grid requires n >= 4, got {n}"
            )));
        }
        let nf = n as f64;
        let lo = nf.powf(0.5 + delta).round_ties_even() as usize;
        let hi = (nf.powf(1.0 - delta).round_ties_even() as usize)
            .min((nf / 2.0).round_ties_even() as usize);
        Ok(Self { n, lo, hi })
    }

    /// All searched widths, ascending.
    pub fn members(&self) -> std::ops::RangeInclusive<usize> {
        self.lo.min(self.hi)..=self.lo.max(self.hi)
    }
}

/// Raw symmetrized window count for `Δ_jm`, an integer in `[0, 2n]`:
/// `#(z_i <= z_(j+m)) + #(-z_i <= z_(j+m)) - #(z_i <= z_(j-m)) - #(-z_i <= z_(j-m))`.
pub(crate) fn delta_jm_count(sorted: &SortedDifferences, j: usize, m: usize) -> i64 {
    let hi = sorted.order((j + m) as i64);
    let lo = sorted.order(j as i64 - m as i64);
    let mut count = 0i64;
    for &z in sorted.values() {
        count += i64::from(z <= hi) + i64::from(-z <= hi);
        count -= i64::from(z <= lo) + i64::from(-z <= lo);
    }
    count
}

/// The window mass `Δ_jm` with the zero-replacement rule applied: a raw
/// count of exactly zero yields `1/n` instead of `0`.
pub fn delta_jm(sorted: &SortedDifferences, j: usize, m: usize) -> Result<f64> {
    let n = sorted.n();
    if j < 1 || j > n {
        return Err(Error::invalid(format!("j must lie in [1, {n}], got {j}")));
    }
    if m < 1 || m > n {
        return Err(Error::invalid(format!("m must lie in [1, {n}], got {m}")));
    }
    let count = delta_jm_count(sorted, j, m);
    if count == 0 {
        Ok(1.0 / n as f64)
    } else {
        Ok(count as f64 / (2.0 * n as f64))
    }
}

/// The DBEL log statistic at a single sample size, with the per-width
/// profile that was minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct DbelEvaluation {
    pub n: usize,
    /// `(m, sum of log factors)` for every searched width, ascending in `m`.
    pub per_m: Vec<(usize, f64)>,
    /// Smallest width attaining the minimum; `None` for `n <= 3`.
    pub m_star: Option<usize>,
    /// `log V_n`; `0` for `n <= 3`.
    pub log_vn: f64,
}

/// Evaluates `log V_n` on a full sample.
pub fn dbel_log_statistic(sample: &DifferenceSample, delta: f64) -> Result<DbelEvaluation> {
    validate_delta(delta)?;
    let n = sample.n();
    if n <= 3 {
        return Ok(DbelEvaluation {
            n,
            per_m: Vec::new(),
            m_star: None,
            log_vn: 0.0,
        });
    }
    let sorted = SortedDifferences::new(sample);
    let mut kernel = DbelKernel::new(delta)?;
    let mut per_m = Vec::new();
    let (log_vn, m_star) = kernel.eval(sorted.values(), Some(&mut per_m))?;
    Ok(DbelEvaluation {
        n,
        per_m,
        m_star: Some(m_star),
        log_vn,
    })
}

/// Reusable evaluation kernel. Holds a table of `ln k` values and a
/// cumulative indicator-count buffer so repeated evaluations (one per
/// sequential step, thousands per Monte Carlo replication) do not
/// reallocate or recompute logarithms.
#[derive(Debug, Clone)]
pub(crate) struct DbelKernel {
    delta: f64,
    /// `ln_k[k] = ln(k)` for `k >= 1`; index 0 unused.
    ln_k: Vec<f64>,
    /// `cum[r] = #(z_i <= z_(r)) + #(-z_i <= z_(r))`, 1-based.
    cum: Vec<i64>,
}

impl DbelKernel {
    pub(crate) fn new(delta: f64) -> Result<Self> {
        validate_delta(delta)?;
        Ok(Self {
            delta,
            ln_k: vec![f64::NAN, 0.0],
            cum: Vec::new(),
        })
    }

    fn ensure_ln(&mut self, upto: usize) {
        while self.ln_k.len() <= upto {
            self.ln_k.push((self.ln_k.len() as f64).ln());
        }
    }

    /// `log V_n` and its argmin width for non-decreasing `sorted` with
    /// `n >= 4`. When `per_m` is given, the per-width log sums are
    /// appended to it in ascending `m`.
    pub(crate) fn eval(
        &mut self,
        sorted: &[f64],
        mut per_m: Option<&mut Vec<(usize, f64)>>,
    ) -> Result<(f64, usize)> {
        let n = sorted.len();
        let grid = MGrid::new(n, self.delta)?;
        self.ensure_ln(2 * n);

        self.cum.clear();
        self.cum.resize(n + 1, 0);
        for r in 1..=n {
            let t = sorted[r - 1];
            // #(z_i <= t): upper bound; #(-z_i <= t) = #(z_i >= -t).
            let below = sorted.partition_point(|&v| v <= t) as i64;
            let above = (n - sorted.partition_point(|&v| v < -t)) as i64;
            self.cum[r] = below + above;
        }

        let nf = n as f64;
        let ln_2n = (2.0 * nf).ln();
        let mut best = f64::INFINITY;
        let mut best_m = 0;
        for m in grid.members() {
            let factor_num = (m as f64) * ((2 * n - m - 1) as f64) / (nf * nf);
            let base = factor_num.ln() + ln_2n;
            let mut acc = 0.0;
            for j in 1..=n {
                let u = (j + m).min(n);
                let l = j.saturating_sub(m).max(1);
                let mut k = self.cum[u] - self.cum[l];
                if k == 0 {
                    k = 2; // zero-replacement: Δ = 1/n = 2/(2n)
                }
                acc += base - self.ln_k[k as usize];
            }
            if let Some(list) = per_m.as_deref_mut() {
                list.push((m, acc));
            }
            if acc < best {
                best = acc;
                best_m = m;
            }
        }
        Ok((best, best_m))
    }
}

/// Incremental evaluator for the sequential setting: observations arrive
/// one at a time and the statistic is recomputed on the full prefix.
/// The sorted buffer is maintained by insertion; everything else is
/// recomputed per step, which is cheap at monitoring scale.
#[derive(Debug, Clone)]
pub struct DbelState {
    kernel: DbelKernel,
    sorted: Vec<f64>,
}

impl DbelState {
    pub fn new(delta: f64) -> Result<Self> {
        Ok(Self {
            kernel: DbelKernel::new(delta)?,
            sorted: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn push(&mut self, z: f64) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {z}")));
        }
        let at = self.sorted.partition_point(|&v| v <= z);
        self.sorted.insert(at, z);
        Ok(())
    }

    /// `log V_n` on the current prefix (`0` while `n <= 3`).
    pub fn log_vn(&mut self) -> f64 {
        if self.sorted.len() <= 3 {
            return 0.0;
        }
        self.kernel
            .eval(&self.sorted, None)
            .expect("state holds n >= 4 finite observations")
            .0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(z: &[f64]) -> DifferenceSample {
        DifferenceSample::new(z.to_vec()).unwrap()
    }

    #[test]
    fn grid_small_sizes() {
        // round-half-even endpoints; n = 5 is the descending case.
        let cases = [
            (4, 2, 2),
            (5, 3, 2),
            (6, 3, 3),
            (7, 3, 4),
            (9, 4, 4),
            (10, 4, 5),
            (15, 5, 8),
        ];
        for (n, lo, hi) in cases {
            let g = MGrid::new(n, DEFAULT_DELTA).unwrap();
            assert_eq!((g.lo, g.hi), (lo, hi), "n = {n}");
        }
        assert_eq!(
            MGrid::new(5, DEFAULT_DELTA).unwrap().members().collect::<Vec<_>>(),
            vec![2, 3]
        );
    }

    #[test]
    fn grid_members_within_sample() {
        for n in 4..=400 {
            let g = MGrid::new(n, DEFAULT_DELTA).unwrap();
            for m in g.members() {
                assert!(m >= 1 && m <= n, "n = {n}, m = {m}");
            }
            // n = 5 is the only descending span under the default delta.
            if n != 5 {
                assert!(g.lo <= g.hi, "n = {n}: {} > {}", g.lo, g.hi);
            }
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(MGrid::new(3, DEFAULT_DELTA).is_err());
        assert!(MGrid::new(10, 0.0).is_err());
        assert!(MGrid::new(10, 0.25).is_err());
    }

    #[test]
    fn delta_jm_hand_values() {
        // Four indicator sums evaluated by hand on z = (-0.5, 1, 2, 3).
        let sorted = SortedDifferences::new(&sample(&[-0.5, 1.0, 2.0, 3.0]));
        assert_eq!(delta_jm(&sorted, 1, 2).unwrap(), 3.0 / 8.0); // (3+4-1-3)/8
        assert_eq!(delta_jm(&sorted, 4, 2).unwrap(), 1.0 / 4.0); // (4+4-2-4)/8
        assert_eq!(delta_jm(&sorted, 2, 2).unwrap(), 1.0 / 2.0); // (4+4-1-3)/8
        assert_eq!(delta_jm(&sorted, 3, 2).unwrap(), 1.0 / 2.0);
    }

    #[test]
    fn delta_jm_zero_replacement() {
        // Tied sample: the window (z_(j-m), z_(j+m)] can be empty.
        let sorted = SortedDifferences::new(&sample(&[1.0, 1.0, 1.0, 1.0]));
        // j = 4, m = 1: window (z_(3), z_(4)] = (1, 1] has raw mass 0.
        assert_eq!(delta_jm_count(&sorted, 4, 1), 0);
        assert_eq!(delta_jm(&sorted, 4, 1).unwrap(), 0.25);
    }

    #[test]
    fn delta_jm_validates_ranges() {
        let sorted = SortedDifferences::new(&sample(&[1.0, 2.0, 3.0]));
        assert!(delta_jm(&sorted, 0, 1).is_err());
        assert!(delta_jm(&sorted, 4, 1).is_err());
        assert!(delta_jm(&sorted, 1, 0).is_err());
        assert!(delta_jm(&sorted, 1, 4).is_err());
    }

    #[test]
    fn statistic_is_zero_below_four() {
        for z in [&[0.3][..], &[0.3, -1.0][..], &[0.3, -1.0, 5.0][..]] {
            let eval = dbel_log_statistic(&sample(z), DEFAULT_DELTA).unwrap();
            assert_eq!(eval.log_vn, 0.0);
            assert!(eval.per_m.is_empty());
            assert_eq!(eval.m_star, None);
        }
    }

    #[test]
    fn statistic_hand_value_n4() {
        // Per-window factors 0.625 / Δ with Δ = (3/8, 1/2, 1/2, 1/4):
        // product 1.6667 * 1.25 * 1.25 * 2.5 = 6.5104..., log = 1.8734...
        let eval = dbel_log_statistic(&sample(&[-0.5, 1.0, 2.0, 3.0]), DEFAULT_DELTA).unwrap();
        assert_eq!(eval.m_star, Some(2));
        assert_eq!(eval.per_m.len(), 1);
        let expected = (0.625f64 / 0.375).ln()
            + (0.625f64 / 0.5).ln()
            + (0.625f64 / 0.5).ln()
            + (0.625f64 / 0.25).ln();
        assert_relative_eq!(eval.log_vn, expected, max_relative = 1e-12);
        assert_relative_eq!(eval.log_vn, 6.510416666666667f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn factor_forms_agree() {
        // 2m (1 - (m+1)/(2n)) / (n Δ)  ==  m (2n - m - 1) / (n^2 Δ)
        for n in 4usize..=200 {
            let grid = MGrid::new(n, DEFAULT_DELTA).unwrap();
            let nf = n as f64;
            for m in grid.members() {
                let mf = m as f64;
                for k in [1usize, 2, n, 2 * n] {
                    let delta = k as f64 / (2.0 * nf);
                    let printed = 2.0 * mf * (1.0 - (mf + 1.0) / (2.0 * nf)) / (nf * delta);
                    let code = mf * (2.0 * nf - mf - 1.0) / (nf * nf * delta);
                    assert_relative_eq!(printed, code, max_relative = 1e-14);
                }
            }
        }
    }

    #[test]
    fn incremental_state_matches_batch() {
        let z = [0.4, -1.2, 2.2, 0.9, -0.3, 1.7, 0.05, -2.4, 3.3, 0.6];
        let mut state = DbelState::new(DEFAULT_DELTA).unwrap();
        for (i, &v) in z.iter().enumerate() {
            state.push(v).unwrap();
            let batch = dbel_log_statistic(&sample(&z[..=i]), DEFAULT_DELTA).unwrap();
            assert_eq!(state.log_vn(), batch.log_vn, "prefix {}", i + 1);
        }
    }

    #[test]
    fn state_rejects_nan() {
        let mut state = DbelState::new(DEFAULT_DELTA).unwrap();
        assert!(state.push(f64::NAN).is_err());
        assert!(state.push(f64::NEG_INFINITY).is_err());
    }
}
