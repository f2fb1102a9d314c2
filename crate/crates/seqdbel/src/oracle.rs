//! Deliberately naive reference implementation of the DBEL statistic.
//!
//! This routine exists so the optimized kernel in [`crate::dbel`] can be
//! checked against an independent computation path: it re-sorts on every
//! call, evaluates all four indicators of every window with explicit
//! double loops, and divides through by the window mass per term. It is
//! meant for test suites, not production use.

use crate::error::{Error, Result};
use crate::sample::DifferenceSample;

/// `log V_n` computed the slow way. Agrees with
/// [`crate::dbel::dbel_log_statistic`] up to floating-point noise.
pub fn oracle_dbel(sample: &DifferenceSample, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 0.25), got {delta}"
        )));
    }
    let n = sample.n();
    if n <= 3 {
        return Ok(0.0);
    }

    let mut sz = sample.values().to_vec();
    sz.sort_by(f64::total_cmp);
    let order = |r: i64| -> f64 {
        let r = r.clamp(1, n as i64);
        sz[(r - 1) as usize]
    };

    let nf = n as f64;
    let lo = nf.powf(0.5 + delta).round_ties_even() as i64;
    let hi = (nf.powf(1.0 - delta).round_ties_even() as i64)
        .min((nf / 2.0).round_ties_even() as i64);
    let (a, b) = (lo.min(hi), lo.max(hi));

    let mut best = f64::INFINITY;
    for m in a..=b {
        let mut sum = 0.0;
        for j in 1..=n as i64 {
            let upper = order(j + m);
            let lower = order(j - m);
            let mut count = 0i64;
            for &z in &sz {
                if z <= upper {
                    count += 1;
                }
                if -z <= upper {
                    count += 1;
                }
            }
            for &z in &sz {
                if z <= lower {
                    count -= 1;
                }
                if -z <= lower {
                    count -= 1;
                }
            }
            let mass = if count == 0 {
                1.0 / nf
            } else {
                count as f64 / (2.0 * nf)
            };
            sum += ((m as f64) * (2.0 * nf - m as f64 - 1.0) / (nf * nf * mass)).ln();
        }
        if sum < best {
            best = sum;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_value_n4() {
        let s = DifferenceSample::new(vec![-0.5, 1.0, 2.0, 3.0]).unwrap();
        let v = oracle_dbel(&s, 0.1).unwrap();
        assert_relative_eq!(v, 6.510416666666667f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn zero_below_four() {
        let s = DifferenceSample::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(oracle_dbel(&s, 0.1).unwrap(), 0.0);
    }
}
