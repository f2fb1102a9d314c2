//! Empirical check of the consistency property of the DBEL stopping rule.
//!
//! The probability that the running maximum of `log V_n` crosses the
//! growing threshold `N^gamma` should vanish under the null as the
//! horizon grows and should approach one under a fixed alternative —
//! asymptotically. At desk-scale horizons the null fractions are already
//! zero; the alternative fractions grow very slowly because the statistic
//! climbs at a bounded rate per observation (at most log 2 asymptotically)
//! while the threshold grows almost linearly.
//!
//!     cargo run --release --example consistency_check

use seqdbel::{empirical_consistency_check, DistributionSpec, DEFAULT_DELTA};

fn main() -> seqdbel::Result<()> {
    let rows = empirical_consistency_check(
        &[25, 50, 100],
        0.95,
        400,
        &DistributionSpec::Normal(0.0, 1.0),
        &DistributionSpec::Normal(1.0, 1.0),
        DEFAULT_DELTA,
        11,
    )?;

    println!(
        "{:>4}  {:>10}  {:>13}  {:>12}",
        "N", "threshold", "null crossing", "alt crossing"
    );
    for r in &rows {
        println!(
            "{:>4}  {:>10.2}  {:>13.4}  {:>12.4}",
            r.max_n, r.threshold, r.null_fraction, r.alt_fraction
        );
    }
    Ok(())
}
