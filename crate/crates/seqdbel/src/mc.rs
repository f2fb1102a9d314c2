//! Monte Carlo laboratory: critical-value tabulation, power/ASN studies
//! and bootstrap resampling.
//!
//! Every study consumes randomness through [`replication_rng`], which maps
//! `(seed, replication index)` to an independent ChaCha substream. Results
//! are therefore bit-identical for a given seed regardless of how many
//! worker threads execute the replications; all aggregation is over
//! integer counts or collected-and-sorted samples.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::dbel::DbelState;
use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::sample::DifferenceSample;
use crate::scenario::ScenarioSpec;
use crate::sequential::{run_to_completion, StoppingPolicy, TestKind};
use crate::signed_rank::SignedRankState;
use crate::table::{empirical_upper_quantile, CriticalValueEntry, CriticalValueTable, QuantileMethod};

/// The RNG for one replication: a pure function of `(seed, stream)`.
pub fn replication_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

enum StatState {
    Dbel(DbelState),
    Ssrt(SignedRankState),
}

impl StatState {
    fn new(test: TestKind, delta: f64) -> Result<Self> {
        Ok(match test {
            TestKind::Dbel => StatState::Dbel(DbelState::new(delta)?),
            TestKind::Ssrt => StatState::Ssrt(SignedRankState::new()),
        })
    }

    fn push(&mut self, z: f64) {
        match self {
            StatState::Dbel(s) => s.push(z),
            StatState::Ssrt(s) => s.push(z),
        }
        .expect("parametric samplers yield finite values")
    }

    fn value(&mut self) -> f64 {
        match self {
            StatState::Dbel(s) => s.log_vn(),
            StatState::Ssrt(s) => s.ts(),
        }
    }
}

fn validate_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::invalid("at least one alpha is required"));
    }
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {a}")));
        }
    }
    Ok(())
}

/// Tabulates critical values for `test` at every horizon in `ns` and every
/// level in `alphas`, generating null trajectories from `null_dist`
/// (which must be symmetric about zero for the values to be meaningful).
///
/// Per replication the trajectory `z_1, .., z_max(ns)` is drawn once and
/// the running maximum of the statistic is recorded at each horizon, so
/// tabulated values are non-decreasing in `N` by construction. Entries are
/// emitted with horizons ascending.
pub fn tabulate_with_null(
    test: TestKind,
    ns: &[usize],
    alphas: &[f64],
    reps: u64,
    seed: u64,
    delta: f64,
    method: QuantileMethod,
    null_dist: &DistributionSpec,
) -> Result<CriticalValueTable> {
    if reps < 1 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    if ns.is_empty() {
        return Err(Error::invalid("at least one horizon N is required"));
    }
    if ns.iter().any(|&n| n < 1) {
        return Err(Error::invalid("every horizon must satisfy N >= 1"));
    }
    validate_alphas(alphas)?;
    null_dist.validate()?;
    // Delta is validated by the DBEL state; probe it once up front.
    StatState::new(test, delta)?;

    let mut checkpoints = ns.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let n_max = *checkpoints.last().unwrap();
    let sampler = null_dist.sampler()?;

    // Replication-major maxima, then transposed per checkpoint.
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep);
            let mut state = StatState::new(test, delta).expect("validated above");
            let mut running = match test {
                TestKind::Dbel => 0.0, // log V_n = 0 for n <= 3
                TestKind::Ssrt => f64::NEG_INFINITY,
            };
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = 0;
            for n in 1..=n_max {
                state.push(sampler.sample(&mut rng));
                running = running.max(state.value());
                if n == checkpoints[next] {
                    out.push(running);
                    next += 1;
                }
            }
            out
        })
        .collect();

    let mut entries = Vec::with_capacity(checkpoints.len() * alphas.len());
    for (i, &max_n) in checkpoints.iter().enumerate() {
        let mut column: Vec<f64> = per_rep.iter().map(|r| r[i]).collect();
        column.sort_by(f64::total_cmp);
        for &alpha in alphas {
            entries.push(CriticalValueEntry {
                max_n,
                alpha,
                critical: empirical_upper_quantile(&column, alpha, method)?,
            });
        }
    }

    Ok(CriticalValueTable {
        test,
        delta: matches!(test, TestKind::Dbel).then_some(delta),
        reps,
        seed,
        entries,
    })
}

/// [`tabulate_with_null`] with the standard normal null generator, which
/// is valid for any symmetric null because both statistics are
/// distribution-free under symmetry.
pub fn tabulate_table(
    test: TestKind,
    ns: &[usize],
    alphas: &[f64],
    reps: u64,
    seed: u64,
    delta: f64,
    method: QuantileMethod,
) -> Result<CriticalValueTable> {
    tabulate_with_null(
        test,
        ns,
        alphas,
        reps,
        seed,
        delta,
        method,
        &DistributionSpec::Normal(0.0, 1.0),
    )
}

/// Single-horizon convenience wrapper around [`tabulate_table`].
pub fn tabulate_critical(
    test: TestKind,
    max_n: usize,
    alphas: &[f64],
    reps: u64,
    seed: u64,
    delta: f64,
    method: QuantileMethod,
) -> Result<CriticalValueTable> {
    tabulate_table(test, &[max_n], alphas, reps, seed, delta, method)
}

/// Power and mean stopping time of one test under one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub scenario: ScenarioSpec,
    pub test: TestKind,
    /// Rejection fraction; `power * reps` is an integer count.
    pub power: f64,
    /// Average sample number, in `[1, max_n]`.
    pub asn: f64,
    pub reps: u64,
    pub seed: u64,
}

fn policy_from_table(
    table: &CriticalValueTable,
    max_n: usize,
    alpha: f64,
) -> Result<StoppingPolicy> {
    let critical = table.lookup(max_n, alpha).ok_or_else(|| {
        Error::config(format!(
            "table for test '{}' has no entry for N = {max_n}, alpha = {alpha}",
            table.test
        ))
    })?;
    StoppingPolicy::with_delta(
        table.test,
        max_n,
        alpha,
        critical,
        table.delta.unwrap_or(crate::dbel::DEFAULT_DELTA),
    )
}

/// Runs the scenario `reps` times and reports power and ASN for each
/// supplied table (one per test). Every replication draws one trajectory
/// of paired differences and feeds the same trajectory to all tests.
pub fn power_study(
    scenario: &ScenarioSpec,
    tables: &[&CriticalValueTable],
    reps: u64,
    seed: u64,
) -> Result<Vec<PowerResult>> {
    scenario.validate()?;
    if reps < 1 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    if tables.is_empty() {
        return Err(Error::invalid("at least one critical-value table is required"));
    }
    let policies: Vec<StoppingPolicy> = tables
        .iter()
        .map(|t| policy_from_table(t, scenario.max_n, scenario.alpha))
        .collect::<Result<_>>()?;
    let x = scenario.x.sampler()?;
    let y = scenario.y.sampler()?;
    let max_n = scenario.max_n;

    let totals = (0..reps)
        .into_par_iter()
        .fold(
            || vec![(0u64, 0u64); policies.len()],
            |mut acc, rep| {
                let mut rng = replication_rng(seed, rep);
                let z: Vec<f64> = (0..max_n)
                    .map(|_| x.sample(&mut rng) - y.sample(&mut rng))
                    .collect();
                let sample = DifferenceSample::new(z).expect("finite draws");
                for (slot, policy) in acc.iter_mut().zip(&policies) {
                    let outcome =
                        run_to_completion(*policy, &sample).expect("validated policy and sample");
                    slot.0 += u64::from(outcome.rejected);
                    slot.1 += outcome.stopped_at as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![(0u64, 0u64); policies.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.0 += y.0;
                    x.1 += y.1;
                }
                a
            },
        );

    Ok(policies
        .iter()
        .zip(totals)
        .map(|(policy, (rejects, stops))| PowerResult {
            scenario: scenario.clone(),
            test: policy.test,
            power: rejects as f64 / reps as f64,
            asn: stops as f64 / reps as f64,
            reps,
            seed,
        })
        .collect())
}

/// Bootstrap rejection rate and ASN of one test at one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapRow {
    pub max_n: usize,
    pub test: TestKind,
    pub rejection_rate: f64,
    pub asn: f64,
    pub reps: u64,
    pub seed: u64,
}

fn ordered_subsample<R: Rng>(values: &[f64], k: usize, rng: &mut R) -> Vec<f64> {
    // Partial Fisher-Yates: a uniformly random ordered sample without
    // replacement.
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    for i in 0..k {
        let j = rng.random_range(i..values.len());
        idx.swap(i, j);
    }
    idx[..k].iter().map(|&i| values[i as usize]).collect()
}

/// Resamples sub-experiments of each size in `n_list` from a fixed data
/// set and reports how often each test rejects, plus the mean stopping
/// time. Sampling is without replacement (a random subset of subjects in
/// random order) unless `with_replacement` is set.
pub fn bootstrap_study(
    data: &DifferenceSample,
    n_list: &[usize],
    reps: u64,
    tables: &[&CriticalValueTable],
    alpha: f64,
    seed: u64,
    with_replacement: bool,
) -> Result<Vec<BootstrapRow>> {
    if n_list.is_empty() {
        return Err(Error::invalid("at least one horizon N is required"));
    }
    for &n in n_list {
        if n < 1 || n >= data.n() {
            return Err(Error::invalid(format!(
                "bootstrap horizon N = {n} must satisfy 1 <= N < data size {}",
                data.n()
            )));
        }
    }
    if reps < 1 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    if tables.is_empty() {
        return Err(Error::invalid("at least one critical-value table is required"));
    }

    let mut rows = Vec::with_capacity(n_list.len() * tables.len());
    for (ni, &max_n) in n_list.iter().enumerate() {
        let policies: Vec<StoppingPolicy> = tables
            .iter()
            .map(|t| policy_from_table(t, max_n, alpha))
            .collect::<Result<_>>()?;
        let values = data.values();

        let totals = (0..reps)
            .into_par_iter()
            .fold(
                || vec![(0u64, 0u64); policies.len()],
                |mut acc, rep| {
                    let mut rng = replication_rng(seed, ni as u64 * reps + rep);
                    let z = if with_replacement {
                        (0..max_n)
                            .map(|_| values[rng.random_range(0..values.len())])
                            .collect()
                    } else {
                        ordered_subsample(values, max_n, &mut rng)
                    };
                    let sample = DifferenceSample::new(z).expect("subsample of a valid sample");
                    for (slot, policy) in acc.iter_mut().zip(&policies) {
                        let outcome = run_to_completion(*policy, &sample)
                            .expect("validated policy and sample");
                        slot.0 += u64::from(outcome.rejected);
                        slot.1 += outcome.stopped_at as u64;
                    }
                    acc
                },
            )
            .reduce(
                || vec![(0u64, 0u64); policies.len()],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.0 += y.0;
                        x.1 += y.1;
                    }
                    a
                },
            );

        for (policy, (rejects, stops)) in policies.iter().zip(totals) {
            rows.push(BootstrapRow {
                max_n,
                test: policy.test,
                rejection_rate: rejects as f64 / reps as f64,
                asn: stops as f64 / reps as f64,
                reps,
                seed,
            });
        }
    }
    Ok(rows)
}
