//! Sequential stopping-rule evaluation for both tests.
//!
//! Observations arrive one at a time; after each arrival the configured
//! statistic is recomputed on the full prefix and compared against a fixed
//! critical value. The first `n` with `statistic >= critical` rejects and
//! stops; reaching the maximum sample size without rejecting accepts.

use serde::{Deserialize, Serialize};

use crate::dbel::{DbelState, DEFAULT_DELTA};
use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::mc::replication_rng;
use crate::sample::DifferenceSample;
use crate::signed_rank::SignedRankState;

/// Which statistic drives the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    /// Density-based empirical likelihood: `log V_n >= critical`.
    Dbel,
    /// Sequential signed-rank: `TS_n >= critical`.
    Ssrt,
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestKind::Dbel => "dbel",
            TestKind::Ssrt => "ssrt",
        })
    }
}

impl std::str::FromStr for TestKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dbel" => Ok(TestKind::Dbel),
            "ssrt" => Ok(TestKind::Ssrt),
            other => Err(Error::invalid(format!(
                "unknown test '{other}' (expected 'dbel' or 'ssrt')"
            ))),
        }
    }
}

/// A fully specified sequential design: test, horizon, level and the
/// critical value tabulated for that `(test, max_n, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingPolicy {
    pub test: TestKind,
    pub max_n: usize,
    pub alpha: f64,
    pub critical: f64,
    /// Window exponent, used by the DBEL statistic only.
    pub delta: f64,
}

impl StoppingPolicy {
    pub fn new(test: TestKind, max_n: usize, alpha: f64, critical: f64) -> Result<Self> {
        Self::with_delta(test, max_n, alpha, critical, DEFAULT_DELTA)
    }

    pub fn with_delta(
        test: TestKind,
        max_n: usize,
        alpha: f64,
        critical: f64,
        delta: f64,
    ) -> Result<Self> {
        if max_n < 1 {
            return Err(Error::invalid("max_n must be at least 1"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !critical.is_finite() {
            return Err(Error::invalid("critical value must be finite"));
        }
        if !(delta > 0.0 && delta < 0.25) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 0.25), got {delta}"
            )));
        }
        Ok(Self {
            test,
            max_n,
            alpha,
            critical,
            delta,
        })
    }
}

/// Outcome of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Continue,
    RejectStop,
    AcceptStop,
}

/// One monitored step: the prefix length, its statistic, the threshold and
/// the resulting decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub statistic: f64,
    pub critical: f64,
    pub decision: Decision,
}

/// Result of running a policy over a stream.
///
/// `stopped_at` is the number of observations consumed. When the last
/// trajectory decision is [`Decision::Continue`] the stream was exhausted
/// before the horizon and the run is inconclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialOutcome {
    pub stopped_at: usize,
    pub rejected: bool,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl SequentialOutcome {
    /// True when the run ended with an explicit stop decision rather than
    /// running out of data.
    pub fn is_conclusive(&self) -> bool {
        matches!(
            self.trajectory.last().map(|p| p.decision),
            Some(Decision::RejectStop) | Some(Decision::AcceptStop)
        )
    }
}

#[derive(Debug, Clone)]
enum Evaluator {
    Dbel(DbelState),
    Ssrt(SignedRankState),
}

impl Evaluator {
    fn push(&mut self, z: f64) -> Result<()> {
        match self {
            Evaluator::Dbel(s) => s.push(z),
            Evaluator::Ssrt(s) => s.push(z),
        }
    }

    fn statistic(&mut self) -> f64 {
        match self {
            Evaluator::Dbel(s) => s.log_vn(),
            Evaluator::Ssrt(s) => s.ts(),
        }
    }
}

/// Single-trial monitor: owns the policy and the accumulated observations.
/// One writer per trial; distinct monitors are independent.
#[derive(Debug, Clone)]
pub struct MonitorState {
    policy: StoppingPolicy,
    evaluator: Evaluator,
    trajectory: Vec<TrajectoryPoint>,
    stopped: bool,
}

impl MonitorState {
    pub fn new(policy: StoppingPolicy) -> Result<Self> {
        let evaluator = match policy.test {
            TestKind::Dbel => Evaluator::Dbel(DbelState::new(policy.delta)?),
            TestKind::Ssrt => Evaluator::Ssrt(SignedRankState::new()),
        };
        Ok(Self {
            policy,
            evaluator,
            trajectory: Vec::new(),
            stopped: false,
        })
    }

    pub fn policy(&self) -> &StoppingPolicy {
        &self.policy
    }

    pub fn n(&self) -> usize {
        self.trajectory.len()
    }

    /// True once a stop decision has been reached; further feeds error.
    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    pub fn trajectory(&self) -> &[TrajectoryPoint] {
        &self.trajectory
    }

    /// Consumes the next difference, recomputes the statistic on the full
    /// prefix and applies the rejection boundary (non-strict `>=`).
    pub fn feed(&mut self, z: f64) -> Result<TrajectoryPoint> {
        if self.stopped {
            return Err(Error::state(
                "monitor already reached a stop decision; no further observations accepted",
            ));
        }
        if !z.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {z}")));
        }
        self.evaluator.push(z)?;
        let n = self.trajectory.len() + 1;
        let statistic = self.evaluator.statistic();
        let decision = if statistic >= self.policy.critical {
            Decision::RejectStop
        } else if n == self.policy.max_n {
            Decision::AcceptStop
        } else {
            Decision::Continue
        };
        let point = TrajectoryPoint {
            n,
            statistic,
            critical: self.policy.critical,
            decision,
        };
        self.trajectory.push(point);
        if decision != Decision::Continue {
            self.stopped = true;
        }
        Ok(point)
    }

    /// Snapshot of the run so far.
    pub fn outcome(&self) -> SequentialOutcome {
        SequentialOutcome {
            stopped_at: self.trajectory.len(),
            rejected: matches!(
                self.trajectory.last().map(|p| p.decision),
                Some(Decision::RejectStop)
            ),
            trajectory: self.trajectory.clone(),
        }
    }

    pub fn into_outcome(self) -> SequentialOutcome {
        SequentialOutcome {
            stopped_at: self.trajectory.len(),
            rejected: matches!(
                self.trajectory.last().map(|p| p.decision),
                Some(Decision::RejectStop)
            ),
            trajectory: self.trajectory,
        }
    }
}

/// Feeds the sample into a fresh monitor until it stops or the data runs
/// out; only the first `max_n` differences are consumed.
pub fn run_to_completion(
    policy: StoppingPolicy,
    sample: &DifferenceSample,
) -> Result<SequentialOutcome> {
    let mut state = MonitorState::new(policy)?;
    for &z in sample.values().iter().take(policy.max_n) {
        let point = state.feed(z)?;
        if point.decision != Decision::Continue {
            break;
        }
    }
    Ok(state.into_outcome())
}

/// One row of the consistency table: how often the running maximum of
/// `log V_n` exceeds `max_n^gamma` under each generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow {
    pub max_n: usize,
    pub threshold: f64,
    pub null_fraction: f64,
    pub alt_fraction: f64,
}

/// Estimates `Pr{ max_{n <= N} log V_n > N^gamma }` for each horizon in
/// `n_list`, under a null generator and an alternative generator of
/// differences. `gamma` must lie in `(0.75, 1)`.
pub fn empirical_consistency_check(
    n_list: &[usize],
    gamma: f64,
    reps: u64,
    null_gen: &DistributionSpec,
    alt_gen: &DistributionSpec,
    delta: f64,
    seed: u64,
) -> Result<Vec<ConsistencyRow>> {
    use rand_distr::Distribution;
    use rayon::prelude::*;

    if !(gamma > 0.75 && gamma < 1.0) {
        return Err(Error::invalid(format!(
            "gamma must lie in (0.75, 1), got {gamma}"
        )));
    }
    if n_list.is_empty() {
        return Err(Error::invalid("n_list must be non-empty"));
    }
    if n_list.iter().any(|&n| n < 4) {
        return Err(Error::invalid("every horizon must satisfy N >= 4"));
    }
    if reps < 1 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    null_gen.validate()?;
    alt_gen.validate()?;

    let mut checkpoints: Vec<usize> = n_list.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let n_max = *checkpoints.last().unwrap();

    // Per replication and generator: the running maximum of log V_n
    // recorded at each checkpoint. Stream ids keep the two generators on
    // disjoint substreams.
    let maxima: Vec<(Vec<f64>, Vec<f64>)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let one = |stream: u64, gen: &DistributionSpec| -> Vec<f64> {
                let mut rng = replication_rng(seed, stream);
                let sampler = gen.sampler().expect("generator validated above");
                let mut state = DbelState::new(delta).expect("delta validated by caller");
                let mut running = 0.0f64;
                let mut out = Vec::with_capacity(checkpoints.len());
                let mut next = 0;
                for n in 1..=n_max {
                    state.push(sampler.sample(&mut rng)).expect("finite draw");
                    running = running.max(state.log_vn());
                    if n == checkpoints[next] {
                        out.push(running);
                        next += 1;
                    }
                }
                out
            };
            (one(2 * rep, null_gen), one(2 * rep + 1, alt_gen))
        })
        .collect();

    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &max_n)| {
            let threshold = (max_n as f64).powf(gamma);
            let null_hits = maxima.iter().filter(|(nul, _)| nul[i] > threshold).count();
            let alt_hits = maxima.iter().filter(|(_, alt)| alt[i] > threshold).count();
            ConsistencyRow {
                max_n,
                threshold,
                null_fraction: null_hits as f64 / reps as f64,
                alt_fraction: alt_hits as f64 / reps as f64,
            }
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbel::dbel_log_statistic;
    use approx::assert_relative_eq;

    fn dbel_policy(max_n: usize, critical: f64) -> StoppingPolicy {
        StoppingPolicy::new(TestKind::Dbel, max_n, 0.05, critical).unwrap()
    }

    #[test]
    fn policy_validation() {
        assert!(StoppingPolicy::new(TestKind::Dbel, 0, 0.05, 1.0).is_err());
        assert!(StoppingPolicy::new(TestKind::Dbel, 10, 0.0, 1.0).is_err());
        assert!(StoppingPolicy::new(TestKind::Dbel, 10, 1.0, 1.0).is_err());
        assert!(StoppingPolicy::new(TestKind::Dbel, 10, 0.05, f64::NAN).is_err());
        assert!(StoppingPolicy::with_delta(TestKind::Dbel, 10, 0.05, 1.0, 0.3).is_err());
    }

    #[test]
    fn dbel_first_three_steps_are_zero() {
        let mut state = MonitorState::new(dbel_policy(15, 4.288)).unwrap();
        for (i, z) in [0.7, -1.3, 2.1].into_iter().enumerate() {
            let p = state.feed(z).unwrap();
            assert_eq!(p.n, i + 1);
            assert_eq!(p.statistic, 0.0);
            assert_eq!(p.decision, Decision::Continue);
        }
    }

    #[test]
    fn ssrt_statistic_at_n4() {
        let mut state =
            MonitorState::new(StoppingPolicy::new(TestKind::Ssrt, 25, 0.05, 9.9).unwrap())
                .unwrap();
        let mut last = None;
        for z in [1.0, 2.0, 3.0, 4.0] {
            last = Some(state.feed(z).unwrap());
        }
        assert_relative_eq!(
            last.unwrap().statistic,
            5.0 / 7.5f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn exhaustion_accepts_at_max_n() {
        let policy = dbel_policy(6, 1e6);
        let sample = DifferenceSample::new(vec![0.3, -0.4, 1.0, -1.1, 0.2, 0.9]).unwrap();
        let out = run_to_completion(policy, &sample).unwrap();
        assert_eq!(out.stopped_at, 6);
        assert!(!out.rejected);
        assert!(out.is_conclusive());
        assert_eq!(out.trajectory.last().unwrap().decision, Decision::AcceptStop);
    }

    #[test]
    fn short_stream_is_inconclusive() {
        let policy = dbel_policy(10, 1e6);
        let sample = DifferenceSample::new(vec![0.3, -0.4]).unwrap();
        let out = run_to_completion(policy, &sample).unwrap();
        assert_eq!(out.stopped_at, 2);
        assert!(!out.rejected);
        assert!(!out.is_conclusive());
    }

    #[test]
    fn feeding_after_stop_errors() {
        let mut state = MonitorState::new(dbel_policy(1, 1e6)).unwrap();
        let p = state.feed(0.5).unwrap();
        assert_eq!(p.decision, Decision::AcceptStop);
        assert!(matches!(state.feed(0.1), Err(Error::State(_))));
    }

    #[test]
    fn nan_feed_errors() {
        let mut state = MonitorState::new(dbel_policy(5, 1e6)).unwrap();
        assert!(matches!(
            state.feed(f64::NAN),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn run_matches_elementwise_feed() {
        let policy = dbel_policy(12, 2.0);
        let z = vec![0.4, -1.2, 2.2, 0.9, -0.3, 1.7, 0.05, -2.4, 3.3, 0.6, 0.1, -0.9];
        let sample = DifferenceSample::new(z.clone()).unwrap();
        let batch = run_to_completion(policy, &sample).unwrap();

        let mut state = MonitorState::new(policy).unwrap();
        for &v in &z {
            if state.is_stopped() {
                break;
            }
            state.feed(v).unwrap();
        }
        assert_eq!(batch, state.into_outcome());
    }

    #[test]
    fn trajectory_max_equals_retrospective_maximum() {
        // The running maximum over the trajectory must equal the maximum of
        // the batch statistic over all prefixes (with 0 for n <= 3).
        let z = vec![0.4, -1.2, 2.2, 0.9, -0.3, 1.7, 0.05, -2.4, 3.3, 0.6];
        let policy = dbel_policy(z.len(), 1e6);
        let sample = DifferenceSample::new(z.clone()).unwrap();
        let out = run_to_completion(policy, &sample).unwrap();
        let traj_max = out
            .trajectory
            .iter()
            .map(|p| p.statistic)
            .fold(f64::NEG_INFINITY, f64::max);

        let mut retro = 0.0f64;
        for n in 1..=z.len() {
            let prefix = DifferenceSample::new(z[..n].to_vec()).unwrap();
            retro = retro.max(dbel_log_statistic(&prefix, DEFAULT_DELTA).unwrap().log_vn);
        }
        assert_eq!(traj_max, retro);
    }

    #[test]
    fn lowering_critical_never_delays_stopping() {
        let z = vec![1.4, 1.2, 2.2, 0.9, 0.3, 1.7, 0.05, 2.4, 3.3, 0.6];
        let sample = DifferenceSample::new(z).unwrap();
        let mut prev_stop = None;
        let mut prev_rejected = false;
        // Sweep the boundary downward.
        for critical in [5.0, 3.0, 2.0, 1.0, 0.5] {
            let out = run_to_completion(dbel_policy(10, critical), &sample).unwrap();
            if let Some(prev) = prev_stop {
                assert!(out.stopped_at <= prev);
            }
            if prev_rejected {
                assert!(out.rejected);
            }
            prev_stop = Some(out.stopped_at);
            prev_rejected = out.rejected;
        }
    }

    #[test]
    fn consistency_check_validates_gamma() {
        let norm = DistributionSpec::Normal(0.0, 1.0);
        assert!(
            empirical_consistency_check(&[10], 0.5, 10, &norm, &norm, DEFAULT_DELTA, 1).is_err()
        );
        assert!(
            empirical_consistency_check(&[10], 1.0, 10, &norm, &norm, DEFAULT_DELTA, 1).is_err()
        );
    }

    #[test]
    fn consistency_threshold_arithmetic() {
        let norm = DistributionSpec::Normal(0.0, 1.0);
        let rows = empirical_consistency_check(
            &[25],
            0.95,
            5,
            &norm,
            &DistributionSpec::Normal(1.0, 1.0),
            DEFAULT_DELTA,
            7,
        )
        .unwrap();
        assert_relative_eq!(rows[0].threshold, 25f64.powf(0.95), max_relative = 1e-15);
    }
}
