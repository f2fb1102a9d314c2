//! Sequential nonparametric tests for treatment effects on paired data.
//!
//! Given paired pre/post measurements, the difference `z = x - y` is
//! symmetric about zero when the treatment has no effect. This crate
//! implements two sequential tests of that symmetry null — observations
//! are examined one at a time and the experiment stops as soon as the
//! evidence crosses a tabulated boundary:
//!
//! - the density-based empirical likelihood test ([`dbel_log_statistic`]),
//!   which approximates a likelihood-ratio statistic nonparametrically and
//!   stops when `log V_n >= c`;
//! - the sequential signed-rank test ([`signed_rank_statistic`]), the
//!   classical repeated-significance use of the standardized Wilcoxon
//!   statistic, stopping when `TS_n >= z`.
//!
//! Both statistics are distribution-free under the null, so exact critical
//! values are obtained by Monte Carlo with standard normal trajectories
//! ([`mc::tabulate_table`]). The [`mc`] module also measures power and
//! average sample number under parametric alternatives and runs
//! bootstrap-style resampling analyses of a fixed data set.
//!
//! Start with [`MonitorState`] for live monitoring, [`run_to_completion`]
//! for batch evaluation, or the `seqdbel` command-line tool. Each major
//! capability has a runnable example under `examples/`.

mod dbel;
mod error;
mod sample;
mod signed_rank;

pub mod cli;
pub mod dist;
pub mod mc;
pub mod oracle;
pub mod scenario;
pub mod sequential;
pub mod table;

pub use dbel::{dbel_log_statistic, delta_jm, DbelEvaluation, DbelState, MGrid, DEFAULT_DELTA};
pub use error::{Error, Result};
pub use sample::{DifferenceSample, SortedDifferences};
pub use sequential::{
    empirical_consistency_check, run_to_completion, ConsistencyRow, Decision, MonitorState,
    SequentialOutcome, StoppingPolicy, TestKind, TrajectoryPoint,
};
pub use signed_rank::{signed_rank_statistic, SignedRankEvaluation, SignedRankState};

pub use dist::DistributionSpec;
pub use scenario::ScenarioSpec;
pub use table::{CriticalValueEntry, CriticalValueTable, QuantileMethod};
