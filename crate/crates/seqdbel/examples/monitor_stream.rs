//! Monitor a trial as paired observations arrive one at a time.
//!
//! A DBEL stopping policy with horizon N = 25 watches a stream of
//! differences with a genuine treatment effect. The statistic is zero for
//! the first three observations, then climbs until it crosses the
//! boundary and the trial stops early.
//!
//!     cargo run --release --example monitor_stream

use rand_distr::Distribution;
use seqdbel::mc::replication_rng;
use seqdbel::{Decision, DistributionSpec, MonitorState, StoppingPolicy, TestKind};

fn main() -> seqdbel::Result<()> {
    // Critical value for (dbel, N = 25, alpha = 0.05), 25k replications.
    let policy = StoppingPolicy::new(TestKind::Dbel, 25, 0.05, 4.482)?;
    let mut monitor = MonitorState::new(policy)?;

    // Pre/post pairs with a shifted, skewed response.
    let mut rng = replication_rng(42, 0);
    let pre = DistributionSpec::LogNormal(0.0, 1.0).sampler()?;
    let post = DistributionSpec::Uniform(1.0, 2.0).sampler()?;

    println!("{:>3}  {:>10}  {:>9}  decision", "n", "statistic", "critical");
    loop {
        let (x, y) = (pre.sample(&mut rng), post.sample(&mut rng));
        let point = monitor.feed(x - y)?;
        println!(
            "{:>3}  {:>10.4}  {:>9.3}  {:?}",
            point.n, point.statistic, point.critical, point.decision
        );
        if point.decision != Decision::Continue {
            break;
        }
    }

    let outcome = monitor.outcome();
    println!(
        "\nstopped at n = {} with H0 {}",
        outcome.stopped_at,
        if outcome.rejected { "rejected" } else { "not rejected" }
    );
    Ok(())
}
