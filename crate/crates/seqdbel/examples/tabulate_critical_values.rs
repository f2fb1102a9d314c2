//! Tabulate exact critical values for both sequential tests by Monte
//! Carlo and print the resulting JSON table.
//!
//! Both statistics are distribution-free under the symmetry null, so the
//! trajectories are drawn from a standard normal. Replications here are
//! kept small so the example runs in seconds; production tables use the
//! 25,000-replication default of the `tabulate` subcommand.
//!
//!     cargo run --release --example tabulate_critical_values

use seqdbel::mc::tabulate_table;
use seqdbel::{QuantileMethod, TestKind};

fn main() -> seqdbel::Result<()> {
    let horizons = [15, 25, 50];
    let alphas = [0.05, 0.10];
    let reps = 5_000;
    let seed = 2;

    for test in [TestKind::Dbel, TestKind::Ssrt] {
        let table = tabulate_table(
            test,
            &horizons,
            &alphas,
            reps,
            seed,
            seqdbel::DEFAULT_DELTA,
            QuantileMethod::Type7,
        )?;
        println!("--- {test} ---");
        for e in &table.entries {
            println!("N = {:>3}  alpha = {:<5}  critical = {:.3}", e.max_n, e.alpha, e.critical);
        }
        println!("\nJSON form:\n{}\n", table.to_json()?);
    }
    Ok(())
}
