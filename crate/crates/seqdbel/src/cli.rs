//! Command-line front end.
//!
//! Four subcommands cover the workflow: `tabulate` writes critical-value
//! tables, `monitor` applies a stopping rule to a live stream of paired
//! observations, `simulate` estimates power/ASN for scenario files, and
//! `bootstrap` resamples a fixed data set. Output is machine-first (JSON
//! or CSV); `monitor --pretty` switches to human-readable lines.
//!
//! Exit codes: `0` success, `2` usage/validation/input errors, `3` when a
//! monitored stream ends before the horizon without a stop decision.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dbel::DEFAULT_DELTA;
use crate::error::{Error, Result};
use crate::mc;
use crate::sample::DifferenceSample;
use crate::scenario::ScenarioSpec;
use crate::sequential::{Decision, MonitorState, StoppingPolicy, TestKind};
use crate::table::{CriticalValueTable, QuantileMethod};

/// Mixed into `--seed` to derive the seed of implicit tabulations, so the
/// critical-value replications never share substreams with the study that
/// consumes them.
const TAB_SEED_MIX: u64 = 0xd1b5_4a32_d192_ed03;

#[derive(Parser)]
#[command(
    name = "seqdbel",
    version,
    about = "Sequential distribution-free tests for treatment effects on paired data"
)]
struct Cli {
    /// Worker threads for Monte Carlo commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate exact critical values by Monte Carlo.
    Tabulate(TabulateArgs),
    /// Apply a stopping rule to a stream of observations from stdin.
    Monitor(MonitorArgs),
    /// Estimate power and average sample number for scenario files.
    Simulate(SimulateArgs),
    /// Resample a fixed data set and report rejection rates per horizon.
    Bootstrap(BootstrapArgs),
}

#[derive(Args)]
struct TabulateArgs {
    /// Which test to tabulate: dbel or ssrt.
    #[arg(long)]
    test: TestKind,
    /// Maximum sample size N (repeat for a multi-horizon table).
    #[arg(long = "max-n", required = true)]
    max_n: Vec<usize>,
    /// Significance level (repeatable).
    #[arg(long, default_values_t = [0.05])]
    alpha: Vec<f64>,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 25_000)]
    reps: u64,
    /// RNG seed; echoed in the output for reproducibility.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Window exponent of the DBEL statistic.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Upper-percentile estimator: type7 (interpolating) or order.
    #[arg(long, default_value = "type7")]
    quantile: QuantileMethod,
    /// Write the JSON table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    /// One difference per line.
    Diffs,
    /// Comma-separated "x,y" pairs; the difference is x - y.
    Pairs,
}

#[derive(Args)]
struct MonitorArgs {
    /// Which test drives the stopping rule.
    #[arg(long)]
    test: TestKind,
    /// Critical value to compare against.
    #[arg(long, conflicts_with = "table")]
    critical: Option<f64>,
    /// JSON table produced by `tabulate`; the entry at (--max-n, --alpha)
    /// supplies the critical value.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Maximum sample size N.
    #[arg(long = "max-n")]
    max_n: usize,
    /// Significance level of the boundary.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Window exponent; must match the table when one is supplied.
    #[arg(long)]
    delta: Option<f64>,
    /// Input line format.
    #[arg(long, value_enum, default_value_t = InputFormat::Diffs)]
    format: InputFormat,
    /// Interpret differences as y - x (or negate supplied z values).
    #[arg(long)]
    negate: bool,
    /// Human-readable lines instead of JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML file (repeatable).
    #[arg(long, required = true)]
    scenario: Vec<PathBuf>,
    /// Critical-value table (repeatable, one per test); tests without a
    /// table are tabulated on the fly.
    #[arg(long)]
    table: Vec<PathBuf>,
    /// Tests to run.
    #[arg(long, value_delimiter = ',', default_values_t = [TestKind::Dbel, TestKind::Ssrt])]
    tests: Vec<TestKind>,
    /// Monte Carlo replications per scenario.
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    /// RNG seed; echoed in every output row.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replications for implicit tabulations.
    #[arg(long, default_value_t = 25_000)]
    tab_reps: u64,
    /// Window exponent for implicit DBEL tabulations.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct BootstrapArgs {
    /// CSV of differences (one value per line) or "x,y" pairs.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated horizons, e.g. 15,25,35.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Resampling replications per horizon.
    #[arg(long, default_value_t = 5_000)]
    reps: u64,
    /// RNG seed; echoed in every output row.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Resample with replacement (on) or draw distinct subjects (off).
    #[arg(long, default_value = "off", value_parser = parse_on_off, action = clap::ArgAction::Set)]
    replacement: bool,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Tests to run.
    #[arg(long, value_delimiter = ',', default_values_t = [TestKind::Dbel, TestKind::Ssrt])]
    tests: Vec<TestKind>,
    /// Critical-value table (repeatable, one per test); tests without a
    /// table are tabulated on the fly.
    #[arg(long)]
    table: Vec<PathBuf>,
    /// Replications for implicit tabulations.
    #[arg(long, default_value_t = 25_000)]
    tab_reps: u64,
    /// Window exponent for implicit DBEL tabulations.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Interpret pair differences as y - x (or negate supplied z values).
    #[arg(long)]
    negate: bool,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

fn parse_on_off(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        other => Err(format!("expected 'on' or 'off', got '{other}'")),
    }
}

/// Parses the arguments, runs the selected command and maps errors to the
/// documented exit codes.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };

    let dispatch = |command: Command| -> Result<u8> {
        match command {
            Command::Tabulate(args) => cmd_tabulate(args),
            Command::Monitor(args) => cmd_monitor(args),
            Command::Simulate(args) => cmd_simulate(args),
            Command::Bootstrap(args) => cmd_bootstrap(args),
        }
    };

    let outcome = match cli.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
            match pool {
                Ok(pool) => pool.install(|| dispatch(cli.command)),
                Err(e) => Err(Error::invalid(format!("--threads: {e}"))),
            }
        }
        None => dispatch(cli.command),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_tabulate(args: TabulateArgs) -> Result<u8> {
    let table = mc::tabulate_table(
        args.test,
        &args.max_n,
        &args.alpha,
        args.reps,
        args.seed,
        args.delta,
        args.quantile,
    )?;
    let json = table.to_json()?;
    match args.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(0)
}

#[derive(Serialize)]
struct MonitorRecord {
    n: usize,
    test: TestKind,
    statistic: f64,
    critical: f64,
    decision: Decision,
}

#[derive(Serialize)]
struct MonitorSummary {
    stopped_at: usize,
    rejected: bool,
}

fn monitor_policy(args: &MonitorArgs) -> Result<StoppingPolicy> {
    let (critical, table_delta) = match (&args.table, args.critical) {
        (Some(path), None) => {
            let table = CriticalValueTable::load(path)?;
            if table.test != args.test {
                return Err(Error::config(format!(
                    "table was tabulated for test '{}', not '{}'",
                    table.test, args.test
                )));
            }
            let critical = table.lookup(args.max_n, args.alpha).ok_or_else(|| {
                Error::config(format!(
                    "table has no entry for N = {}, alpha = {}",
                    args.max_n, args.alpha
                ))
            })?;
            (critical, table.delta)
        }
        (None, Some(critical)) => (critical, None),
        (None, None) => {
            return Err(Error::invalid("either --critical or --table is required"));
        }
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    let delta = match (table_delta, args.delta) {
        (Some(t), Some(d)) if t != d => {
            return Err(Error::config(format!(
                "--delta {d} conflicts with the table's delta {t}"
            )));
        }
        (Some(t), _) => t,
        (None, Some(d)) => d,
        (None, None) => DEFAULT_DELTA,
    };
    StoppingPolicy::with_delta(args.test, args.max_n, args.alpha, critical, delta)
}

fn parse_monitor_line(line: &str, format: InputFormat, negate: bool, line_no: usize) -> Result<f64> {
    let parse = |field: &str| -> Result<f64> {
        let v: f64 = field.trim().parse().map_err(|_| Error::ParseLine {
            line: line_no,
            msg: format!("cannot parse '{}' as a number", field.trim()),
        })?;
        if !v.is_finite() {
            return Err(Error::ParseLine {
                line: line_no,
                msg: format!("non-finite value '{}'", field.trim()),
            });
        }
        Ok(v)
    };
    let z = match format {
        InputFormat::Diffs => parse(line)?,
        InputFormat::Pairs => {
            let mut fields = line.split(',');
            let (x, y) = match (fields.next(), fields.next(), fields.next()) {
                (Some(x), Some(y), None) => (parse(x)?, parse(y)?),
                _ => {
                    return Err(Error::ParseLine {
                        line: line_no,
                        msg: "expected exactly two comma-separated values 'x,y'".into(),
                    });
                }
            };
            x - y
        }
    };
    Ok(if negate { -z } else { z })
}

fn cmd_monitor(args: MonitorArgs) -> Result<u8> {
    let policy = monitor_policy(&args)?;
    let mut state = MonitorState::new(policy)?;

    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    for (idx, line) in stdin.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let z = parse_monitor_line(trimmed, args.format, args.negate, idx + 1)?;
        let point = state.feed(z)?;
        if args.pretty {
            writeln!(
                out,
                "n={:<4} statistic={:<12.6} critical={:<12.6} {}",
                point.n,
                point.statistic,
                point.critical,
                match point.decision {
                    Decision::Continue => "continue",
                    Decision::RejectStop => "reject and stop",
                    Decision::AcceptStop => "accept and stop",
                }
            )?;
        } else {
            let record = MonitorRecord {
                n: point.n,
                test: policy.test,
                statistic: point.statistic,
                critical: point.critical,
                decision: point.decision,
            };
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
        out.flush()?;
        if state.is_stopped() {
            break; // remaining input is ignored
        }
    }

    let outcome = state.outcome();
    if args.pretty {
        writeln!(
            out,
            "stopped_at={} rejected={}",
            outcome.stopped_at, outcome.rejected
        )?;
    } else {
        let summary = MonitorSummary {
            stopped_at: outcome.stopped_at,
            rejected: outcome.rejected,
        };
        writeln!(out, "{}", serde_json::to_string(&summary)?)?;
    }
    out.flush()?;

    Ok(if outcome.is_conclusive() { 0 } else { 3 })
}

fn dedup_tests(tests: &[TestKind]) -> Vec<TestKind> {
    let mut seen = Vec::new();
    for &t in tests {
        if !seen.contains(&t) {
            seen.push(t);
        }
    }
    seen
}

/// Loads the user-supplied tables and tabulates one for every requested
/// test that lacks one. `grid` lists every `(N, alpha)` the study needs.
fn resolve_tables(
    tests: &[TestKind],
    table_paths: &[PathBuf],
    grid: &(Vec<usize>, Vec<f64>),
    tab_reps: u64,
    tab_seed: u64,
    delta: f64,
) -> Result<Vec<CriticalValueTable>> {
    let loaded: Vec<CriticalValueTable> = table_paths
        .iter()
        .map(CriticalValueTable::load)
        .collect::<Result<_>>()?;
    tests
        .iter()
        .map(|&test| {
            if let Some(table) = loaded.iter().find(|t| t.test == test) {
                return Ok(table.clone());
            }
            mc::tabulate_table(
                test,
                &grid.0,
                &grid.1,
                tab_reps,
                tab_seed,
                delta,
                QuantileMethod::Type7,
            )
        })
        .collect()
}

#[derive(Serialize)]
struct SimRow<'a> {
    scenario: &'a str,
    test: TestKind,
    max_n: usize,
    alpha: f64,
    power: f64,
    asn: f64,
    reps: u64,
    seed: u64,
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let scenarios: Vec<ScenarioSpec> = args
        .scenario
        .iter()
        .map(ScenarioSpec::load)
        .collect::<Result<_>>()?;
    let tests = dedup_tests(&args.tests);
    if tests.is_empty() {
        return Err(Error::invalid("at least one test is required"));
    }

    let mut ns: Vec<usize> = scenarios.iter().map(|s| s.max_n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut alphas: Vec<f64> = scenarios.iter().map(|s| s.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();

    let tables = resolve_tables(
        &tests,
        &args.table,
        &(ns, alphas),
        args.tab_reps,
        args.seed ^ TAB_SEED_MIX,
        args.delta,
    )?;
    let table_refs: Vec<&CriticalValueTable> = tables.iter().collect();

    let mut rows = Vec::new();
    for scenario in &scenarios {
        for result in mc::power_study(scenario, &table_refs, args.reps, args.seed)? {
            rows.push((scenario.name.clone(), result));
        }
    }

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let sim_rows: Vec<SimRow> = rows
        .iter()
        .map(|(name, r)| SimRow {
            scenario: name,
            test: r.test,
            max_n: r.scenario.max_n,
            alpha: r.scenario.alpha,
            power: r.power,
            asn: r.asn,
            reps: r.reps,
            seed: r.seed,
        })
        .collect();
    match args.format {
        OutputFormat::Csv => {
            writeln!(out, "scenario,test,max_n,alpha,power,asn,reps,seed")?;
            for r in &sim_rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.scenario, r.test, r.max_n, r.alpha, r.power, r.asn, r.reps, r.seed
                )?;
            }
        }
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&sim_rows)?)?,
    }
    Ok(0)
}

/// Reads a data file of differences (one column) or pairs (two columns).
fn load_difference_file(path: &PathBuf, negate: bool) -> Result<DifferenceSample> {
    let contents = std::fs::read_to_string(path)?;
    let mut z = Vec::new();
    for (idx, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let value = match fields.as_slice() {
            [single] => parse_field(single, idx + 1)?,
            [x, y] => parse_field(x, idx + 1)? - parse_field(y, idx + 1)?,
            _ => {
                return Err(Error::ParseLine {
                    line: idx + 1,
                    msg: format!("expected 1 or 2 columns, found {}", fields.len()),
                });
            }
        };
        z.push(if negate { -value } else { value });
    }
    DifferenceSample::new(z)
}

fn parse_field(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::ParseLine {
        line,
        msg: format!("cannot parse '{}' as a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::ParseLine {
            line,
            msg: format!("non-finite value '{}'", field.trim()),
        });
    }
    Ok(v)
}

#[derive(Serialize)]
struct BootstrapOutRow {
    max_n: usize,
    test: TestKind,
    rejection_rate: f64,
    asn: f64,
    reps: u64,
    seed: u64,
}

fn cmd_bootstrap(args: BootstrapArgs) -> Result<u8> {
    let data = load_difference_file(&args.data, args.negate)?;
    let tests = dedup_tests(&args.tests);
    if tests.is_empty() {
        return Err(Error::invalid("at least one test is required"));
    }
    for &n in &args.n_list {
        if n >= data.n() {
            return Err(Error::invalid(format!(
                "--n-list value {n} must be smaller than the data size {}",
                data.n()
            )));
        }
    }

    let tables = resolve_tables(
        &tests,
        &args.table,
        &(args.n_list.clone(), vec![args.alpha]),
        args.tab_reps,
        args.seed ^ TAB_SEED_MIX,
        args.delta,
    )?;
    let table_refs: Vec<&CriticalValueTable> = tables.iter().collect();

    let rows = mc::bootstrap_study(
        &data,
        &args.n_list,
        args.reps,
        &table_refs,
        args.alpha,
        args.seed,
        args.replacement,
    )?;

    let out_rows: Vec<BootstrapOutRow> = rows
        .iter()
        .map(|r| BootstrapOutRow {
            max_n: r.max_n,
            test: r.test,
            rejection_rate: r.rejection_rate,
            asn: r.asn,
            reps: r.reps,
            seed: r.seed,
        })
        .collect();

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match args.format {
        OutputFormat::Csv => {
            writeln!(out, "max_n,test,rejection_rate,asn,reps,seed")?;
            for r in &out_rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.max_n, r.test, r.rejection_rate, r.asn, r.reps, r.seed
                )?;
            }
        }
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&out_rows)?)?,
    }
    Ok(0)
}
