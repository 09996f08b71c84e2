//! `hdmean` command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input, 2 validation failure,
//! 3 degenerate variance estimate, 4 oracle check failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hdmean::harness::{self, CellResult, SimConfig, TablePreset};
use hdmean::power::{evaluate_request, PowerRequest};
use hdmean::{io as hio, oracle, testing, Error, TestOutcome, WeightSpec};
use serde::Serialize;

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_ORACLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hdmean",
    version,
    about = "Weighted L2-norm test for equality of high-dimensional mean vectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the test on grouped observations from a CSV file.
    Test(TestArgs),
    /// Run a Monte-Carlo size/power grid and write a CSV report.
    Simulate(SimulateArgs),
    /// Evaluate analytic power quantities from a JSON parameter file.
    Power(PowerArgs),
    /// Cross-check fast estimators against brute-force evaluations.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Data CSV: group label (1-based) followed by the coordinates.
    #[arg(long)]
    data: PathBuf,
    /// `paper-default`, `identity`, or a path to an `omega_sq,alpha` CSV.
    #[arg(long, default_value = "paper-default")]
    weights: String,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON grid configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Published table grid, e.g. `sizes1` or `powers-s1-normal`.
    #[arg(long)]
    preset: Option<String>,
    /// Report path; the report goes to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads; results do not depend on this value.
    #[arg(long, env = "HDMEAN_THREADS")]
    threads: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the significance level.
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args)]
struct PowerArgs {
    /// JSON parameter file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Serialize)]
struct TestReport {
    #[serde(flatten)]
    outcome: TestOutcome,
    n_i: Vec<usize>,
    p: usize,
    k: usize,
}

enum Failure {
    Lib(Error),
    Code(u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

fn load_weights(choice: &str, p: usize) -> hdmean::Result<WeightSpec> {
    let w = match choice {
        "paper-default" => WeightSpec::paper_default(p)?,
        "identity" => WeightSpec::identity(p)?,
        path => hio::read_weights_file(path)?,
    };
    if w.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: w.dim(),
        });
    }
    Ok(w)
}

fn cmd_test(args: &TestArgs) -> CmdResult {
    let sample = hio::read_sample_file(&args.data)?;
    let w = load_weights(&args.weights, sample.dim())?;
    let outcome = testing::run_test(&sample, &w, args.level)?;
    print_json(&TestReport {
        outcome,
        n_i: sample.counts(),
        p: sample.dim(),
        k: sample.k(),
    })?;
    if outcome.degenerate {
        return Err(Failure::Code(EXIT_DEGENERATE));
    }
    Ok(())
}

fn summary_line(row: &CellResult) -> String {
    format!(
        "{} {} p={} n*={} rho={} r={} {} rate={:.4} rejections={}/{} degenerate={}",
        row.cell.scenario.label(),
        row.cell.law.label(),
        row.cell.p,
        row.cell.n_star,
        row.cell.rho,
        row.cell.r,
        row.test.label(),
        row.rejection_rate(),
        row.rejections,
        row.replications,
        row.degenerate_count
    )
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => SimConfig::from_json(&std::fs::read_to_string(path).map_err(Error::from)?)?,
        (None, Some(id)) => id.parse::<TablePreset>()?.config(),
        (None, None) => return Err(Error::InvalidInput("give --config or --preset".into()).into()),
    };
    if let Some(reps) = args.reps {
        cfg.replications = reps;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(level) = args.level {
        cfg.level = level;
    }
    cfg.validate()?;

    // Progress lines go to stderr when the report itself is on stdout.
    let to_stdout = args.out.is_none();
    let progress = |rows: &[CellResult]| {
        for row in rows {
            // Write errors on a closed stream are ignored.
            let _ = if to_stdout {
                writeln!(std::io::stderr(), "{}", summary_line(row))
            } else {
                writeln!(std::io::stdout(), "{}", summary_line(row))
            };
        }
    };
    let report = match args.threads {
        Some(t) => harness::run_grid_on_pool(&cfg, t, progress)?,
        None => harness::run_grid_with_progress(&cfg, progress)?,
    };
    match &args.out {
        Some(path) => harness::emit_csv(&report, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            harness::write_csv(&report, &mut lock)?;
            lock.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn cmd_power(args: &PowerArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.config).map_err(Error::from)?;
    let req: PowerRequest = serde_json::from_str(&text).map_err(Error::from)?;
    print_json(&evaluate_request(&req)?)
}

fn cmd_oracle(args: &OracleArgs) -> CmdResult {
    let report = oracle::run_oracle_check(args.seed, args.trials)?;
    print_json(&report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Code(EXIT_ORACLE))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateVariance(_) => EXIT_DEGENERATE,
        e if e.is_parse() => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Power(a) => cmd_power(a),
        Command::OracleCheck(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Code(code)) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
