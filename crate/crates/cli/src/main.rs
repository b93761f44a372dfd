mod bench;
mod report;
mod workload;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcbtree::analysis::{tightness, to_dot, tree_stats, worst_case_tree, TightnessReport, TreeStats};
use gcbtree::params::script_b;
use gcbtree::{domain_check, Algorithm, BalanceParams, TreeError};
use serde::Serialize;

use crate::report::{RunReport, RunRow};
use crate::workload::GenKind;

pub const CSV_VERSION: &str = "#v1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Tree(#[from] TreeError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Tree(TreeError::Domain { .. }) => 3,
            CliError::Tree(_) => 1,
            CliError::Parse(_) | CliError::Io { .. } | CliError::Output(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "gcbtree", version, about = "Grandchildren-balanced search tree harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a workload file and report shape statistics and bound checks.
    Run(RunArgs),
    /// Like `run`, with robust validation and potential tracking.
    Verify(RunArgs),
    /// Write a deterministic workload.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the worst-case tree of weight `s`.
    Worst {
        s: u64,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Emit::Stats)]
        emit: Emit,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Random-insert benchmark over parameter points, as CSV.
    Bench {
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parameter point `alpha,beta`; repeatable. Defaults to a fixed sweep.
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// A number, or `crit` for 1/sqrt(2).
    #[arg(long, default_value = "0.72")]
    alpha: String,
    /// A number, or `crit` for the smallest admissible beta at the critical alpha.
    #[arg(long, default_value = "0.50")]
    beta: String,
}

#[derive(Args)]
struct RunArgs {
    workload: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Bu)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Bu,
    Td,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Bu => Algorithm::BottomUp,
            AlgorithmArg::Td => Algorithm::TopDown,
        }
    }
}

pub fn algorithm_name(a: Algorithm) -> &'static str {
    match a {
        Algorithm::BottomUp => "bu",
        Algorithm::TopDown => "td",
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Stats,
}

fn parse_coordinate(raw: &str, critical: f64) -> Result<f64, CliError> {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("crit") {
        return Ok(critical);
    }
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Parse(format!("not a parameter value: {raw:?}")))
}

fn parse_point(alpha: &str, beta: &str) -> Result<(f64, f64), CliError> {
    Ok((
        parse_coordinate(alpha, FRAC_1_SQRT_2)?,
        parse_coordinate(beta, script_b(FRAC_1_SQRT_2))?,
    ))
}

fn params_from(args: &ParamArgs) -> Result<BalanceParams, CliError> {
    let (alpha, beta) = parse_point(&args.alpha, &args.beta)?;
    Ok(BalanceParams::new(alpha, beta)?)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Output(e.to_string()))
}

/// Versioned CSV: a `#v1` line, the fixed header, then the rows.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(format!("{CSV_VERSION}\n{}", String::from_utf8_lossy(&body)))
}

fn cmd_run(args: &RunArgs, verify: bool) -> Result<bool, CliError> {
    let params = params_from(&args.params)?;
    let text = fs::read_to_string(&args.workload)
        .map_err(|source| CliError::Io { path: args.workload.display().to_string(), source })?;
    let records = workload::parse(&text)?;
    let report: RunReport = report::run(params, args.algorithm.into(), &records, verify)?;
    let text = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => to_csv(&[RunRow::from(&report)])?,
    };
    write_output(args.output.as_ref(), &text)?;
    Ok(report.passed())
}

#[derive(Serialize)]
struct WorstReport {
    tightness: TightnessReport,
    stats: TreeStats,
    n_nodes: u64,
}

fn cmd_worst(s: u64, args: &ParamArgs, emit: Emit, format: Format, output: Option<&PathBuf>) -> Result<bool, CliError> {
    let (alpha, beta) = parse_point(&args.alpha, &args.beta)?;
    if !domain_check(alpha, beta).in_d_double_prime {
        return Err(TreeError::Domain { alpha, beta, region: "D'' (2/3 <= beta/alpha <= alpha < 3/4)" }.into());
    }
    if s == 0 {
        return Err(CliError::Parse("s must be at least 1".into()));
    }
    let params = BalanceParams::new(alpha, beta)?;
    let tree = worst_case_tree(s, &params)?;
    let (text, pass) = match emit {
        Emit::Dot => (to_dot(&tree), true),
        Emit::Stats => {
            let t = tightness(s, &params)?;
            let stats = tree_stats(&tree);
            let pass = t.height_ok && t.path_ok;
            let report = WorstReport { tightness: t, stats, n_nodes: s - 1 };
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => to_csv(&[bench::WorstRow::from(&report.tightness)])?,
            };
            (text, pass)
        }
    };
    write_output(output, &text)?;
    Ok(pass)
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(&args, false),
        Command::Verify(args) => cmd_run(&args, true),
        Command::Gen { kind, n, seed, output } => {
            let records = workload::generate(kind, n, seed);
            let kind_name = kind.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
            let header = format!("gcbtree workload v1 kind={kind_name} n={n} seed={seed} rng={}", workload::RNG_NAME);
            write_output(output.as_ref(), &workload::render(&records, &header))?;
            Ok(true)
        }
        Command::Worst { s, params, emit, format, output } => cmd_worst(s, &params, emit, format, output.as_ref()),
        Command::Bench { n, seed, points, output } => {
            let points = if points.is_empty() {
                bench::default_sweep()
            } else {
                points
                    .iter()
                    .map(|p| {
                        let (a, b) = p
                            .split_once(',')
                            .ok_or_else(|| CliError::Parse(format!("point must be alpha,beta: {p:?}")))?;
                        let (a, b) = parse_point(a, b)?;
                        Ok(BalanceParams::new(a, b)?)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?
            };
            let rows = bench::run(n, seed, &points)?;
            write_output(output.as_ref(), &to_csv(&rows)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gcbtree: a validation or bound check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gcbtree: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
