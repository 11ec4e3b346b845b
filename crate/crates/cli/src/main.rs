//! `wpnoma` command-line front end.
//!
//! Exit codes: 0 on success, 1 on bad input (arguments, files, JSON),
//! 2 when a solver fails on a valid instance.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wpnoma::baseline_tdma::{tdma_common_at, tdma_sum_at};
use wpnoma::examples::try_example_instance;
use wpnoma::io::{InstanceDocument, SchemeRecord};
use wpnoma::model::{rates_for_order, region_boundary};
use wpnoma::numerics::SubgradientConfig;
use wpnoma::schedulers::{optimal_transmit_fraction, scheme_a_at, scheme_b, scheme_b_at, solve_scheme};
use wpnoma::sim::{run_experiment_with_workers, write_aggregate_csv, write_trials_csv, ChannelModelParams, ExperimentConfig};
use wpnoma::timeshare::{all_permutations, solve_minrate_full};
use wpnoma::{NetworkInstance, Scheme, TimeShareMode, TimeShareSchedule};

const WORKERS_ENV: &str = "WPT_NOMA_WORKERS";
const EXAMPLE_BOUNDARY_SAMPLES: usize = 11;
const EXAMPLE_COMPARISON_T: f64 = 0.54;

#[derive(Parser)]
#[command(name = "wpnoma", version, about = "Time allocation and SIC scheduling for wireless-powered uplink NOMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scheme on an instance file and print the result as JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Evaluate at this T instead of optimizing it (schemes a, b and the TDMA baselines).
        #[arg(long = "T", value_name = "T")]
        t: Option<f64>,
    },
    /// Print the report for a built-in example as JSON.
    Example {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        id: u8,
    },
    /// Print rate-region boundary points as CSV (N <= 3).
    Region {
        instance: PathBuf,
        /// Transmit fraction; defaults to the sum-throughput optimum.
        #[arg(long = "T", value_name = "T")]
        t: Option<f64>,
        /// Points per edge of the dominant face, corners included.
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Run a Monte Carlo experiment and write per-trial and aggregate CSVs.
    Montecarlo {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    A,
    B,
    C,
    D,
    TdmaSum,
    TdmaCommon,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::A => Scheme::A,
            SchemeArg::B => Scheme::B,
            SchemeArg::C => Scheme::C,
            SchemeArg::D => Scheme::D,
            SchemeArg::TdmaSum => Scheme::TdmaSum,
            SchemeArg::TdmaCommon => Scheme::TdmaCommon,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Greedy,
}

impl From<ModeArg> for TimeShareMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => TimeShareMode::Full,
            ModeArg::Greedy => TimeShareMode::Greedy,
        }
    }
}

enum Failure {
    Input(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 2,
        }
    }
}

fn solver(e: wpnoma::Error) -> Failure {
    Failure::Solver(e.to_string())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| {
        let message = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = message.strip_suffix(&suffix).unwrap_or(&message);
        Failure::Input(format!("{}:{}:{}: {message}", path.display(), e.line(), e.column()))
    })
}

fn load_instance(path: &Path) -> Result<NetworkInstance, Failure> {
    let doc: InstanceDocument = parse_json(path)?;
    doc.to_instance(&ChannelModelParams::default()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn check_fraction(t: f64) -> Result<f64, Failure> {
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(Failure::Input(format!("--T must lie strictly between 0 and 1, got {t}")))
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Solver(e.to_string()))?;
    emit(&format!("{text}\n"))
}

fn cmd_solve(path: &Path, scheme: Scheme, mode: TimeShareMode, t: Option<f64>) -> Result<(), Failure> {
    let instance = load_instance(path)?;
    let config = SubgradientConfig::default();
    let result = match t {
        None => solve_scheme(&instance, scheme, mode, &config),
        Some(t) => {
            let t = check_fraction(t)?;
            match scheme {
                Scheme::A => scheme_a_at(&instance, t),
                Scheme::B => scheme_b_at(&instance, t, mode),
                Scheme::TdmaSum => Ok(tdma_sum_at(&instance, t).into_scheme_result(scheme)),
                Scheme::TdmaCommon => Ok(tdma_common_at(&instance, t).into_scheme_result(scheme)),
                Scheme::C | Scheme::D => {
                    return Err(Failure::Input(format!("--T does not apply to scheme {scheme}, which optimizes T")))
                }
            }
        }
    }
    .map_err(solver)?;
    print_json(&SchemeRecord::from(&result))
}

#[derive(Serialize)]
struct Corner {
    order: Vec<usize>,
    rates: Vec<f64>,
}

#[derive(Serialize)]
struct EqualPoint {
    rate: f64,
    rates: Vec<f64>,
    schedule: Option<TimeShareSchedule>,
}

#[derive(Serialize)]
struct Comparison {
    #[serde(rename = "T")]
    t: f64,
    max_min_rate: f64,
    exceeds_optimum_t: bool,
}

#[derive(Serialize)]
struct ExampleReport {
    id: u8,
    #[serde(rename = "T_star")]
    t_star: f64,
    sum_throughput: f64,
    corners: Vec<Corner>,
    equal_point: EqualPoint,
    common_rate: SchemeRecord,
    boundary: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

fn cmd_example(id: u8) -> Result<(), Failure> {
    let instance = try_example_instance(id).map_err(|e| Failure::Input(e.to_string()))?;
    let t_star = optimal_transmit_fraction(&instance).map_err(solver)?;
    let weights = instance.snr_weights();
    let corners = all_permutations(instance.len())
        .into_iter()
        .map(|order| {
            let zero: Vec<usize> = order.iter().map(|u| u - 1).collect();
            Corner { rates: rates_for_order(&weights, t_star, &zero), order }
        })
        .collect();
    let b = scheme_b(&instance, TimeShareMode::Full).map_err(solver)?;
    let d = solve_scheme(&instance, Scheme::D, TimeShareMode::Full, &SubgradientConfig::default()).map_err(solver)?;
    let comparison = if id == 2 {
        let at_star = solve_minrate_full(&instance, t_star).map_err(solver)?.min_rate;
        let max_min_rate = solve_minrate_full(&instance, EXAMPLE_COMPARISON_T).map_err(solver)?.min_rate;
        Some(Comparison { t: EXAMPLE_COMPARISON_T, max_min_rate, exceeds_optimum_t: max_min_rate > at_star })
    } else {
        None
    };
    print_json(&ExampleReport {
        id,
        t_star,
        sum_throughput: b.allocation.sum_rate(),
        corners,
        equal_point: EqualPoint { rate: b.objective, rates: b.allocation.rates.clone(), schedule: b.allocation.schedule },
        common_rate: SchemeRecord::from(&d),
        boundary: region_boundary(&instance, t_star, EXAMPLE_BOUNDARY_SAMPLES).map_err(solver)?,
        comparison,
    })
}

fn cmd_region(path: &Path, t: Option<f64>, samples: usize) -> Result<(), Failure> {
    let instance = load_instance(path)?;
    let t = match t {
        Some(t) => check_fraction(t)?,
        None => optimal_transmit_fraction(&instance).map_err(solver)?,
    };
    let points = region_boundary(&instance, t, samples).map_err(|e| Failure::Input(e.to_string()))?;
    let header: Vec<String> = (1..=instance.len()).map(|i| format!("R{i}")).collect();
    let mut text = header.join(",") + "\n";
    for p in points {
        let row: Vec<String> = p.iter().map(|r| r.to_string()).collect();
        text += &(row.join(",") + "\n");
    }
    emit(&text)
}

fn workers_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Input(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn cmd_montecarlo(config_path: &Path, out: &Path) -> Result<(), Failure> {
    let config: ExperimentConfig = parse_json(config_path)?;
    config.validate().map_err(|e| Failure::Input(format!("{}: {e}", config_path.display())))?;
    let workers = workers_from_env()?;
    fs::create_dir_all(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    let create = |name: &str| {
        let path = out.join(name);
        fs::File::create(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    };
    let (trials_file, aggregate_file) = (create("trials.csv")?, create("aggregate.csv")?);
    let output = run_experiment_with_workers(&config, workers).map_err(solver)?;
    write_trials_csv(trials_file, &output.records).map_err(|e| Failure::Input(e.to_string()))?;
    write_aggregate_csv(aggregate_file, &output.aggregates).map_err(|e| Failure::Input(e.to_string()))?;
    let mut summary = String::new();
    for row in &output.aggregates {
        let greedy = row.mean_greedy_iterations.map_or_else(|| "-".to_string(), |g| format!("{g:.3}"));
        summary += &format!(
            "scheme={} N={} P0={}dBm mean_objective={:.6} mean_T={:.6} mean_jain={:.6} mean_ee={:.6e} greedy_iters={} trials={}\n",
            row.scheme,
            row.n_users,
            row.p0_dbm,
            row.mean_objective,
            row.mean_transmit_fraction,
            row.mean_jain,
            row.mean_energy_efficiency,
            greedy,
            row.trials
        );
    }
    emit(&summary)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { instance, scheme, mode, t } => cmd_solve(&instance, scheme.into(), mode.into(), t),
        Command::Example { id } => cmd_example(id),
        Command::Region { instance, t, samples } => cmd_region(&instance, t, samples),
        Command::Montecarlo { config, out } => cmd_montecarlo(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Solver(m) => eprintln!("solver error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
