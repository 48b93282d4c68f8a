//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 I/O failure,
//! 3 parse or validation failure, 4 oracle size-guard refusal.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{popular_plan, random_plan, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::model::relative_gap;
use crate::oracle::{brute_force_global, global_search_size, RowShape};
use crate::planner::solve;
use crate::retention::build_z_table;
use crate::scenario_io::{
    emit_report, emit_sweep_csv, load_config, load_report, OracleVerdict, PlanReport,
    ScenarioConfig, SweepParam, OUT_DIR_ENV,
};
use crate::simulator::{simulate, ContactMode, SimConfig};
use crate::sweep::{compare, default_values, run_sweep, seed_list};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_SIZE_GUARD: i32 = 4;

/// Relative tolerance for `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "retcache", version, about = "Retention-aware proactive caching planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a caching plan and write its report.
    Plan(PlanArgs),
    /// Compare the planners while varying one parameter; writes CSV.
    Sweep(SweepArgs),
    /// Check the optimal planner against exhaustive search.
    Verify(CommonArgs),
    /// Monte Carlo estimate of a plan's download cost.
    Simulate(SimulateArgs),
    /// Run all three planners on one configuration and print a table.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario config (JSON). Defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory. Falls back to $RETCACHE_OUT_DIR, then `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PlannerChoice {
    Dp,
    Popular,
    Random,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "dp")]
    pub planner: PlannerChoice,
    /// Seed for the random planner.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record planning wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// One of H, s, alpha, gamma, lambda, delta, T, C, R. Defaults to the
    /// config's first sweep block.
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
    /// Random-baseline replications per point.
    #[arg(long, default_value_t = 30)]
    pub seeds: usize,
    /// First random-baseline seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeChoice {
    Bernoulli,
    Poisson,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Plan report to simulate. The optimal plan is computed when omitted.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "bernoulli")]
    pub mode: ModeChoice,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 30)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    run(cli, stdout, stderr)
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args, stdout),
        Command::Sweep(args) => cmd_sweep(&args, stdout),
        Command::Verify(args) => cmd_verify(&args, stdout),
        Command::Simulate(args) => cmd_simulate(&args, stdout),
        Command::Compare(args) => cmd_compare(&args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "retcache: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Parse(_) | Error::Validation(_) | Error::Domain(_) => EXIT_VALIDATION,
        Error::SearchSpaceTooLarge { .. } => EXIT_SIZE_GUARD,
    }
}

fn read_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    match &common.config {
        None => Ok(ScenarioConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Io(std::io::Error::new(
                    e.kind(),
                    format!("{}: {}", path.display(), e),
                ))
            })?;
            load_config(&text)
        }
    }
}

fn out_dir(common: &CommonArgs) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn build_report(config: &ScenarioConfig, planner: PlannerChoice, seed: u64) -> Result<PlanReport> {
    let (scenario, demand) = config.build()?;
    let z = build_z_table(&scenario, &demand)?;
    let report = match planner {
        PlannerChoice::Dp => {
            let solution = solve(&z, &scenario)?;
            PlanReport::new("dp", solution.plan, config)?
        }
        PlannerChoice::Popular => {
            PlanReport::new("popular", popular_plan(&z, &scenario, &demand)?, config)?
        }
        PlannerChoice::Random => {
            let mut report =
                PlanReport::new("random", random_plan(&z, &scenario, &demand, seed)?, config)?;
            report.seed = Some(seed);
            report.rng_algorithm = Some(RNG_ALGORITHM.to_string());
            report
        }
    };
    Ok(report)
}

fn cmd_plan(args: &PlanArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(&args.common)?;
    let start = Instant::now();
    let mut report = build_report(&config, args.planner, args.seed)?;
    if args.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let path = write_output(&out_dir(&args.common), "plan_report.json", &emit_report(&report))?;
    writeln!(
        stdout,
        "planner={} total={} download={} storage={} feasible={} report={}",
        report.planner,
        report.total_cost,
        report.download_cost,
        report.storage_cost,
        report.feasible,
        path.display()
    )?;
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(&args.common)?;
    let block = config.sweep.first();
    let param: SweepParam = match (&args.param, block) {
        (Some(name), _) => name.parse()?,
        (None, Some(b)) => b.param,
        (None, None) => {
            return Err(Error::Validation(
                "no sweep parameter: pass --param or add a sweep block to the config".into(),
            ))
        }
    };
    let values = match (&args.values, block) {
        (Some(v), _) => v.clone(),
        (None, Some(b)) if b.param == param => b.values.clone(),
        _ => default_values(param).ok_or_else(|| {
            Error::Validation(format!("no default values for {param}; pass --values"))
        })?,
    };
    if args.seeds == 0 {
        return Err(Error::Validation("--seeds must be at least 1".into()));
    }
    let rows = run_sweep(&config, param, &values, &seed_list(args.seed, args.seeds))?;
    let csv = emit_sweep_csv(&rows);
    write_output(&out_dir(&args.common), &format!("sweep_{}.csv", param.name()), &csv)?;
    stdout.write_all(csv.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &CommonArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(args)?;
    let (scenario, demand) = config.build()?;
    let size = global_search_size(&scenario);
    let (_, oracle_cost) = brute_force_global(&scenario, &demand)?;
    let z = build_z_table(&scenario, &demand)?;
    let solution = solve(&z, &scenario)?;
    let mut report = PlanReport::new("dp", solution.plan, &config)?;
    let gap = relative_gap(report.total_cost, oracle_cost);
    let agrees = gap <= VERIFY_TOLERANCE;
    report.oracle = Some(OracleVerdict {
        shape: RowShape::Any,
        search_space: size as u64,
        oracle_cost,
        dp_cost: report.total_cost,
        relative_gap: gap,
        agrees,
    });
    write_output(out_dir(args).as_path(), "verify_report.json", &emit_report(&report))?;
    writeln!(
        stdout,
        "dp={} oracle={} relative_gap={} search_space={} {}",
        report.total_cost,
        oracle_cost,
        gap,
        size,
        if agrees { "OK" } else { "MISMATCH" }
    )?;
    Ok(if agrees { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(&args.common)?;
    let mut report = match &args.plan {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let loaded = load_report(&text)?;
            let mut report = PlanReport::new(&loaded.planner, loaded.plan, &config)?;
            report.seed = loaded.seed;
            report.rng_algorithm = loaded.rng_algorithm;
            report
        }
        None => build_report(&config, PlannerChoice::Dp, 0)?,
    };
    let (scenario, demand) = config.build()?;
    let result = simulate(&SimConfig {
        scenario: &scenario,
        demand: &demand,
        plan: &report.plan,
        trials: args.trials,
        seed: args.seed,
        mode: match args.mode {
            ModeChoice::Bernoulli => ContactMode::Bernoulli,
            ModeChoice::Poisson => ContactMode::PoissonCount,
        },
    })?;
    writeln!(
        stdout,
        "empirical={} stderr={} analytic={} z={}",
        result.empirical_download_cost,
        result.standard_error,
        result.analytic_download_cost,
        result
            .z_score
            .map_or_else(|| "n/a".to_string(), |z| z.to_string())
    )?;
    report.simulation = Some(result);
    write_output(&out_dir(&args.common), "simulation_report.json", &emit_report(&report))?;
    Ok(EXIT_OK)
}

fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(&args.common)?;
    if args.seeds == 0 {
        return Err(Error::Validation("--seeds must be at least 1".into()));
    }
    let cmp = compare(&config, &seed_list(args.seed, args.seeds))?;
    let (random_mean, random_se) = cmp.random_summary();
    writeln!(stdout, "{:<10} {:>14} {:>14} {:>14} {:>10}", "planner", "total", "download", "storage", "vs dp")?;
    let line = |name: &str, total: f64, download: f64, storage: f64| {
        format!(
            "{:<10} {:>14.6} {:>14.6} {:>14.6} {:>9.2}%",
            name,
            total,
            download,
            storage,
            100.0 * (1.0 - cmp.dp.total / total)
        )
    };
    writeln!(stdout, "{}", line("dp", cmp.dp.total, cmp.dp.download, cmp.dp.storage))?;
    writeln!(
        stdout,
        "{}",
        line("popular", cmp.popular.total, cmp.popular.download, cmp.popular.storage)
    )?;
    let n = cmp.random.len() as f64;
    let rd = cmp.random.iter().map(|c| c.download).sum::<f64>() / n;
    let rs = cmp.random.iter().map(|c| c.storage).sum::<f64>() / n;
    writeln!(stdout, "{}", line("random", random_mean, rd, rs))?;
    writeln!(
        stdout,
        "random: mean over {} seeds, stderr {:.6}; generator {}",
        cmp.seeds.len(),
        random_se,
        RNG_ALGORITHM
    )?;
    Ok(EXIT_OK)
}
