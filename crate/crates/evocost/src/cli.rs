//! Command-line harness: validated parameters, experiment presets,
//! sweeps, and machine-readable output.
//!
//! Subcommands: `analytic`, `paper-example`, `simulate`, `sweep`,
//! `compare`, `blind-search`. Output is text (default), CSV with the
//! fixed [`ResultRow`] column order, or JSON with the same field names.
//! With a fixed seed every command produces byte-identical output;
//! `EVOCOST_SEED` supplies a default seed when `--seed` is absent.
//!
//! Exit codes: 0 on success, 2 for usage errors, 3 for model-constraint
//! violations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cost_model::{
    elapsed_time, evol_cost_closed_form, evol_cost_sum, lcost_linear, slowdown_ratio,
    worked_example, CostParams, CostValue, ExampleReport, ScenarioParams,
};
use crate::efficient::{empirical_slowdown, run_efficient};
use crate::error::Error;
use crate::evolution::{
    blind_search_run, compare_to_analytic, run_single, run_trials, AccountingMode,
    BlindSearchOutcome, ComparisonReport, TrialSummary, MAX_SIMULATION_RADIUS,
};
use crate::landscape::{BlockStaircaseLandscape, NeedleLandscape, MAX_LANDSCAPE_BITS};
use crate::rational::{self, parse_count, parse_rational};
use crate::seed::{landscape_seed, trial_seed};

/// Unit label applied to command-line runs.
pub const DEFAULT_UNIT: &str = "year";

#[derive(Debug, Parser)]
#[command(
    name = "evocost",
    version,
    about = "Exact cost model and Monte Carlo simulator for evolutionary search \
             on block-staircase fitness landscapes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Suppress the version banner in text output.
    #[arg(long = "no-banner", global = true)]
    pub no_banner: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form costs for one (C, R, kappa) configuration, with the
    /// term-by-term summation cross-checked against the closed form.
    Analytic(AnalyticArgs),
    /// The built-in reference configuration (C=4e8, R=30, one billion
    /// agents per generation) under both kappa calibrations.
    PaperExample,
    /// Monte Carlo hill-climbing evolution on a generated landscape.
    Simulate(SimulateArgs),
    /// Cartesian sweep over C and R lists, one row per pair.
    Sweep(SweepArgs),
    /// Simulated median versus the closed-form prediction, with the
    /// efficient-learner baseline.
    Compare(CompareArgs),
    /// Random-guess baseline on a needle landscape.
    BlindSearch(BlindSearchArgs),
}

fn parse_count_arg(s: &str) -> Result<u64, String> {
    parse_count(s).map_err(|e| e.to_string())
}

fn parse_rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Comma-separated list of exact non-negative integers; empty input is an
/// empty list.
#[derive(Debug, Clone, Default)]
pub struct CountList(pub Vec<u64>);

impl std::str::FromStr for CountList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Ok(Self(Vec::new()));
        }
        trimmed
            .split(',')
            .map(|item| parse_count(item.trim()).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    /// Agent size C in bits; exact scientific notation such as 4e8 is accepted.
    #[arg(long = "C", value_parser = parse_count_arg)]
    pub critical_size: u64,

    /// Block width / search radius R in bits. Must divide C.
    #[arg(long = "R", value_parser = parse_count_arg)]
    pub radius: u64,

    /// Cost per evaluated bit, parsed exactly: `1`, `0.6e-7`, `25/4e8`.
    #[arg(long, value_parser = parse_rational_arg, default_value = "1")]
    pub kappa: BigRational,

    /// Simultaneous agents per generation; adds elapsed-time output.
    #[arg(long, value_parser = parse_count_arg)]
    pub population: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Agent size C in bits.
    #[arg(long = "C", value_parser = parse_count_arg, required_unless_present = "landscape")]
    pub critical_size: Option<u64>,

    /// Block width R in bits; simulation requires R <= 24.
    #[arg(long = "R", value_parser = parse_count_arg, required_unless_present = "landscape")]
    pub radius: Option<u64>,

    /// Cost per evaluated bit, parsed exactly.
    #[arg(long, value_parser = parse_rational_arg, default_value = "1")]
    pub kappa: BigRational,

    /// Evaluation accounting within a generation.
    #[arg(long, value_enum, default_value_t = AccountingMode::Exhaustive)]
    pub mode: AccountingMode,

    /// Number of independent trials.
    #[arg(long, value_parser = parse_count_arg, default_value = "1001")]
    pub trials: u64,

    /// Master seed; per-trial seeds are derived deterministically.
    #[arg(long, value_parser = parse_count_arg, env = "EVOCOST_SEED", default_value = "0")]
    pub seed: u64,

    /// Simultaneous agents per generation; adds elapsed-time output.
    #[arg(long, value_parser = parse_count_arg)]
    pub population: Option<u64>,

    /// Also run the efficient learner and report the measured slowdown.
    #[arg(long)]
    pub efficient: bool,

    /// Load the landscape from a `C R seed target-bits` manifest instead
    /// of generating one.
    #[arg(long, value_name = "FILE")]
    pub landscape: Option<PathBuf>,

    /// Write the manifest of the landscape used by this run.
    #[arg(long = "save-landscape", value_name = "FILE")]
    pub save_landscape: Option<PathBuf>,

    /// Print the first trial's per-generation `i evals cost` lines
    /// (text format only).
    #[arg(long = "dump-trace")]
    pub dump_trace: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated C values; an empty list yields a header-only table.
    #[arg(long = "C", default_value = "")]
    pub critical_sizes: CountList,

    /// Comma-separated R values.
    #[arg(long = "R", default_value = "")]
    pub radii: CountList,

    /// Cost per evaluated bit, parsed exactly.
    #[arg(long, value_parser = parse_rational_arg, default_value = "1")]
    pub kappa: BigRational,

    /// Trials per cell; omit for analytic-only rows.
    #[arg(long, value_parser = parse_count_arg)]
    pub trials: Option<u64>,

    /// Master seed shared by every cell.
    #[arg(long, value_parser = parse_count_arg, env = "EVOCOST_SEED", default_value = "0")]
    pub seed: u64,

    /// Evaluation accounting used when simulating.
    #[arg(long, value_enum, default_value_t = AccountingMode::Exhaustive)]
    pub mode: AccountingMode,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Agent size C in bits.
    #[arg(long = "C", value_parser = parse_count_arg)]
    pub critical_size: u64,

    /// Block width R in bits; simulation requires R <= 24.
    #[arg(long = "R", value_parser = parse_count_arg)]
    pub radius: u64,

    /// Cost per evaluated bit, parsed exactly.
    #[arg(long, value_parser = parse_rational_arg, default_value = "1")]
    pub kappa: BigRational,

    /// Must be `paper`; the closed-form prediction models exhaustive
    /// accounting.
    #[arg(long, value_enum, default_value_t = AccountingMode::Exhaustive)]
    pub mode: AccountingMode,

    /// Number of independent trials.
    #[arg(long, value_parser = parse_count_arg, default_value = "1001")]
    pub trials: u64,

    /// Master seed; per-trial seeds are derived deterministically.
    #[arg(long, value_parser = parse_count_arg, env = "EVOCOST_SEED", default_value = "0")]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BlindSearchArgs {
    /// Code length C in bits; uncapped search requires C <= 24.
    #[arg(long = "C", value_parser = parse_count_arg)]
    pub critical_size: u64,

    /// Number of independent searches.
    #[arg(long, value_parser = parse_count_arg, default_value = "1")]
    pub runs: u64,

    /// Give up after this many guesses; reported, not an error.
    #[arg(long, value_parser = parse_count_arg)]
    pub cap: Option<u64>,

    /// Master seed; per-run seeds are derived deterministically.
    #[arg(long, value_parser = parse_count_arg, env = "EVOCOST_SEED", default_value = "0")]
    pub seed: u64,
}

/// One output row. Column set and order are fixed; absent fields emit as
/// empty CSV cells and JSON nulls. Cost and ratio columns carry both the
/// exact rational string and a float rendering.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub subcommand: String,
    #[serde(rename = "C")]
    pub c: Option<u64>,
    #[serde(rename = "R")]
    pub r: Option<u64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub kappa: Option<BigRational>,
    pub mode: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub median_cost: Option<BigRational>,
    pub median_cost_f64: Option<f64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub closed_form: Option<BigRational>,
    pub closed_form_f64: Option<f64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub predicted_median: Option<BigRational>,
    pub predicted_median_f64: Option<f64>,
    pub delta_rel: Option<f64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub slowdown_analytic: Option<BigRational>,
    pub slowdown_analytic_f64: Option<f64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub slowdown_empirical: Option<BigRational>,
    pub slowdown_empirical_f64: Option<f64>,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub elapsed_time: Option<BigRational>,
    pub elapsed_time_f64: Option<f64>,
    pub population: Option<u64>,
}

impl ResultRow {
    pub const CSV_HEADER: &'static str = "subcommand,C,R,kappa,mode,trials,seed,\
median_cost,median_cost_f64,closed_form,closed_form_f64,\
predicted_median,predicted_median_f64,delta_rel,\
slowdown_analytic,slowdown_analytic_f64,\
slowdown_empirical,slowdown_empirical_f64,\
elapsed_time,elapsed_time_f64,population";

    pub fn to_csv_line(&self) -> String {
        [
            self.subcommand.clone(),
            csv_opt(&self.c),
            csv_opt(&self.r),
            csv_opt(&self.kappa),
            csv_opt(&self.mode),
            csv_opt(&self.trials),
            csv_opt(&self.seed),
            csv_opt(&self.median_cost),
            csv_opt(&self.median_cost_f64),
            csv_opt(&self.closed_form),
            csv_opt(&self.closed_form_f64),
            csv_opt(&self.predicted_median),
            csv_opt(&self.predicted_median_f64),
            csv_opt(&self.delta_rel),
            csv_opt(&self.slowdown_analytic),
            csv_opt(&self.slowdown_analytic_f64),
            csv_opt(&self.slowdown_empirical),
            csv_opt(&self.slowdown_empirical_f64),
            csv_opt(&self.elapsed_time),
            csv_opt(&self.elapsed_time_f64),
            csv_opt(&self.population),
        ]
        .join(",")
    }
}

fn csv_opt<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn cost_pair(value: &CostValue) -> (Option<BigRational>, Option<f64>) {
    (Some(value.magnitude().clone()), Some(value.as_f64()))
}

fn ratio_pair(value: &BigRational) -> (Option<BigRational>, Option<f64>) {
    (Some(value.clone()), Some(rational::to_f64(value)))
}

/// `compare` output: the simulation-versus-prediction report plus the
/// efficient-learner baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOutput {
    pub report: ComparisonReport,
    pub efficient_cost: CostValue,
    pub efficient_probes: u64,
    #[serde(with = "crate::rational::serde_rational")]
    pub slowdown_analytic: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub slowdown_empirical: BigRational,
}

/// `blind-search` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlindSearchReport {
    pub critical_size: u64,
    pub runs: u64,
    pub cap: Option<u64>,
    pub found: u64,
    pub cap_exceeded: u64,
    /// Median guesses over all runs, with capped runs ordered last;
    /// absent when the median run itself exceeded the cap.
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub median_guesses: Option<BigRational>,
    pub master_seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    /// Model-constraint violation; exit status 3.
    Model(Error),
    /// Usage problem not caught by the parser; exit status 2.
    Usage(String),
    /// I/O failure; exit status 1.
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(_) => 3,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(err) => write!(f, "{err}"),
            CliError::Usage(message) => write!(f, "{message}"),
            CliError::Io(err) => write!(f, "{err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Model(err)
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Io(err)
    }
}

/// Run a parsed command, honoring `--out`.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let mut writer = BufWriter::new(File::create(path)?);
            render(cli, &mut writer)?;
            writer.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            render(cli, &mut writer)?;
            writer.flush()?;
            Ok(())
        }
    }
}

fn render(cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analytic(args) => cmd_analytic(args, cli, w),
        Command::PaperExample => cmd_paper_example(cli, w),
        Command::Simulate(args) => cmd_simulate(args, cli, w),
        Command::Sweep(args) => cmd_sweep(args, cli, w),
        Command::Compare(args) => cmd_compare(args, cli, w),
        Command::BlindSearch(args) => cmd_blind_search(args, cli, w),
    }
}

fn banner(cli: &Cli, w: &mut dyn Write) -> io::Result<()> {
    if cli.format == OutputFormat::Text && !cli.no_banner {
        writeln!(w, "# evocost {}", env!("CARGO_PKG_VERSION"))?;
    }
    Ok(())
}

fn emit_csv(w: &mut dyn Write, rows: &[ResultRow]) -> Result<(), CliError> {
    writeln!(w, "{}", ResultRow::CSV_HEADER)?;
    for row in rows {
        writeln!(w, "{}", row.to_csv_line())?;
    }
    Ok(())
}

fn emit_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    writeln!(w)?;
    Ok(())
}

fn write_cost_line(w: &mut dyn Write, label: &str, value: &CostValue) -> io::Result<()> {
    writeln!(
        w,
        "  {label:<20} {value} ({})",
        rational::sci(value.magnitude())
    )
}

fn write_ratio_line(w: &mut dyn Write, label: &str, value: &BigRational) -> io::Result<()> {
    writeln!(w, "  {label:<20} {value} ({})", rational::sci(value))
}

fn cmd_analytic(args: &AnalyticArgs, cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    let mut scenario = ScenarioParams::new(args.critical_size, args.radius)?;
    if let Some(population) = args.population {
        scenario = scenario.with_population(population)?;
    }
    let params = CostParams::new(args.kappa.clone(), DEFAULT_UNIT)?;

    // Divisibility is enforced here: the summation needs whole
    // generations, and this command cross-checks it against the closed
    // form on every invocation.
    let summation = evol_cost_sum(&scenario, &params)?;
    let closed_form = evol_cost_closed_form(&scenario, &params)?;
    if summation != closed_form {
        return Err(CliError::Model(Error::ParameterMismatch(
            "summation disagrees with the closed form".into(),
        )));
    }
    let lcost = lcost_linear(args.critical_size, &params)?;
    let slowdown = slowdown_ratio(&scenario);
    let elapsed = args
        .population
        .map(|population| elapsed_time(&closed_form, population))
        .transpose()?;

    let (closed_rat, closed_f64) = cost_pair(&closed_form);
    let (slowdown_rat, slowdown_f64) = ratio_pair(&slowdown);
    let (elapsed_rat, elapsed_f64) = match &elapsed {
        Some(value) => cost_pair(value),
        None => (None, None),
    };
    let row = ResultRow {
        subcommand: "analytic".into(),
        c: Some(args.critical_size),
        r: Some(args.radius),
        kappa: Some(args.kappa.clone()),
        closed_form: closed_rat,
        closed_form_f64: closed_f64,
        slowdown_analytic: slowdown_rat,
        slowdown_analytic_f64: slowdown_f64,
        elapsed_time: elapsed_rat,
        elapsed_time_f64: elapsed_f64,
        population: args.population,
        ..ResultRow::default()
    };

    match cli.format {
        OutputFormat::Csv => emit_csv(w, &[row]),
        OutputFormat::Json => emit_json(w, &[row]),
        OutputFormat::Text => {
            banner(cli, w)?;
            writeln!(
                w,
                "analytic C={} R={} kappa={}",
                args.critical_size, args.radius, args.kappa
            )?;
            write_cost_line(w, "closed_form", &closed_form)?;
            writeln!(
                w,
                "  {:<20} {} (agrees with closed_form exactly)",
                "summation",
                summation.magnitude()
            )?;
            write_cost_line(w, "lcost", &lcost)?;
            write_ratio_line(w, "slowdown", &slowdown)?;
            if let (Some(value), Some(population)) = (&elapsed, args.population) {
                write_cost_line(w, "elapsed_time", value)?;
                writeln!(w, "  {:<20} {population}", "population")?;
            }
            Ok(())
        }
    }
}

fn cmd_paper_example(cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    let report = worked_example();
    match cli.format {
        OutputFormat::Json => emit_json(w, &report),
        OutputFormat::Csv => {
            let rows: Vec<ResultRow> = report
                .variants
                .iter()
                .map(|variant| {
                    let (closed_rat, closed_f64) = cost_pair(&variant.evol_cost);
                    let (slowdown_rat, slowdown_f64) = ratio_pair(&variant.slowdown);
                    let (elapsed_rat, elapsed_f64) = cost_pair(&variant.elapsed);
                    ResultRow {
                        subcommand: "paper-example".into(),
                        c: Some(report.critical_size),
                        r: Some(report.radius),
                        kappa: Some(variant.kappa.clone()),
                        mode: Some(variant.label.clone()),
                        closed_form: closed_rat,
                        closed_form_f64: closed_f64,
                        slowdown_analytic: slowdown_rat,
                        slowdown_analytic_f64: slowdown_f64,
                        elapsed_time: elapsed_rat,
                        elapsed_time_f64: elapsed_f64,
                        population: Some(report.population),
                        ..ResultRow::default()
                    }
                })
                .collect();
            emit_csv(w, &rows)
        }
        OutputFormat::Text => {
            banner(cli, w)?;
            write_example_text(&report, w)?;
            Ok(())
        }
    }
}

fn write_example_text(report: &ExampleReport, w: &mut dyn Write) -> io::Result<()> {
    writeln!(
        w,
        "paper-example C={} R={} population={} unit={}",
        report.critical_size, report.radius, report.population, report.unit
    )?;
    write_cost_line(w, "reference evol_cost", &report.reference_evol_cost)?;
    write_cost_line(w, "reference elapsed", &report.reference_elapsed)?;
    for variant in &report.variants {
        writeln!(w, "  variant {}", variant.label)?;
        writeln!(
            w,
            "    {:<18} {} {}/bit ({})",
            "kappa",
            variant.kappa,
            report.unit,
            rational::sci(&variant.kappa)
        )?;
        writeln!(w, "    {:<18} {}", "lcost", variant.lcost)?;
        writeln!(
            w,
            "    {:<18} {} ({})  rel_delta {}",
            "evol_cost",
            variant.evol_cost,
            rational::sci(variant.evol_cost.magnitude()),
            variant.evol_cost_rel_delta
        )?;
        writeln!(
            w,
            "    {:<18} {} ({})",
            "slowdown",
            variant.slowdown,
            rational::sci(&variant.slowdown)
        )?;
        writeln!(
            w,
            "    {:<18} {} ({})  rel_delta {}",
            "elapsed",
            variant.elapsed,
            rational::sci(variant.elapsed.magnitude()),
            variant.elapsed_rel_delta
        )?;
    }
    Ok(())
}

fn load_or_generate_landscape(
    manifest: Option<&Path>,
    critical_size: Option<u64>,
    radius: Option<u64>,
    master_seed: u64,
) -> Result<BlockStaircaseLandscape, CliError> {
    match manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let line = text
                .lines()
                .find(|line| !line.trim().is_empty())
                .ok_or_else(|| {
                    CliError::Model(Error::Parse("landscape manifest is empty".into()))
                })?;
            let landscape = BlockStaircaseLandscape::from_manifest_line(line)?;
            if let Some(c) = critical_size {
                if c != landscape.critical_size() {
                    return Err(Error::ParameterMismatch(format!(
                        "--C {c} does not match the manifest's C={}",
                        landscape.critical_size()
                    ))
                    .into());
                }
            }
            if let Some(r) = radius {
                if r != landscape.radius() {
                    return Err(Error::ParameterMismatch(format!(
                        "--R {r} does not match the manifest's R={}",
                        landscape.radius()
                    ))
                    .into());
                }
            }
            Ok(landscape)
        }
        None => {
            let c = critical_size
                .ok_or_else(|| CliError::Usage("--C is required without --landscape".into()))?;
            let r = radius
                .ok_or_else(|| CliError::Usage("--R is required without --landscape".into()))?;
            Ok(BlockStaircaseLandscape::generate(
                c,
                r,
                landscape_seed(master_seed),
            )?)
        }
    }
}

struct SimulationOutcome {
    landscape: BlockStaircaseLandscape,
    summary: TrialSummary,
    comparison: Option<ComparisonReport>,
    slowdown_analytic: BigRational,
    slowdown_empirical: Option<BigRational>,
    efficient_cost: Option<CostValue>,
}

fn run_simulation(
    landscape: BlockStaircaseLandscape,
    kappa: &BigRational,
    mode: AccountingMode,
    trials: u64,
    master_seed: u64,
    with_efficient: bool,
) -> Result<SimulationOutcome, CliError> {
    // Scale guards fire before any trial runs.
    if landscape.radius() > MAX_SIMULATION_RADIUS {
        return Err(Error::ScaleGuard(format!(
            "simulation requires R <= {MAX_SIMULATION_RADIUS}, got R={}",
            landscape.radius()
        ))
        .into());
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()).into());
    }
    let scenario = ScenarioParams::new(landscape.critical_size(), landscape.radius())?;
    let params = CostParams::new(kappa.clone(), DEFAULT_UNIT)?;

    let summary = run_trials(&landscape, &params, mode, trials, master_seed)?;
    let comparison = match mode {
        AccountingMode::Exhaustive => Some(compare_to_analytic(&summary, &scenario, &params)?),
        AccountingMode::FirstImprovement => None,
    };
    let (efficient_cost, slowdown_empirical) = if with_efficient {
        let efficient = run_efficient(&landscape, &params);
        let slowdown = empirical_slowdown(&summary, &efficient)?;
        (Some(efficient.total_cost), Some(slowdown))
    } else {
        (None, None)
    };

    Ok(SimulationOutcome {
        landscape,
        summary,
        comparison,
        slowdown_analytic: slowdown_ratio(&scenario),
        slowdown_empirical,
        efficient_cost,
    })
}

fn simulation_row(
    subcommand: &str,
    outcome: &SimulationOutcome,
    elapsed: Option<&CostValue>,
    population: Option<u64>,
) -> ResultRow {
    let summary = &outcome.summary;
    let (median_rat, median_f64) = cost_pair(&summary.median);
    let (closed_rat, closed_f64, predicted_rat, predicted_f64, delta_rel) =
        match &outcome.comparison {
            Some(report) => {
                let (c_rat, c_f64) = cost_pair(&report.closed_form);
                let (p_rat, p_f64) = cost_pair(&report.predicted_median);
                (
                    c_rat,
                    c_f64,
                    p_rat,
                    p_f64,
                    Some(rational::to_f64(&report.delta_rel)),
                )
            }
            None => (None, None, None, None, None),
        };
    let (slowdown_rat, slowdown_f64) = ratio_pair(&outcome.slowdown_analytic);
    let (empirical_rat, empirical_f64) = match &outcome.slowdown_empirical {
        Some(value) => ratio_pair(value),
        None => (None, None),
    };
    let (elapsed_rat, elapsed_f64) = match elapsed {
        Some(value) => cost_pair(value),
        None => (None, None),
    };
    ResultRow {
        subcommand: subcommand.into(),
        c: Some(summary.critical_size),
        r: Some(summary.radius),
        kappa: Some(summary.kappa.clone()),
        mode: Some(summary.mode.to_string()),
        trials: Some(summary.n_trials),
        seed: Some(summary.master_seed),
        median_cost: median_rat,
        median_cost_f64: median_f64,
        closed_form: closed_rat,
        closed_form_f64: closed_f64,
        predicted_median: predicted_rat,
        predicted_median_f64: predicted_f64,
        delta_rel,
        slowdown_analytic: slowdown_rat,
        slowdown_analytic_f64: slowdown_f64,
        slowdown_empirical: empirical_rat,
        slowdown_empirical_f64: empirical_f64,
        elapsed_time: elapsed_rat,
        elapsed_time_f64: elapsed_f64,
        population,
    }
}

fn write_summary_text(
    outcome: &SimulationOutcome,
    elapsed: Option<&CostValue>,
    population: Option<u64>,
    w: &mut dyn Write,
) -> io::Result<()> {
    let summary = &outcome.summary;
    write_cost_line(w, "median", &summary.median)?;
    write_cost_line(w, "lower_quartile", &summary.lower_quartile)?;
    write_cost_line(w, "upper_quartile", &summary.upper_quartile)?;
    write_cost_line(w, "min", &summary.min)?;
    write_cost_line(w, "max", &summary.max)?;
    if let Some(report) = &outcome.comparison {
        write_cost_line(w, "closed_form", &report.closed_form)?;
        write_cost_line(w, "predicted_median", &report.predicted_median)?;
        writeln!(
            w,
            "  {:<20} {} ({})",
            "delta_rel",
            report.delta_rel,
            rational::to_f64(&report.delta_rel)
        )?;
        if report.low_confidence {
            writeln!(w, "  {:<20} true (fewer than 30 trials)", "low_confidence")?;
        }
    }
    write_ratio_line(w, "slowdown_analytic", &outcome.slowdown_analytic)?;
    if let Some(value) = &outcome.slowdown_empirical {
        write_ratio_line(w, "slowdown_empirical", value)?;
    }
    if let Some(value) = &outcome.efficient_cost {
        write_cost_line(w, "efficient_cost", value)?;
    }
    if let (Some(value), Some(population)) = (elapsed, population) {
        write_cost_line(w, "elapsed_time", value)?;
        writeln!(w, "  {:<20} {population}", "population")?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    if args.dump_trace && cli.format != OutputFormat::Text {
        return Err(CliError::Usage(
            "--dump-trace is only available with --format text".into(),
        ));
    }
    let landscape = load_or_generate_landscape(
        args.landscape.as_deref(),
        args.critical_size,
        args.radius,
        args.seed,
    )?;
    if let Some(path) = &args.save_landscape {
        std::fs::write(path, format!("{}\n", landscape.to_manifest_line()))?;
    }
    let outcome = run_simulation(
        landscape,
        &args.kappa,
        args.mode,
        args.trials,
        args.seed,
        args.efficient,
    )?;
    let elapsed = args
        .population
        .map(|population| elapsed_time(&outcome.summary.median, population))
        .transpose()?;
    let row = simulation_row("simulate", &outcome, elapsed.as_ref(), args.population);

    match cli.format {
        OutputFormat::Csv => emit_csv(w, &[row]),
        OutputFormat::Json => emit_json(w, &[row]),
        OutputFormat::Text => {
            banner(cli, w)?;
            writeln!(
                w,
                "simulate C={} R={} kappa={} mode={} trials={} seed={}",
                outcome.summary.critical_size,
                outcome.summary.radius,
                outcome.summary.kappa,
                outcome.summary.mode,
                outcome.summary.n_trials,
                outcome.summary.master_seed
            )?;
            if args.dump_trace {
                let params = CostParams::new(args.kappa.clone(), DEFAULT_UNIT)?;
                let trace = run_single(
                    &outcome.landscape,
                    &params,
                    args.mode,
                    trial_seed(args.seed, 0),
                )?;
                trace.dump(w)?;
            }
            write_summary_text(&outcome, elapsed.as_ref(), args.population, w)?;
            Ok(())
        }
    }
}

fn cmd_compare(args: &CompareArgs, cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    if args.mode != AccountingMode::Exhaustive {
        return Err(Error::InvalidParameter(
            "compare requires --mode paper; the prediction models exhaustive accounting".into(),
        )
        .into());
    }
    let landscape =
        load_or_generate_landscape(None, Some(args.critical_size), Some(args.radius), args.seed)?;
    let outcome = run_simulation(
        landscape,
        &args.kappa,
        args.mode,
        args.trials,
        args.seed,
        true,
    )?;
    let output = CompareOutput {
        report: outcome.comparison.clone().expect("exhaustive mode"),
        efficient_cost: outcome.efficient_cost.clone().expect("always run"),
        efficient_probes: outcome.summary.critical_size,
        slowdown_analytic: outcome.slowdown_analytic.clone(),
        slowdown_empirical: outcome.slowdown_empirical.clone().expect("always run"),
    };

    match cli.format {
        OutputFormat::Csv => {
            let row = simulation_row("compare", &outcome, None, None);
            emit_csv(w, &[row])
        }
        OutputFormat::Json => emit_json(w, &output),
        OutputFormat::Text => {
            banner(cli, w)?;
            writeln!(
                w,
                "compare C={} R={} kappa={} mode={} trials={} seed={}",
                outcome.summary.critical_size,
                outcome.summary.radius,
                outcome.summary.kappa,
                outcome.summary.mode,
                outcome.summary.n_trials,
                outcome.summary.master_seed
            )?;
            write_summary_text(&outcome, None, None, w)?;
            Ok(())
        }
    }
}

fn cmd_sweep(args: &SweepArgs, cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    let mut sizes = args.critical_sizes.0.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut radii = args.radii.0.clone();
    radii.sort_unstable();
    radii.dedup();

    // Every pair is validated before any cell executes.
    for &c in &sizes {
        for &r in &radii {
            if let Err(source) = validate_sweep_pair(c, r, args.trials.is_some()) {
                return Err(Error::InvalidParameter(format!(
                    "invalid pair (C={c}, R={r}): {source}"
                ))
                .into());
            }
        }
    }

    let params = CostParams::new(args.kappa.clone(), DEFAULT_UNIT)?;
    let mut rows = Vec::with_capacity(sizes.len() * radii.len());
    for &c in &sizes {
        for &r in &radii {
            let scenario = ScenarioParams::new(c, r)?;
            let summation = evol_cost_sum(&scenario, &params)?;
            let closed_form = evol_cost_closed_form(&scenario, &params)?;
            if summation != closed_form {
                return Err(CliError::Model(Error::ParameterMismatch(format!(
                    "summation disagrees with the closed form for (C={c}, R={r})"
                ))));
            }

            let row = match args.trials {
                Some(trials) => {
                    let landscape =
                        BlockStaircaseLandscape::generate(c, r, landscape_seed(args.seed))?;
                    let outcome = run_simulation(
                        landscape,
                        &args.kappa,
                        args.mode,
                        trials,
                        args.seed,
                        false,
                    )?;
                    simulation_row("sweep", &outcome, None, None)
                }
                None => {
                    let (closed_rat, closed_f64) = cost_pair(&closed_form);
                    let (slowdown_rat, slowdown_f64) = ratio_pair(&slowdown_ratio(&scenario));
                    ResultRow {
                        subcommand: "sweep".into(),
                        c: Some(c),
                        r: Some(r),
                        kappa: Some(args.kappa.clone()),
                        closed_form: closed_rat,
                        closed_form_f64: closed_f64,
                        slowdown_analytic: slowdown_rat,
                        slowdown_analytic_f64: slowdown_f64,
                        ..ResultRow::default()
                    }
                }
            };
            rows.push(row);
        }
    }

    match cli.format {
        OutputFormat::Json => emit_json(w, &rows),
        // Sweep output is tabular by nature; text format emits the same CSV.
        OutputFormat::Csv | OutputFormat::Text => emit_csv(w, &rows),
    }
}

fn validate_sweep_pair(c: u64, r: u64, simulating: bool) -> crate::error::Result<()> {
    let scenario = ScenarioParams::new(c, r)?;
    scenario.generations()?;
    if simulating {
        if r > MAX_SIMULATION_RADIUS {
            return Err(Error::ScaleGuard(format!(
                "simulation requires R <= {MAX_SIMULATION_RADIUS}"
            )));
        }
        if c > MAX_LANDSCAPE_BITS {
            return Err(Error::ScaleGuard(format!(
                "simulation requires C <= {MAX_LANDSCAPE_BITS}"
            )));
        }
    }
    Ok(())
}

fn cmd_blind_search(args: &BlindSearchArgs, cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    if args.runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()).into());
    }
    // Mirror the per-run guards up front so nothing executes on bad input.
    if args.critical_size > 63 {
        return Err(Error::ScaleGuard(format!(
            "needle search indexes a 2^C space; C={} exceeds 63",
            args.critical_size
        ))
        .into());
    }
    if args.cap == Some(0) {
        return Err(Error::InvalidParameter("cap must be at least 1".into()).into());
    }
    if args.cap.is_none() && args.critical_size > 24 {
        return Err(Error::ScaleGuard(format!(
            "uncapped needle search is limited to C <= 24, got C={}",
            args.critical_size
        ))
        .into());
    }

    let landscape = NeedleLandscape::generate(args.critical_size, landscape_seed(args.seed))?;
    let mut found: Vec<u64> = Vec::new();
    let mut cap_exceeded = 0u64;
    for run in 0..args.runs {
        match blind_search_run(&landscape, trial_seed(args.seed, run), args.cap)? {
            BlindSearchOutcome::Found { guesses } => found.push(guesses),
            BlindSearchOutcome::CapExceeded { .. } => cap_exceeded += 1,
        }
    }
    found.sort_unstable();
    let median_guesses = median_with_capped_tail(&found, args.runs);

    let report = BlindSearchReport {
        critical_size: args.critical_size,
        runs: args.runs,
        cap: args.cap,
        found: found.len() as u64,
        cap_exceeded,
        median_guesses: median_guesses.clone(),
        master_seed: args.seed,
    };

    match cli.format {
        OutputFormat::Json => emit_json(w, &report),
        OutputFormat::Csv => {
            let (median_rat, median_f64) = match &median_guesses {
                Some(value) => ratio_pair(value),
                None => (None, None),
            };
            let row = ResultRow {
                subcommand: "blind-search".into(),
                c: Some(args.critical_size),
                trials: Some(args.runs),
                seed: Some(args.seed),
                // For blind search the cost of a run is its guess count.
                median_cost: median_rat,
                median_cost_f64: median_f64,
                ..ResultRow::default()
            };
            emit_csv(w, &[row])
        }
        OutputFormat::Text => {
            banner(cli, w)?;
            write!(
                w,
                "blind-search C={} runs={} seed={}",
                args.critical_size, args.runs, args.seed
            )?;
            match args.cap {
                Some(cap) => writeln!(w, " cap={cap}")?,
                None => writeln!(w)?,
            }
            writeln!(w, "  {:<20} {}", "found", report.found)?;
            writeln!(w, "  {:<20} {}", "cap_exceeded", report.cap_exceeded)?;
            match &report.median_guesses {
                Some(value) => {
                    writeln!(
                        w,
                        "  {:<20} {} ({})",
                        "median_guesses",
                        value,
                        rational::to_f64(value)
                    )?;
                }
                None => writeln!(w, "  {:<20} cap-exceeded", "median_guesses")?,
            }
            Ok(())
        }
    }
}

/// Median order statistic over all runs, with capped runs sorted after
/// every finite guess count; `None` when the median itself is capped.
fn median_with_capped_tail(found_sorted: &[u64], runs: u64) -> Option<BigRational> {
    let n = runs as usize;
    let get = |index: usize| {
        found_sorted
            .get(index)
            .map(|&g| BigRational::from_integer(BigInt::from(g)))
    };
    if n % 2 == 1 {
        get(n / 2)
    } else {
        match (get(n / 2 - 1), get(n / 2)) {
            (Some(a), Some(b)) => Some((a + b) / BigRational::from_integer(BigInt::from(2))),
            _ => None,
        }
    }
}
