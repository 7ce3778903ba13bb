//! `pwyw` subcommands.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid parameters or config.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ConfigError, OutputFormat, RunConfig};
use crate::experiments::{run_cell, sweep, AggregateMetrics, StrategyCell};
use crate::game::{fs_model_inputs, BehaviorMode, Scenario};
use crate::optimizer::{
    check_consistency_variant, default_oracle_step, optimal_price_closed_form_variant, CheckTolerance, Regime,
};
use crate::population::sample_population;
use crate::preferences::{evaluate, ConsumerProfile, InequityParams, UtilityVariant};
use crate::report::{self, format_number};

#[derive(Debug, Parser)]
#[command(
    name = "pwyw",
    version,
    about = "Pay-what-you-want payment solver and strategy simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal price for one consumer under the extended utility.
    Solve(SolveArgs),
    /// Run a population through every strategy cell of a config.
    Simulate(RunArgs),
    /// Run the config's sweep section.
    Sweep(RunArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Reference price (exclusive with --v).
    #[arg(long = "pr", required_unless_present = "v", conflicts_with = "v")]
    pub p_r: Option<f64>,
    /// Internal reference price; combined with --erp when given.
    #[arg(long)]
    pub v: Option<f64>,
    /// External reference price.
    #[arg(long, requires = "v")]
    pub erp: Option<f64>,
    /// Unit cost.
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Floored)]
    pub variant: VariantArg,
    /// Cross-check against the grid oracle.
    #[arg(long)]
    pub verify: bool,
    /// Oracle grid step; defaults to 1e-3 * max(1, p_r).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Floored,
    Literal,
}

impl From<VariantArg> for UtilityVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Floored => UtilityVariant::Floored,
            VariantArg::Literal => UtilityVariant::Literal,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Also write per-consumer outcomes next to the results file.
    #[arg(long)]
    pub trace: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Cross-check utility-model decisions against the grid oracle.
    #[arg(long)]
    pub verify: bool,
    /// Results path, overriding `output.path`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Io { .. } => CliError::Io(err.to_string()),
            ConfigError::Invalid { .. } => CliError::Validation(err.to_string()),
        }
    }
}

impl From<crate::ModelError> for CliError {
    fn from(err: crate::ModelError) -> Self {
        CliError::Validation(err.to_string())
    }
}

fn io_error(path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("cannot write {}: {err}", path.display()))
}

pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Simulate(args) => with_threads(args.threads, || cmd_simulate(&args, out)),
        Command::Sweep(args) => with_threads(args.threads, || cmd_sweep(&args, out)),
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    job: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match threads {
        None => job(),
        Some(0) => Err(CliError::Validation("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))?
            .install(job),
    }
}

const DISPLAY_DIGITS: u32 = 9;

fn num(x: f64) -> String {
    format_number(x, DISPLAY_DIGITS)
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot write to standard output: {e}"))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let p_r = match (args.p_r, args.v) {
        (Some(p_r), _) => p_r,
        (None, Some(v)) => args.erp.map_or(v, |erp| erp.min(v)),
        (None, None) => return Err(CliError::Validation("one of --pr or --v is required".into())),
    };
    let params = InequityParams::new(args.alpha, args.beta, args.gamma)?;
    let variant = UtilityVariant::from(args.variant);
    let set = optimal_price_closed_form_variant(p_r, args.c, &params, variant)?;
    let regime = Regime::of(&params);

    let mut lines = Vec::new();
    match set.as_point() {
        Some(p) => lines.push(format!("P* = {} (case: {})", num(p), regime.describe())),
        None => {
            let pieces: Vec<String> = set
                .pieces()
                .iter()
                .map(|piece| {
                    if piece.is_point() {
                        format!("{{{}}}", num(piece.lo))
                    } else {
                        format!("[{}, {}]", num(piece.lo), num(piece.hi))
                    }
                })
                .collect();
            lines.push(format!("P* ∈ {} (indifference)", pieces.join(" ∪ ")));
            lines.push(format!("case: {}", regime.describe()));
        }
    }
    lines.push(format!("max utility = {}", num(set.max_utility())));
    if let Some(rule) = regime.rule_price(p_r, args.c) {
        if set.as_point() != Some(rule) {
            let at_rule = evaluate(p_r, rule, args.c, &params, variant).total;
            lines.push(format!(
                "note: the rule for this case names {}, where utility is {} < {}",
                num(rule),
                num(at_rule),
                num(set.max_utility())
            ));
        }
    }
    if args.verify {
        let step = args.step.unwrap_or_else(|| default_oracle_step(p_r));
        let report = check_consistency_variant(p_r, args.c, &params, step, CheckTolerance::default(), variant)?;
        lines.push(format!(
            "oracle: {} (grid step {}, oracle set {}, max distance {}, utility gap {})",
            if report.passed { "agree" } else { "DISAGREE" },
            num(step),
            report.oracle,
            num(report.max_distance),
            num(report.utility_gap),
        ));
    }
    for line in lines {
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    Ok(())
}

fn output_path(args: &RunArgs, config: &RunConfig) -> PathBuf {
    args.output.clone().unwrap_or_else(|| config.output.path.clone())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(path, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

/// `results.csv` -> `results.trace-<k>.csv`
pub fn trace_path(results: &Path, cell: usize) -> PathBuf {
    let stem = results.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    results.with_file_name(format!("{stem}.trace-{cell}.csv"))
}

pub fn cmd_simulate(args: &RunArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let mode = config.effective_mode();
    let digits = config.output.precision;
    let population = sample_population(&config.population)?;
    let path = output_path(args, &config);

    let mut rows = Vec::with_capacity(config.strategies.len());
    for (k, cell) in config.strategies.iter().enumerate() {
        let run = run_cell(&population, cell, &mode)?;
        if args.trace {
            let trace = trace_path(&path, k);
            report::write_trace_csv(create(&trace)?, &run.outcomes, digits).map_err(|e| io_error(&trace, e))?;
        }
        if args.verify {
            verify_cell(&population, cell, &mode, out)?;
        }
        rows.push((cell.label(), run.metrics));
    }

    write_metrics(&path, config.output.format, &rows, digits)?;
    write!(out, "{}", report::summary_table("cell", &rows, digits)).map_err(stdout_err)?;
    writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
    Ok(())
}

fn write_metrics(
    path: &Path,
    format: OutputFormat,
    rows: &[(String, AggregateMetrics)],
    digits: u32,
) -> Result<(), CliError> {
    let mut file = create(path)?;
    match format {
        OutputFormat::Csv => report::write_metrics_csv(&mut file, rows, digits).map_err(|e| io_error(path, e))?,
        OutputFormat::Json => report::write_metrics_json(&mut file, rows, digits).map_err(|e| io_error(path, e))?,
    }
    file.flush().map_err(|e| io_error(path, e))
}

pub fn cmd_sweep(args: &RunArgs, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    let Some(spec) = &config.sweep else {
        return Err(CliError::Validation(
            "invalid config at $.sweep: a sweep section is required".into(),
        ));
    };
    let mode = config.effective_mode();
    let digits = config.output.precision;
    let template = &config.strategies[spec.strategy];
    let rows = sweep(&config.population, template, spec.parameter, &spec.grid, &mode)?;
    if args.verify {
        let population = sample_population(&config.population)?;
        verify_cell(&population, template, &mode, out)?;
    }

    let path = output_path(args, &config);
    let parameter = spec.parameter.as_str();
    let mut file = create(&path)?;
    match config.output.format {
        OutputFormat::Csv => {
            report::write_sweep_csv(&mut file, parameter, &rows, digits).map_err(|e| io_error(&path, e))?
        }
        OutputFormat::Json => {
            report::write_sweep_json(&mut file, parameter, &rows, digits).map_err(|e| io_error(&path, e))?
        }
    }
    file.flush().map_err(|e| io_error(&path, e))?;

    let table: Vec<(String, AggregateMetrics)> = rows.iter().map(|r| (num(r.value), r.metrics.clone())).collect();
    write!(out, "{}", report::summary_table(parameter, &table, digits)).map_err(stdout_err)?;
    writeln!(out, "wrote {}", path.display()).map_err(stdout_err)?;
    Ok(())
}

/// Re-solves every utility-model decision of `cell` with the grid oracle.
fn verify_cell(
    population: &[ConsumerProfile],
    cell: &StrategyCell,
    mode: &BehaviorMode,
    out: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let BehaviorMode::FsModel(settings) = mode else {
        writeln!(out, "verify {}: literal mode has no optimizer decisions", cell.label()).map_err(stdout_err)?;
        return Ok(());
    };
    let supplier = cell.supplier()?;
    let scenario = crate::game::classify_scenario(&supplier);
    let mut checked = 0usize;
    let mut failed = 0usize;
    for consumer in population {
        if consumer.is_free_rider()
            || scenario == Scenario::CostRevealed
            || (scenario == Scenario::SelfImage && supplier.erp().is_some_and(|erp| erp > consumer.v()))
        {
            continue;
        }
        let (p_r, c, params) = fs_model_inputs(consumer, &supplier, supplier.cost_type(), settings);
        let report = check_consistency_variant(
            p_r,
            c,
            &params,
            default_oracle_step(p_r),
            CheckTolerance::default(),
            settings.variant,
        )?;
        checked += 1;
        if !report.passed {
            failed += 1;
        }
    }
    writeln!(
        out,
        "verify {}: {}/{} optimizer decisions agree with the grid oracle",
        cell.label(),
        checked - failed,
        checked
    )
    .map_err(stdout_err)
}
