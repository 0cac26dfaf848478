//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE` pointing at a flat `key = value`
//! file whose keys are flag names; flags given on the command line override
//! the file.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    critical_purity, sweep, threshold_population, time_series, Evaluator, DEFAULT_SWEEP_POINTS,
};
use crate::chsh::{
    bell_function, brute_force_max, horodecki_max, restricted_max, BruteForceConfig, BruteForceDiagnostics,
    SearchSpace, SETTINGS_TOL, TSIRELSON_BOUND,
};
use crate::dynamics::{propagate_x, DecoherenceAmplitude};
use crate::error::Error;
use crate::report::{csv_row, fmt_num};
use crate::reservoir::{ReservoirModel, TimeGrid};
use crate::states::{build_ewl, random_x_view, EwlParams, Family};

/// Oracle tolerance between the numerical search and the Horodecki value.
pub const ORACLE_TOL: f64 = 1e-4;
/// Slack allowed for `restricted ≤ horodecki`.
pub const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "qnonlocal", version, about = "CHSH nonlocality of two amplitude-damped qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the initial extended Werner-like state.
    Ewl(EwlArgs),
    /// Bell maxima against the population parameter.
    Sweep(SweepArgs),
    /// Population parameter at which violation sets in.
    Threshold(ThresholdArgs),
    /// Smallest purity that allows a violation.
    CriticalPurity(CriticalPurityArgs),
    /// Bell maxima along a reservoir trajectory.
    Evolve(EvolveArgs),
    /// Cross-check the three evaluators on random X states.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Markovian,
    Lorentzian,
    Trapping,
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

fn parse_signed_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (-1.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [-1, 1]"))
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not > 0"))
    }
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is negative"))
    }
}

fn parse_points(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 2 {
        Ok(v)
    } else {
        Err(format!("{v} is less than 2"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value = "phi")]
    pub family: Family,
    /// Purity r in [0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_unit)]
    pub r: f64,
    /// Real amplitude alpha in [-1, 1]; beta = sqrt(1 - alpha^2).
    #[arg(long, default_value_t = FRAC_1_SQRT_2, value_parser = parse_signed_unit)]
    pub alpha: f64,
    /// Relative phase delta in radians.
    #[arg(long, default_value_t = 0.0, value_parser = parse_finite)]
    pub delta: f64,
}

impl StateArgs {
    pub fn params(&self) -> EwlParams {
        EwlParams::new(self.family, self.r, self.alpha, self.delta)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluatorArgs {
    #[arg(long, default_value = "restricted")]
    pub evaluator: Evaluator,
    /// Emit restricted and Horodecki results side by side.
    #[arg(long)]
    pub both_evaluators: bool,
}

impl EvaluatorArgs {
    fn selected(&self) -> Vec<Evaluator> {
        if self.both_evaluators {
            vec![Evaluator::Restricted, Evaluator::Horodecki]
        } else {
            vec![self.evaluator]
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Seed for the random restarts of the numerical search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 12)]
    pub grid_density: usize,
}

impl SearchArgs {
    fn config(&self) -> BruteForceConfig {
        BruteForceConfig {
            restarts: self.restarts,
            grid_density: self.grid_density,
            seed: self.seed,
            space: SearchSpace::Full,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EwlArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    /// Uniform population-parameter samples in [0, 1].
    #[arg(long, default_value_t = DEFAULT_SWEEP_POINTS, value_parser = parse_points)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct CriticalPurityArgs {
    #[arg(long, default_value = "phi")]
    pub family: Family,
    #[arg(long, default_value_t = FRAC_1_SQRT_2, value_parser = parse_signed_unit)]
    pub alpha: f64,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    #[arg(long, value_enum, default_value = "markovian")]
    pub model: ModelKind,
    /// Decay rate; times are given in units of 1/gamma0.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub gamma0: f64,
    /// Lorentzian spectral width (required for `--model lorentzian`).
    #[arg(long, value_parser = parse_positive)]
    pub lambda: Option<f64>,
    /// Asymptotic amplitude of the trapping model (required for `--model trapping`).
    #[arg(long, value_parser = parse_unit)]
    pub w: Option<f64>,
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, value_parser = parse_positive)]
    pub t1: f64,
    #[arg(long, default_value_t = 101, value_parser = parse_points)]
    pub samples: usize,
    /// Also run the numerical search at every sample.
    #[arg(long)]
    pub brute_force: bool,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct OracleArgs {
    /// Number of random X states.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::InvalidGrid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", n + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Splices config-file entries in front of the command-line flags so the
/// latter win.
fn expand_args(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::new();
    let mut config_path = None;
    let mut it = args.into_iter();
    let program = it.next().unwrap_or_else(|| "qnonlocal".to_string());
    while let Some(a) = it.next() {
        if a == "--config" {
            config_path = Some(
                it.next()
                    .ok_or_else(|| CliError::Usage("--config requires a file path".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config_path else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };

    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("--config {path}: {e}")))?;
    let entries = parse_config(&text).map_err(|e| CliError::Usage(format!("--config {path}: {e}")))?;

    let mut command = None;
    let mut file_flags = Vec::new();
    for (key, value) in entries {
        if key == "command" {
            command = Some(value);
            continue;
        }
        match value.as_str() {
            "true" => file_flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                file_flags.push(format!("--{key}"));
                file_flags.push(value);
            }
        }
    }

    let (sub, user_flags) = match rest.first() {
        Some(first) if !first.starts_with('-') => (first.clone(), rest[1..].to_vec()),
        _ => match command {
            Some(c) => (c, rest),
            None => {
                return Err(CliError::Usage(
                    "no subcommand given on the command line or as `command` in the config file".into(),
                ))
            }
        },
    };
    let mut out = vec![program, sub];
    out.extend(file_flags);
    out.extend(user_flags);
    Ok(out)
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("writing {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failure(format!("writing stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Failure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn check_bound(values: impl IntoIterator<Item = f64>) -> Result<(), CliError> {
    for v in values {
        if !(0.0..=TSIRELSON_BOUND + ORDER_TOL).contains(&v) {
            return Err(CliError::Failure(format!("Bell value {v} outside [0, 2*sqrt(2)]")));
        }
    }
    Ok(())
}

fn run_ewl(args: &EwlArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = args.state.params();
    let state = build_ewl(&params)?;
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                params: EwlParams,
                state: &'a crate::states::TwoQubitState,
                x_view: crate::states::XStateView,
                validation: crate::states::ValidationReport,
            }
            to_json(&Out {
                params,
                state: &state,
                x_view: state.as_x_view()?,
                validation: state.validate(),
            })?
        }
        Format::Csv => {
            let mut s = csv_row(["row", "col", "re", "im"]);
            for i in 0..4 {
                for j in 0..4 {
                    let z = state.element(i, j);
                    s += &csv_row([(i + 1).to_string(), (j + 1).to_string(), fmt_num(z.re), fmt_num(z.im)]);
                }
            }
            s
        }
    };
    emit(&args.output, &text, stdout)
}

fn run_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let records = sweep(&args.state.params(), args.points)?;
    check_bound(records.iter().flat_map(|r| [r.restricted_max, r.horodecki_max]))?;
    let evaluators = args.evaluator.selected();
    let text = match args.output.format {
        Format::Json => to_json(&records)?,
        Format::Csv => {
            let mut header = vec!["x".to_string()];
            header.extend(evaluators.iter().map(|e| format!("{e}_max")));
            header.extend(evaluators.iter().map(|e| format!("violation_{e}")));
            header.extend(["p_excited_a".to_string(), "p_excited_b".to_string()]);
            let mut s = csv_row(&header);
            for r in &records {
                let mut row = vec![fmt_num(r.x)];
                for e in &evaluators {
                    row.push(fmt_num(match e {
                        Evaluator::Restricted => r.restricted_max,
                        Evaluator::Horodecki => r.horodecki_max,
                    }));
                }
                for e in &evaluators {
                    row.push(
                        match e {
                            Evaluator::Restricted => r.violation_restricted,
                            Evaluator::Horodecki => r.violation_horodecki,
                        }
                        .to_string(),
                    );
                }
                row.push(fmt_num(r.p_excited_a));
                row.push(fmt_num(r.p_excited_b));
                s += &csv_row(&row);
            }
            s
        }
    };
    emit(&args.output, &text, stdout)
}

fn run_threshold(args: &ThresholdArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = args.state.params();
    let results = args
        .evaluator
        .selected()
        .into_iter()
        .map(|e| threshold_population(&params, e))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match args.output.format {
        Format::Json => to_json(&results)?,
        Format::Csv => {
            let mut s = csv_row(["evaluator", "exists", "x_star"]);
            for r in &results {
                s += &csv_row([
                    r.evaluator.to_string(),
                    r.exists.to_string(),
                    r.x_star.map(fmt_num).unwrap_or_default(),
                ]);
            }
            s
        }
    };
    emit(&args.output, &text, stdout)
}

fn run_critical_purity(args: &CriticalPurityArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        evaluator: Evaluator,
        exists: bool,
        r_critical: Option<f64>,
    }
    let rows = args
        .evaluator
        .selected()
        .into_iter()
        .map(|e| {
            critical_purity(args.family, args.alpha, e).map(|r| Row {
                evaluator: e,
                exists: r.is_some(),
                r_critical: r,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let text = match args.output.format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let mut s = csv_row(["evaluator", "exists", "r_critical"]);
            for r in &rows {
                s += &csv_row([
                    r.evaluator.to_string(),
                    r.exists.to_string(),
                    r.r_critical.map(fmt_num).unwrap_or_default(),
                ]);
            }
            s
        }
    };
    emit(&args.output, &text, stdout)
}

fn reservoir_model(args: &EvolveArgs) -> Result<ReservoirModel, CliError> {
    let gamma0 = args.gamma0;
    Ok(match args.model {
        ModelKind::Markovian => ReservoirModel::Markovian { gamma0 },
        ModelKind::Lorentzian => ReservoirModel::Lorentzian {
            gamma0,
            lambda: args
                .lambda
                .ok_or_else(|| CliError::Usage("--lambda is required for --model lorentzian".into()))?,
        },
        ModelKind::Trapping => ReservoirModel::Trapping {
            gamma0,
            w: args
                .w
                .ok_or_else(|| CliError::Usage("--w is required for --model trapping".into()))?,
        },
    })
}

fn run_evolve(args: &EvolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = reservoir_model(args)?;
    if args.t1 <= args.t0 {
        return Err(CliError::Usage(format!("--t1 ({}) must exceed --t0 ({})", args.t1, args.t0)));
    }
    // Flags are in units of 1/gamma0.
    let grid = TimeGrid::new(args.t0 / args.gamma0, args.t1 / args.gamma0, args.samples)?;
    let search = args.brute_force.then(|| args.search.config());
    let samples = time_series(&args.state.params(), &model, &grid, search.as_ref())?;
    check_bound(samples.iter().flat_map(|s| {
        [s.evaluation.restricted_max, s.evaluation.horodecki_max]
            .into_iter()
            .chain(s.evaluation.brute_force_max)
    }))?;
    let evaluators = args.evaluator.selected();
    let text = match args.output.format {
        Format::Json => to_json(&samples)?,
        Format::Csv => {
            let mut header = vec!["t".to_string(), "x".to_string()];
            header.extend(evaluators.iter().map(|e| format!("{e}_max")));
            if args.brute_force {
                header.push("brute_force_max".into());
            }
            header.extend(evaluators.iter().map(|e| format!("violation_{e}")));
            header.extend(["p_excited_a".to_string(), "p_excited_b".to_string()]);
            let mut s = csv_row(&header);
            for sample in &samples {
                let mut row = vec![fmt_num(sample.t * args.gamma0), fmt_num(sample.x)];
                for e in &evaluators {
                    row.push(fmt_num(match e {
                        Evaluator::Restricted => sample.evaluation.restricted_max,
                        Evaluator::Horodecki => sample.evaluation.horodecki_max,
                    }));
                }
                if let Some(b) = sample.evaluation.brute_force_max {
                    row.push(fmt_num(b));
                }
                for e in &evaluators {
                    row.push(sample.violation(*e).to_string());
                }
                row.push(fmt_num(sample.p_excited_a));
                row.push(fmt_num(sample.p_excited_b));
                s += &csv_row(&row);
            }
            s
        }
    };
    emit(&args.output, &text, stdout)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCase {
    pub index: usize,
    pub x: f64,
    pub restricted_max: f64,
    pub horodecki_max: f64,
    pub brute_force_max: f64,
    /// |Bell function at the restricted settings − restricted maximum|
    pub settings_residual: f64,
    pub diagnostics: BruteForceDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub cases: usize,
    pub max_brute_force_vs_horodecki: f64,
    pub max_restricted_minus_horodecki: f64,
    pub max_settings_residual: f64,
    pub non_converged: usize,
    pub passed: bool,
}

/// Random X states and population parameters, all evaluators on each.
pub fn oracle_check(n: usize, config: &BruteForceConfig) -> Result<(Vec<OracleCase>, OracleSummary), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cases = Vec::with_capacity(n);
    for index in 0..n {
        let view = random_x_view(&mut rng);
        let x: f64 = rng.random();
        let restricted = restricted_max(&view, x)?;
        let q = DecoherenceAmplitude::from_population(x)?;
        let evolved = propagate_x(&view, q, q).to_state()?;
        let brute = brute_force_max(&evolved, config);
        cases.push(OracleCase {
            index,
            x,
            restricted_max: restricted.value,
            horodecki_max: horodecki_max(&evolved),
            brute_force_max: brute.value,
            settings_residual: (bell_function(&evolved, &restricted.settings) - restricted.value).abs(),
            diagnostics: brute.diagnostics,
        });
    }
    let fold = |f: &dyn Fn(&OracleCase) -> f64| cases.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let max_brute_force_vs_horodecki = fold(&|c| (c.brute_force_max - c.horodecki_max).abs());
    let max_restricted_minus_horodecki = fold(&|c| c.restricted_max - c.horodecki_max);
    let max_settings_residual = fold(&|c| c.settings_residual);
    let non_converged = cases.iter().filter(|c| !c.diagnostics.converged).count();
    let passed = n == 0
        || (max_brute_force_vs_horodecki <= ORACLE_TOL
            && max_restricted_minus_horodecki <= ORDER_TOL
            && max_settings_residual <= SETTINGS_TOL
            && non_converged == 0);
    let summary = OracleSummary {
        cases: n,
        max_brute_force_vs_horodecki,
        max_restricted_minus_horodecki,
        max_settings_residual,
        non_converged,
        passed,
    };
    Ok((cases, summary))
}

fn run_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (cases, summary) = oracle_check(args.n, &args.search.config())?;
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                summary: &'a OracleSummary,
                cases: &'a [OracleCase],
            }
            to_json(&Out {
                summary: &summary,
                cases: &cases,
            })?
        }
        Format::Csv => {
            let mut s = csv_row([
                "index",
                "x",
                "restricted_max",
                "horodecki_max",
                "brute_force_max",
                "settings_residual",
                "converged",
            ]);
            for c in &cases {
                s += &csv_row([
                    c.index.to_string(),
                    fmt_num(c.x),
                    fmt_num(c.restricted_max),
                    fmt_num(c.horodecki_max),
                    fmt_num(c.brute_force_max),
                    fmt_num(c.settings_residual),
                    c.diagnostics.converged.to_string(),
                ]);
            }
            s
        }
    };
    emit(&args.output, &text, stdout)?;

    let mut report = String::new();
    let _ = writeln!(report, "cases = {}", summary.cases);
    let _ = writeln!(
        report,
        "max |brute_force - horodecki| = {:.3e} (tol {ORACLE_TOL:e})",
        summary.max_brute_force_vs_horodecki
    );
    let _ = writeln!(
        report,
        "max (restricted - horodecki) = {:.3e} (tol {ORDER_TOL:e})",
        summary.max_restricted_minus_horodecki
    );
    let _ = writeln!(
        report,
        "max |B(restricted settings) - restricted| = {:.3e} (tol {SETTINGS_TOL:e})",
        summary.max_settings_residual
    );
    let _ = writeln!(report, "non-converged searches = {}", summary.non_converged);
    eprint!("{report}");
    if summary.passed {
        Ok(())
    } else {
        Err(CliError::Failure("oracle check failed".into()))
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Ewl(a) => run_ewl(a, stdout),
        Command::Sweep(a) => run_sweep(a, stdout),
        Command::Threshold(a) => run_threshold(a, stdout),
        Command::CriticalPurity(a) => run_critical_purity(a, stdout),
        Command::Evolve(a) => run_evolve(a, stdout),
        Command::OracleCheck(a) => run_oracle(a, stdout),
    }
}

/// Parses `args` (program name first), runs, and returns the process exit code.
pub fn main_with_args(args: Vec<String>, stdout: &mut dyn Write) -> i32 {
    let result = expand_args(args).and_then(|argv| match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, stdout),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = write!(stdout, "{e}");
                Ok(())
            }
            _ => Err(CliError::Usage(e.render().to_string())),
        },
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().trim_start_matches("error: ").trim_end());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_parsing() {
        let cfg = parse_config("# comment\nfamily = psi\n\nboth_evaluators = true # trailing\n").unwrap();
        assert_eq!(
            cfg,
            vec![
                ("family".to_string(), "psi".to_string()),
                ("both-evaluators".to_string(), "true".to_string())
            ]
        );
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "command = threshold\nfamily = phi\nr = 0.6\n").unwrap();
        let argv = expand_args(args(&format!("qnonlocal --config {} --r 1.0", path.display()))).unwrap();
        let cli = Cli::try_parse_from(argv).unwrap();
        match cli.command {
            Command::Threshold(t) => {
                assert_eq!(t.state.r, 1.0);
                assert_eq!(t.state.family, Family::Phi);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_flag_is_a_usage_error() {
        let mut sink = Vec::new();
        assert_eq!(main_with_args(args("qnonlocal sweep --r 1.5"), &mut sink), 2);
        assert_eq!(main_with_args(args("qnonlocal evolve --model trapping"), &mut sink), 2);
        assert_eq!(main_with_args(args("qnonlocal bogus"), &mut sink), 2);
    }

    #[test]
    fn threshold_csv() {
        let mut out = Vec::new();
        let code = main_with_args(args("qnonlocal threshold --family phi --r 1.0"), &mut out);
        assert_eq!(code, 0);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "evaluator,exists,x_star\nrestricted,true,0.800000000000\n");
    }
}
