//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure (a fit that did not converge).

mod config;
mod simulate_cmd;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::descriptive::{summary_stats, SummaryStats};
use crate::diagnostics::{arch_lm, ljung_box, TestResult, DEFAULT_ARCH_LAGS, DEFAULT_LJUNG_BOX_LAGS};
use crate::error::Error;
use crate::forecast::{evaluate, forecast, plot_rows, ForecastEvaluation, ForecastMode, ForecastWindow, TheilTarget};
use crate::garch::{fit, FitOptions, GarchFit};
use crate::io::{load_rates, load_series, MissingPolicy, RateColumns};
use crate::report::{Cell, OutputFormat, Report, Table};
use crate::timeseries::{align, first_difference, log_returns, log_transform, split_period, AlignPolicy, AlignedDataset, DatedSeries};
use crate::unitroot::{adf_test, pp_test, Bandwidth, Deterministic, LagSelection};

pub use config::expand_config;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Data(e) => write!(f, "{e}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "garchx", version, about = "GARCH(1,1) volatility analysis with an exogenous mean regressor")]
pub struct Cli {
    /// key = value file supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary statistics and Jarque-Bera tests
    Stats(StatsArgs),
    /// ADF and Phillips-Perron unit-root tests
    Unitroot(UnitrootArgs),
    /// Fit GARCH(1,1) with the exogenous regressor in the mean equation
    Fit(FitArgs),
    /// Fit both sides of a cutoff date and compare parameters
    SplitCompare(SplitArgs),
    /// Fit up to a date and score variance forecasts after it
    Forecast(ForecastArgs),
    /// Generate synthetic rate and case files from known parameters
    Simulate(simulate_cmd::SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExogTransform {
    Diff,
    Log,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlignArg {
    Intersect,
    CarryForward,
}

impl From<AlignArg> for AlignPolicy {
    fn from(a: AlignArg) -> Self {
        match a {
            AlignArg::Intersect => AlignPolicy::Intersect,
            AlignArg::CarryForward => AlignPolicy::CarryForward,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Rate file (`date,buy,sell` or `date,rate`); repeat for several series
    #[arg(long = "rates", value_name = "FILE", required = true)]
    pub rates: Vec<PathBuf>,

    /// Case-count file (`date,cases`)
    #[arg(long, value_name = "FILE")]
    pub cases: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ExogTransform::Diff)]
    pub exog_transform: ExogTransform,

    /// Added before taking logs with `--exog-transform log`
    #[arg(long, default_value_t = 0.0)]
    pub log_shift: f64,

    #[arg(long, value_enum, default_value_t = AlignArg::Intersect)]
    pub align: AlignArg,

    /// Drop rows with missing values instead of failing
    #[arg(long)]
    pub drop_missing: bool,

    #[arg(long, default_value = "date")]
    pub date_column: String,
    #[arg(long, default_value = "buy")]
    pub buy_column: String,
    #[arg(long, default_value = "sell")]
    pub sell_column: String,
    /// Level column used when buy/sell are absent
    #[arg(long, default_value = "rate")]
    pub rate_column: String,
    #[arg(long, default_value = "cases")]
    pub cases_column: String,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnosticArgs {
    /// Ljung-Box lags
    #[arg(long, default_value_t = DEFAULT_LJUNG_BOX_LAGS)]
    pub lags: usize,
    /// ARCH-LM lags
    #[arg(long, default_value_t = DEFAULT_ARCH_LAGS)]
    pub arch_lags: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub f_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub x_tol: f64,
    /// Skip the second simplex run from the incumbent
    #[arg(long)]
    pub no_restart: bool,
}

impl OptimizerArgs {
    fn options(&self) -> Result<FitOptions, CliError> {
        if self.max_iterations == 0 || self.f_tol.is_nan() || self.f_tol <= 0.0 || self.x_tol.is_nan() || self.x_tol <= 0.0 {
            return Err(CliError::Usage("optimizer tolerances and iteration cap must be positive".into()));
        }
        Ok(FitOptions {
            max_iterations: self.max_iterations,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            restart: !self.no_restart,
            ..FitOptions::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrendArg {
    N,
    C,
    Ct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LagSelectionArg {
    Bic,
    Aic,
    Fixed,
}

#[derive(Debug, Clone, Args)]
pub struct UnitrootArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Deterministic terms: none, constant, constant and trend
    #[arg(long, value_enum, default_value_t = TrendArg::C)]
    pub trend: TrendArg,
    /// Largest ADF augmentation (default: Schwert rule)
    #[arg(long)]
    pub max_lags: Option<usize>,
    #[arg(long, value_enum, default_value_t = LagSelectionArg::Bic)]
    pub lag_selection: LagSelectionArg,
    /// Phillips-Perron Bartlett bandwidth (default: automatic)
    #[arg(long)]
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    #[arg(long, value_name = "DATE")]
    pub fit_start: Option<NaiveDate>,
    #[arg(long, value_name = "DATE")]
    pub fit_end: Option<NaiveDate>,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    /// Last date of the first period
    #[arg(long, value_name = "DATE")]
    pub cutoff: Option<NaiveDate>,
}

#[derive(Debug, Clone, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, value_name = "DATE")]
    pub fit_start: Option<NaiveDate>,
    /// Last in-sample date; forecasts start after it
    #[arg(long, value_name = "DATE")]
    pub fit_end: Option<NaiveDate>,
    /// Last forecast date (default: end of data)
    #[arg(long, value_name = "DATE")]
    pub forecast_end: Option<NaiveDate>,
    #[arg(long, value_enum, default_value_t = ModeArg::Static)]
    pub mode: ModeArg,
    /// Pair compared by the Theil coefficient
    #[arg(long, value_enum, default_value_t = TheilArg::Variance)]
    pub theil_on: TheilArg,
    /// Write per-date forecasts and bands here
    #[arg(long, value_name = "PATH")]
    pub plot_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheilArg {
    Variance,
    Returns,
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and messages to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let _ = write!(out, "{}", outcome.report.render(cli.format));
            match outcome.failure {
                None => 0,
                Some(e) => {
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// A report plus an error that should still set the exit code.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, failure: None }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Stats(a) => cmd_stats(a).map(Into::into),
        Command::Unitroot(a) => cmd_unitroot(a).map(Into::into),
        Command::Fit(a) => cmd_fit(a),
        Command::SplitCompare(a) => cmd_split_compare(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Simulate(a) => simulate_cmd::cmd_simulate(a).map(Into::into),
    }
}

struct Loaded {
    returns: Vec<DatedSeries>,
    exog: Option<DatedSeries>,
}

fn missing_policy(d: &DataArgs) -> MissingPolicy {
    if d.drop_missing {
        MissingPolicy::Drop
    } else {
        MissingPolicy::Reject
    }
}

fn load(d: &DataArgs) -> Result<Loaded, CliError> {
    let cols = RateColumns {
        date: d.date_column.clone(),
        buy: d.buy_column.clone(),
        sell: d.sell_column.clone(),
        level: d.rate_column.clone(),
    };
    let missing = missing_policy(d);
    let mut returns = Vec::with_capacity(d.rates.len());
    for path in &d.rates {
        let rates = load_rates(path, &cols, missing)?;
        returns.push(log_returns(&rates)?);
    }
    let mut labels: Vec<&str> = returns.iter().map(|s| s.label()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Usage("rate files must have distinct file names (they label the series)".into()));
    }
    let exog = match &d.cases {
        None => None,
        Some(path) => {
            let raw = load_series(path, &d.date_column, &d.cases_column, missing)?;
            Some(match d.exog_transform {
                ExogTransform::Diff => first_difference(&raw)?,
                ExogTransform::Log => log_transform(&raw, d.log_shift)?,
                ExogTransform::None => raw,
            })
        }
    };
    Ok(Loaded { returns, exog })
}

fn datasets(d: &DataArgs) -> Result<Vec<AlignedDataset>, CliError> {
    let loaded = load(d)?;
    let Some(exog) = loaded.exog else {
        return Err(CliError::Usage("--cases is required for this command".into()));
    };
    loaded
        .returns
        .iter()
        .map(|r| align(r, &exog, d.align.into()).map_err(CliError::from))
        .collect()
}

fn labels(data: &[AlignedDataset]) -> Vec<String> {
    data.iter().map(|d| d.return_label().to_string()).collect()
}

pub fn cmd_stats(a: &StatsArgs) -> Result<Report, CliError> {
    let loaded = load(&a.data)?;
    let mut series = loaded.returns;
    series.extend(loaded.exog);
    let stats: Vec<SummaryStats> = series.iter().map(summary_stats).collect::<Result<_, _>>()?;
    let mut t = Table::new("Summary statistics", series.iter().map(|s| s.label().to_string()).collect());
    for (i, name) in SummaryStats::ROW_NAMES.iter().enumerate() {
        t.push(*name, stats.iter().map(|s| Cell::number(s.row_values()[i])).collect());
    }
    let mut r = Report::new("stats");
    r.tables.push(t);
    for (s, st) in series.iter().zip(&stats) {
        r.notes.push(format!("{}: {} observations, {} to {}", s.label(), st.n, s.first_date(), s.last_date()));
    }
    Ok(r)
}

pub fn cmd_unitroot(a: &UnitrootArgs) -> Result<Report, CliError> {
    let loaded = load(&a.data)?;
    let mut series = loaded.returns;
    series.extend(loaded.exog);
    let det = match a.trend {
        TrendArg::N => Deterministic::None,
        TrendArg::C => Deterministic::Constant,
        TrendArg::Ct => Deterministic::ConstantTrend,
    };
    let sel = match a.lag_selection {
        LagSelectionArg::Bic => LagSelection::Bic,
        LagSelectionArg::Aic => LagSelection::Aic,
        LagSelectionArg::Fixed => LagSelection::Fixed,
    };
    if sel == LagSelection::Fixed && a.max_lags.is_none() {
        return Err(CliError::Usage("--lag-selection fixed needs --max-lags".into()));
    }
    let bw = a.bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed);

    let mut tests = Table::new("Unit root tests", vec!["ADF".into(), "PP".into()]);
    let mut details = Table::new(
        "Unit root test details",
        vec![
            "ADF lags".into(),
            "PP bandwidth".into(),
            "Observations".into(),
            "ADF 5% critical value".into(),
            "PP 5% critical value".into(),
        ],
    );
    for s in &series {
        let adf = adf_test(s, a.max_lags, det, sel)?;
        let pp = pp_test(s, det, bw)?;
        tests.push(s.label(), vec![Cell::stat(adf.statistic, adf.p_value), Cell::stat(pp.statistic, pp.p_value)]);
        details.push(
            s.label(),
            vec![
                Cell::number(adf.lags_used as f64),
                Cell::number(pp.lags_used as f64),
                Cell::number(s.len() as f64),
                Cell::number(adf.critical_values.five_pct),
                Cell::number(pp.critical_values.five_pct),
            ],
        );
    }
    let mut r = Report::new("unitroot");
    r.tables.push(tests);
    r.tables.push(details);
    r.notes.push("null hypothesis: the series has a unit root; cells show statistic (p-value)".into());
    Ok(r)
}

struct Diagnostics {
    lb: TestResult,
    arch: TestResult,
}

fn diagnose(f: &GarchFit, d: &DiagnosticArgs) -> Result<Diagnostics, CliError> {
    let z = f.std_residuals.values();
    Ok(Diagnostics {
        lb: ljung_box(z, d.lags)?,
        arch: arch_lm(z, d.arch_lags)?,
    })
}

/// Fits every dataset on its own thread, keeping input order.
fn fit_all(data: &[AlignedDataset], opts: &FitOptions) -> Result<Vec<GarchFit>, CliError> {
    std::thread::scope(|s| {
        let handles: Vec<_> = data.iter().map(|d| s.spawn(move || fit(d, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fit thread panicked").map_err(CliError::from))
            .collect()
    })
}

pub const PARAM_ROWS: [&str; 5] = [
    "Mean: constant (alpha0)",
    "Mean: exogenous (alpha1)",
    "Variance: constant (beta0)",
    "Variance: GARCH term (beta1)",
    "Variance: ARCH term (beta2)",
];

fn estimate_cell(f: &GarchFit, i: usize) -> Cell {
    Cell::estimate(f.params.to_array()[i], f.std_errors[i], f.z_stats[i], f.p_values[i])
}

fn yes_no(b: bool) -> Cell {
    Cell::text(if b { "Yes" } else { "No" })
}

/// Rows shared by the fit and split-compare tables.
fn fit_rows(t: &mut Table, fits: &[&GarchFit], diags: &[Diagnostics], d: &DiagnosticArgs) {
    for (i, name) in PARAM_ROWS.iter().enumerate() {
        t.push(*name, fits.iter().map(|f| estimate_cell(f, i)).collect());
    }
    t.push("beta1 + beta2", fits.iter().map(|f| Cell::number(f.params.persistence())).collect());
    t.push(
        "Unconditional variance",
        fits.iter().map(|f| Cell::number(f.params.unconditional_variance().unwrap_or(f64::NAN))).collect(),
    );
    t.push("Log likelihood", fits.iter().map(|f| Cell::number(f.log_likelihood)).collect());
    t.push("Observations", fits.iter().map(|f| Cell::number(f.nobs as f64)).collect());
    t.push("Iterations", fits.iter().map(|f| Cell::number(f.iterations as f64)).collect());
    t.push("Converged", fits.iter().map(|f| yes_no(f.converged)).collect());
    t.push(
        format!("Ljung-Box Q({})", d.lags),
        diags.iter().map(|x| Cell::stat(x.lb.statistic, x.lb.p_value)).collect(),
    );
    t.push("Serial correlation", diags.iter().map(|x| Cell::text(x.lb.verdict.yes_no())).collect());
    t.push(
        format!("ARCH-LM({})", d.arch_lags),
        diags.iter().map(|x| Cell::stat(x.arch.statistic, x.arch.p_value)).collect(),
    );
    t.push("ARCH effect", diags.iter().map(|x| Cell::text(x.arch.verdict.yes_no())).collect());
}

fn fit_notes(r: &mut Report, label: &str, f: &GarchFit) {
    for w in &f.warnings {
        r.notes.push(format!("{label}: {w}"));
    }
}

fn convergence_failure(fits: &[(&str, &GarchFit)]) -> Option<CliError> {
    let bad: Vec<&str> = fits.iter().filter(|(_, f)| !f.converged).map(|(l, _)| *l).collect();
    (!bad.is_empty()).then(|| CliError::Numerical(format!("fit did not converge for: {}", bad.join(", "))))
}

fn restrict(d: &AlignedDataset, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Result<AlignedDataset, CliError> {
    if start.is_none() && end.is_none() {
        return Ok(d.clone());
    }
    let s = start.unwrap_or(d.first_date());
    let e = end.unwrap_or(d.last_date());
    if e < s {
        return Err(CliError::Usage(format!("sample end {e} precedes start {s}")));
    }
    Ok(d.between(s, e)?)
}

pub fn cmd_fit(a: &FitArgs) -> Result<Outcome, CliError> {
    let opts = a.optimizer.options()?;
    let data: Vec<AlignedDataset> = datasets(&a.data)?
        .iter()
        .map(|d| restrict(d, a.fit_start, a.fit_end))
        .collect::<Result<_, _>>()?;
    let fits = fit_all(&data, &opts)?;
    let diags: Vec<Diagnostics> = fits.iter().map(|f| diagnose(f, &a.diagnostics)).collect::<Result<_, _>>()?;
    let names = labels(&data);
    let mut t = Table::new("GARCH(1,1) estimation", names.clone());
    fit_rows(&mut t, &fits.iter().collect::<Vec<_>>(), &diags, &a.diagnostics);
    let mut r = Report::new("fit");
    r.tables.push(t);
    r.notes.push(format!(
        "mean equation r = alpha0 + alpha1 x + e with x = {}; alpha1 is an effect on the mean return",
        data[0].exog_label()
    ));
    r.notes.push("diagnostics use standardized residuals".into());
    for (l, f) in names.iter().zip(&fits) {
        fit_notes(&mut r, l, f);
    }
    let failure = convergence_failure(&names.iter().map(String::as_str).zip(&fits).collect::<Vec<_>>());
    Ok(Outcome { report: r, failure })
}

pub fn cmd_split_compare(a: &SplitArgs) -> Result<Outcome, CliError> {
    let Some(cutoff) = a.cutoff else {
        return Err(CliError::Usage("split-compare needs --cutoff DATE".into()));
    };
    let opts = a.optimizer.options()?;
    let data = datasets(&a.data)?;
    let mut halves = Vec::with_capacity(2 * data.len());
    for d in &data {
        let (p1, p2) = split_period(d, cutoff)?;
        halves.push(p1);
        halves.push(p2);
    }
    let fits = fit_all(&halves, &opts)?;
    let names = labels(&data);
    let mut r = Report::new("split-compare");

    let mut summary = Table::new("Structural break summary", names.clone());
    let pairs: Vec<(&GarchFit, &GarchFit)> = fits.chunks(2).map(|c| (&c[0], &c[1])).collect();
    summary.push("alpha1 period 1", pairs.iter().map(|(a, _)| Cell::number(a.params.alpha1)).collect());
    summary.push("alpha1 period 2", pairs.iter().map(|(_, b)| Cell::number(b.params.alpha1)).collect());
    summary.push(
        "alpha1 sign change",
        pairs.iter().map(|(a, b)| yes_no(a.params.alpha1.signum() != b.params.alpha1.signum())).collect(),
    );
    summary.push("beta1 + beta2 period 1", pairs.iter().map(|(a, _)| Cell::number(a.params.persistence())).collect());
    summary.push("beta1 + beta2 period 2", pairs.iter().map(|(_, b)| Cell::number(b.params.persistence())).collect());

    let mut all = Vec::new();
    for ((name, d), (f1, f2)) in names.iter().zip(&halves.chunks(2).collect::<Vec<_>>()).zip(&pairs) {
        let diags = [diagnose(f1, &a.diagnostics)?, diagnose(f2, &a.diagnostics)?];
        let mut t = Table::new(
            format!("{name}: periods split at {cutoff}"),
            vec![
                format!("{} to {}", d[0].first_date(), d[0].last_date()),
                format!("{} to {}", d[1].first_date(), d[1].last_date()),
            ],
        );
        fit_rows(&mut t, &[f1, f2], &diags, &a.diagnostics);
        t.columns.push("Change".into());
        let (p1, p2) = (f1.params.to_array(), f2.params.to_array());
        for (i, row) in t.rows.iter_mut().enumerate() {
            row.cells.push(match i {
                0..=4 => Cell::number(p2[i] - p1[i]),
                5 => Cell::number(f2.params.persistence() - f1.params.persistence()),
                _ => Cell::Empty,
            });
        }
        r.tables.push(t);
        fit_notes(&mut r, &format!("{name} period 1"), f1);
        fit_notes(&mut r, &format!("{name} period 2"), f2);
        all.push((format!("{name} period 1"), *f1));
        all.push((format!("{name} period 2"), *f2));
    }
    r.tables.insert(0, summary);
    let failure = convergence_failure(&all.iter().map(|(l, f)| (l.as_str(), *f)).collect::<Vec<_>>());
    Ok(Outcome { report: r, failure })
}

pub fn cmd_forecast(a: &ForecastArgs) -> Result<Outcome, CliError> {
    let Some(fit_end) = a.fit_end else {
        return Err(CliError::Usage("forecast needs --fit-end DATE (last in-sample date)".into()));
    };
    let opts = a.optimizer.options()?;
    let data = datasets(&a.data)?;
    let samples: Vec<AlignedDataset> = data
        .iter()
        .map(|d| restrict(d, a.fit_start, Some(fit_end)))
        .collect::<Result<_, _>>()?;
    let fits = fit_all(&samples, &opts)?;
    let mode = match a.mode {
        ModeArg::Static => ForecastMode::Static,
        ModeArg::Dynamic => ForecastMode::Dynamic,
    };
    let target = match a.theil_on {
        TheilArg::Variance => TheilTarget::Variance,
        TheilArg::Returns => TheilTarget::Returns,
    };
    let names = labels(&data);
    let mut evals: Vec<ForecastEvaluation> = Vec::new();
    let mut windows = Vec::new();
    let mut plot = Vec::new();
    for (d, f) in data.iter().zip(&fits) {
        let start = fit_end.succ_opt().ok_or_else(|| CliError::Usage("fit end date out of range".into()))?;
        let end = a.forecast_end.unwrap_or(d.last_date());
        let window = ForecastWindow::new(start, end).map_err(|e| CliError::Usage(e.to_string()))?;
        let fc = forecast(f, d, &window, mode)?;
        evals.push(evaluate(&fc, d, target)?);
        windows.push((fc.dates[0], *fc.dates.last().expect("non-empty forecast"), fc.len()));
        plot.push(plot_rows(&fc, d)?);
    }

    let mode_name = match mode {
        ForecastMode::Static => "static",
        ForecastMode::Dynamic => "dynamic",
    };
    let mut t = Table::new(format!("Forecast evaluation ({mode_name})"), names.clone());
    for (i, name) in ForecastEvaluation::ROW_NAMES.iter().enumerate() {
        t.push(*name, evals.iter().map(|e| Cell::number(e.row_values()[i])).collect());
    }
    t.push("Forecast start", windows.iter().map(|w| Cell::text(w.0.to_string())).collect());
    t.push("Forecast end", windows.iter().map(|w| Cell::text(w.1.to_string())).collect());
    t.push("Forecast observations", windows.iter().map(|w| Cell::number(w.2 as f64)).collect());
    t.push("Estimation observations", fits.iter().map(|f| Cell::number(f.nobs as f64)).collect());
    let mut r = Report::new("forecast");
    r.tables.push(t);
    r.notes.push("RMSE and MAE compare squared returns with the variance forecast".into());
    r.notes.push(match target {
        TheilTarget::Variance => "Theil coefficient on squared returns vs variance forecast".into(),
        TheilTarget::Returns => "Theil coefficient on returns vs mean forecast".into(),
    });
    for (l, f) in names.iter().zip(&fits) {
        fit_notes(&mut r, l, f);
    }
    if let Some(path) = &a.plot_csv {
        write_plot(path, &names, &plot)?;
        r.notes.push(format!("forecast paths written to {}", path.display()));
    }
    let failure = convergence_failure(&names.iter().map(String::as_str).zip(&fits).collect::<Vec<_>>());
    Ok(Outcome { report: r, failure })
}

fn write_plot(path: &Path, names: &[String], rows: &[Vec<crate::forecast::PlotRow>]) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(Error::from)?;
    let mut w = csv::Writer::from_writer(file);
    let io_err = |e: csv::Error| CliError::Data(Error::Io(std::io::Error::other(e)));
    w.write_record([
        "series",
        "date",
        "actual_return",
        "mean_forecast",
        "lower_2sd",
        "upper_2sd",
        "squared_return",
        "variance_forecast",
    ])
    .map_err(io_err)?;
    for (name, series) in names.iter().zip(rows) {
        for p in series {
            w.write_record([
                name.clone(),
                p.date.to_string(),
                p.actual_return.to_string(),
                p.mean_forecast.to_string(),
                p.lower.to_string(),
                p.upper.to_string(),
                p.squared_return.to_string(),
                p.variance_forecast.to_string(),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}
