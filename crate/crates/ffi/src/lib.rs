//! C ABI for `garchx`.
//!
//! Every fallible function returns a [`GarchxStatus`]; on failure the message
//! is kept per thread and read back with [`garchx_last_error`]. Datasets and
//! fits are opaque handles owned by the caller and released with their
//! `_free` function. Arrays are passed as pointer plus length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chrono::NaiveDate;
use garchx::diagnostics::{arch_lm, ljung_box};
use garchx::forecast::{self, ForecastMode, ForecastWindow, TheilTarget};
use garchx::simulate::{simulate, SimConfig};
use garchx::timeseries::daily_dates;
use garchx::unitroot::{adf, pp, Bandwidth, Deterministic, LagSelection, UnitRootResult};
use garchx::{AlignedDataset, Error, FitOptions, GarchFit, GarchParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    Degenerate = 4,
    Numerical = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchxTrend {
    None = 0,
    Constant = 1,
    ConstantTrend = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchxForecastMode {
    Static = 0,
    Dynamic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GarchxTheilTarget {
    Variance = 0,
    Returns = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub min: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub jarque_bera: f64,
    pub jb_p_value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxUnitRoot {
    pub statistic: f64,
    pub p_value: f64,
    /// Augmentation lags (ADF) or bandwidth (PP).
    pub lags_used: usize,
    pub nobs: usize,
    pub crit_1pct: f64,
    pub crit_5pct: f64,
    pub crit_10pct: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxTest {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchxFitOptions {
    pub max_iterations: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub restart: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxFitSummary {
    pub params: GarchxParams,
    /// NaN when the Hessian is not invertible.
    pub std_errors: [f64; 5],
    pub z_stats: [f64; 5],
    pub p_values: [f64; 5],
    pub log_likelihood: f64,
    pub nobs: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GarchxEvaluation {
    pub rmse: f64,
    pub mae: f64,
    pub theil_u: f64,
    pub n: usize,
}

/// Aligned returns and exogenous values.
pub struct GarchxDataset(AlignedDataset);

/// A fitted model.
pub struct GarchxFit(GarchFit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(GarchxStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::TooShort { .. } | Error::EmptyIntersection => GarchxStatus::InsufficientData,
            Error::Degenerate(_) | Error::RankDeficient { .. } => GarchxStatus::Degenerate,
            Error::NonFinite { .. } => GarchxStatus::Numerical,
            Error::Io(_) | Error::Csv { .. } | Error::MissingColumn { .. } => GarchxStatus::Io,
            _ => GarchxStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GarchxStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(GarchxStatus::InvalidArgument, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> GarchxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            GarchxStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GarchxStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn dataset_ref<'a>(p: *const GarchxDataset) -> Result<&'a AlignedDataset, Failure> {
    p.as_ref().map(|d| &d.0).ok_or_else(|| null("dataset"))
}

unsafe fn fit_ref<'a>(p: *const GarchxFit) -> Result<&'a GarchFit, Failure> {
    p.as_ref().map(|f| &f.0).ok_or_else(|| null("fit"))
}

fn params(p: &GarchxParams) -> Result<GarchParams, Failure> {
    Ok(GarchParams::new(p.alpha0, p.alpha1, p.beta0, p.beta1, p.beta2)?)
}

fn c_params(p: &GarchParams) -> GarchxParams {
    GarchxParams {
        alpha0: p.alpha0,
        alpha1: p.alpha1,
        beta0: p.beta0,
        beta1: p.beta1,
        beta2: p.beta2,
    }
}

fn trend(t: GarchxTrend) -> Deterministic {
    match t {
        GarchxTrend::None => Deterministic::None,
        GarchxTrend::Constant => Deterministic::Constant,
        GarchxTrend::ConstantTrend => Deterministic::ConstantTrend,
    }
}

fn unit_root(r: &UnitRootResult) -> GarchxUnitRoot {
    GarchxUnitRoot {
        statistic: r.statistic,
        p_value: r.p_value,
        lags_used: r.lags_used,
        nobs: r.nobs,
        crit_1pct: r.critical_values.one_pct,
        crit_5pct: r.critical_values.five_pct,
        crit_10pct: r.critical_values.ten_pct,
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, written: *mut usize) -> Result<(), Failure> {
    let written = out(written, "written")?;
    *written = src.len();
    if cap < src.len() {
        return Err(Failure(
            GarchxStatus::BufferTooSmall,
            format!("buffer holds {cap} values, need {}", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next `garchx_*` call on the same thread.
#[no_mangle]
pub extern "C" fn garchx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn garchx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `statistic` and `p_value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_jarque_bera(
    n: usize,
    skewness: f64,
    kurtosis: f64,
    statistic: *mut f64,
    p_value: *mut f64,
) -> GarchxStatus {
    guard(|| {
        let (s, p) = garchx::descriptive::jarque_bera(n, skewness, kurtosis)?;
        *out(statistic, "statistic")? = s;
        *out(p_value, "p_value")? = p;
        Ok(())
    })
}

/// # Safety
/// `values` must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_summary(values: *const f64, len: usize, result: *mut GarchxSummary) -> GarchxStatus {
    guard(|| {
        let s = garchx::descriptive::summarize(slice(values, len, "values")?)?;
        *out(result, "result")? = GarchxSummary {
            n: s.n,
            mean: s.mean,
            median: s.median,
            max: s.max,
            min: s.min,
            std_dev: s.std_dev,
            skewness: s.skewness,
            kurtosis: s.kurtosis,
            jarque_bera: s.jarque_bera,
            jb_p_value: s.jb_p_value,
        };
        Ok(())
    })
}

/// ADF test with BIC lag selection. A negative `max_lags` uses the default
/// maximum.
///
/// # Safety
/// `values` must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_adf(
    values: *const f64,
    len: usize,
    trend_kind: GarchxTrend,
    max_lags: i64,
    result: *mut GarchxUnitRoot,
) -> GarchxStatus {
    guard(|| {
        let y = slice(values, len, "values")?;
        let max = usize::try_from(max_lags).ok();
        let r = adf(y, max, trend(trend_kind), LagSelection::Bic)?;
        *out(result, "result")? = unit_root(&r);
        Ok(())
    })
}

/// Phillips-Perron test. A negative `bandwidth` uses the automatic choice.
///
/// # Safety
/// `values` must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_pp(
    values: *const f64,
    len: usize,
    trend_kind: GarchxTrend,
    bandwidth: i64,
    result: *mut GarchxUnitRoot,
) -> GarchxStatus {
    guard(|| {
        let y = slice(values, len, "values")?;
        let bw = usize::try_from(bandwidth).map_or(Bandwidth::Auto, Bandwidth::Fixed);
        let r = pp(y, trend(trend_kind), bw)?;
        *out(result, "result")? = unit_root(&r);
        Ok(())
    })
}

/// # Safety
/// `values` must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_ljung_box(
    values: *const f64,
    len: usize,
    lags: usize,
    result: *mut GarchxTest,
) -> GarchxStatus {
    guard(|| {
        let t = ljung_box(slice(values, len, "values")?, lags)?;
        *out(result, "result")? = GarchxTest {
            statistic: t.statistic,
            p_value: t.p_value,
            lags: t.lags,
        };
        Ok(())
    })
}

/// # Safety
/// `values` must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_arch_lm(
    values: *const f64,
    len: usize,
    lags: usize,
    result: *mut GarchxTest,
) -> GarchxStatus {
    guard(|| {
        let t = arch_lm(slice(values, len, "values")?, lags)?;
        *out(result, "result")? = GarchxTest {
            statistic: t.statistic,
            p_value: t.p_value,
            lags: t.lags,
        };
        Ok(())
    })
}

/// Fills `result` with RMSE, MAE and Theil's U of `forecast` against `actual`.
///
/// # Safety
/// Both arrays must point to `len` doubles; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_forecast_metrics(
    actual: *const f64,
    forecast: *const f64,
    len: usize,
    result: *mut GarchxEvaluation,
) -> GarchxStatus {
    guard(|| {
        let a = slice(actual, len, "actual")?;
        let f = slice(forecast, len, "forecast")?;
        *out(result, "result")? = GarchxEvaluation {
            rmse: forecast::rmse(a, f)?,
            mae: forecast::mae(a, f)?,
            theil_u: forecast::theil_u(a, f)?,
            n: len,
        };
        Ok(())
    })
}

/// Writes `steps` dynamic variance forecasts starting from `first`.
///
/// # Safety
/// `model` must be valid for reads and `buf` for `steps` writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_dynamic_variance(
    model: *const GarchxParams,
    first: f64,
    steps: usize,
    buf: *mut f64,
) -> GarchxStatus {
    guard(|| {
        let p = params(model.as_ref().ok_or_else(|| null("model"))?)?;
        if !(first > 0.0 && first.is_finite()) {
            return Err(invalid(format!("first variance must be positive, got {first}")));
        }
        let path = forecast::dynamic_variance_path(&p, first, steps);
        let mut n = 0;
        copy_out(&path, buf, steps, &mut n)
    })
}

/// Builds a dataset from parallel arrays dated daily from `start_date`
/// (`YYYY-MM-DD`, or null for 2000-01-01).
///
/// # Safety
/// `returns` and `exog` must point to `len` doubles, `start_date` must be
/// null or a nul-terminated string, and `dataset_out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_new(
    returns: *const f64,
    exog: *const f64,
    len: usize,
    start_date: *const c_char,
    dataset_out: *mut *mut GarchxDataset,
) -> GarchxStatus {
    guard(|| {
        let slot = out(dataset_out, "dataset_out")?;
        *slot = ptr::null_mut();
        let r = slice(returns, len, "returns")?;
        let x = slice(exog, len, "exog")?;
        let start = if start_date.is_null() {
            NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
        } else {
            let s = CStr::from_ptr(start_date)
                .to_str()
                .map_err(|_| invalid("start_date is not UTF-8"))?;
            s.parse()
                .map_err(|e| invalid(format!("start_date `{s}`: {e}")))?
        };
        let d = AlignedDataset::new(daily_dates(start, len), r.to_vec(), x.to_vec(), "return", "exog")?;
        *slot = Box::into_raw(Box::new(GarchxDataset(d)));
        Ok(())
    })
}

/// Simulates `length` observations with standard normal exogenous values.
///
/// # Safety
/// `model` must be valid for reads and `dataset_out` for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_simulate(
    model: *const GarchxParams,
    length: usize,
    seed: u64,
    dataset_out: *mut *mut GarchxDataset,
) -> GarchxStatus {
    guard(|| {
        let slot = out(dataset_out, "dataset_out")?;
        *slot = ptr::null_mut();
        let p = params(model.as_ref().ok_or_else(|| null("model"))?)?;
        let d = simulate(&SimConfig::new(p, length, seed))?.dataset()?;
        *slot = Box::into_raw(Box::new(GarchxDataset(d)));
        Ok(())
    })
}

/// Rows `first..=last` (0-based) of `dataset` as a new dataset.
///
/// # Safety
/// `dataset` must be a live handle and `dataset_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_slice(
    dataset: *const GarchxDataset,
    first: usize,
    last: usize,
    dataset_out: *mut *mut GarchxDataset,
) -> GarchxStatus {
    guard(|| {
        let slot = out(dataset_out, "dataset_out")?;
        *slot = ptr::null_mut();
        let d = dataset_ref(dataset)?;
        if first > last || last >= d.len() {
            return Err(invalid(format!("rows {first}..={last} outside 0..{}", d.len())));
        }
        let s = d.between(d.dates()[first], d.dates()[last])?;
        *slot = Box::into_raw(Box::new(GarchxDataset(s)));
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_len(dataset: *const GarchxDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `dataset` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_returns(
    dataset: *const GarchxDataset,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> GarchxStatus {
    guard(|| copy_out(dataset_ref(dataset)?.returns(), buf, cap, written))
}

/// # Safety
/// `dataset` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_exog(
    dataset: *const GarchxDataset,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> GarchxStatus {
    guard(|| copy_out(dataset_ref(dataset)?.exog(), buf, cap, written))
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn garchx_dataset_free(dataset: *mut GarchxDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Optimizer defaults.
#[no_mangle]
pub extern "C" fn garchx_fit_options_default() -> GarchxFitOptions {
    let d = FitOptions::default();
    GarchxFitOptions {
        max_iterations: d.max_iterations,
        f_tol: d.f_tol,
        x_tol: d.x_tol,
        restart: d.restart,
    }
}

/// Fits the model. A fit that stops at the iteration cap is still returned
/// (check `converged`). `options` may be null for the defaults.
///
/// # Safety
/// `dataset` must be a live handle, `options` null or valid for reads, and
/// `fit_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_fit(
    dataset: *const GarchxDataset,
    options: *const GarchxFitOptions,
    fit_out: *mut *mut GarchxFit,
) -> GarchxStatus {
    guard(|| {
        let slot = out(fit_out, "fit_out")?;
        *slot = ptr::null_mut();
        let d = dataset_ref(dataset)?;
        let mut opts = FitOptions::default();
        if let Some(o) = options.as_ref() {
            opts.max_iterations = o.max_iterations;
            opts.f_tol = o.f_tol;
            opts.x_tol = o.x_tol;
            opts.restart = o.restart;
        }
        let f = garchx::fit(d, &opts)?;
        *slot = Box::into_raw(Box::new(GarchxFit(f)));
        Ok(())
    })
}

/// # Safety
/// `fit` must be a live handle and `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_fit_summary(fit: *const GarchxFit, result: *mut GarchxFitSummary) -> GarchxStatus {
    guard(|| {
        let f = fit_ref(fit)?;
        *out(result, "result")? = GarchxFitSummary {
            params: c_params(&f.params),
            std_errors: f.std_errors,
            z_stats: f.z_stats,
            p_values: f.p_values,
            log_likelihood: f.log_likelihood,
            nobs: f.nobs,
            iterations: f.iterations,
            converged: f.converged,
        };
        Ok(())
    })
}

/// In-sample conditional variances.
///
/// # Safety
/// `fit` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_fit_cond_variance(
    fit: *const GarchxFit,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> GarchxStatus {
    guard(|| copy_out(fit_ref(fit)?.cond_variance.values(), buf, cap, written))
}

/// # Safety
/// `fit` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_fit_std_residuals(
    fit: *const GarchxFit,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> GarchxStatus {
    guard(|| copy_out(fit_ref(fit)?.std_residuals.values(), buf, cap, written))
}

/// Forecasts rows `first..=last` of `dataset`, which must come after the
/// estimation sample of `fit`, and scores them.
///
/// # Safety
/// `fit` and `dataset` must be live handles and `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn garchx_forecast_evaluate(
    fit: *const GarchxFit,
    dataset: *const GarchxDataset,
    first: usize,
    last: usize,
    mode: GarchxForecastMode,
    target: GarchxTheilTarget,
    result: *mut GarchxEvaluation,
) -> GarchxStatus {
    guard(|| {
        let f = fit_ref(fit)?;
        let d = dataset_ref(dataset)?;
        if first > last || last >= d.len() {
            return Err(invalid(format!("rows {first}..={last} outside 0..{}", d.len())));
        }
        let window = ForecastWindow::new(d.dates()[first], d.dates()[last])?;
        let mode = match mode {
            GarchxForecastMode::Static => ForecastMode::Static,
            GarchxForecastMode::Dynamic => ForecastMode::Dynamic,
        };
        let target = match target {
            GarchxTheilTarget::Variance => TheilTarget::Variance,
            GarchxTheilTarget::Returns => TheilTarget::Returns,
        };
        let fc = forecast::forecast(f, d, &window, mode)?;
        let e = forecast::evaluate(&fc, d, target)?;
        *out(result, "result")? = GarchxEvaluation {
            rmse: e.rmse,
            mae: e.mae,
            theil_u: e.theil_u,
            n: fc.len(),
        };
        Ok(())
    })
}

/// # Safety
/// `fit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn garchx_fit_free(fit: *mut GarchxFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}
