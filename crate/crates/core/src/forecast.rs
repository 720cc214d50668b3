//! Out-of-sample conditional mean and variance forecasts and their
//! evaluation against the squared-return proxy.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::{GarchFit, GarchParams};
use crate::timeseries::AlignedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecastMode {
    /// One step ahead, conditioning on realized residuals.
    #[default]
    Static,
    /// Multi-step from the origin; future squared shocks replaced by `h`.
    Dynamic,
}

/// Series the Theil coefficient compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheilTarget {
    /// Squared returns against the variance forecast.
    #[default]
    Variance,
    /// Returns against the mean forecast.
    Returns,
}

/// Inclusive date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl ForecastWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!("forecast window ends ({end}) before it starts ({start})")));
        }
        Ok(Self { start, end })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub dates: Vec<NaiveDate>,
    pub mean_forecast: Vec<f64>,
    pub variance_forecast: Vec<f64>,
    pub mode: ForecastMode,
    /// Last in-sample date.
    pub origin: NaiveDate,
}

impl ForecastResult {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastEvaluation {
    pub rmse: f64,
    pub mae: f64,
    pub theil_u: f64,
}

impl ForecastEvaluation {
    pub const ROW_NAMES: [&'static str; 3] = [
        "Root Mean Squared Error",
        "Mean Absolute Error",
        "Theil Inequality Coefficient",
    ];

    pub fn row_values(&self) -> [f64; 3] {
        [self.rmse, self.mae, self.theil_u]
    }
}

/// `h_{k+1} = beta0 + (beta1 + beta2) h_k` for `steps` values starting at
/// `first`.
pub fn dynamic_variance_path(params: &GarchParams, first: f64, steps: usize) -> Vec<f64> {
    let phi = params.persistence();
    let mut out = Vec::with_capacity(steps);
    let mut h = first;
    for _ in 0..steps {
        out.push(h);
        h = params.beta0 + phi * h;
    }
    out
}

/// Rows of `data` after the fit's last date and up to the window end, plus
/// the offset of the first row inside the window.
fn horizon(fit: &GarchFit, data: &AlignedDataset, window: &ForecastWindow) -> Result<(std::ops::Range<usize>, usize, NaiveDate)> {
    let origin = fit.residuals.last_date();
    if window.start <= origin {
        return Err(Error::invalid(format!(
            "forecast window must start after the estimation sample ends ({origin}), got {}",
            window.start
        )));
    }
    let after = data.dates().partition_point(|d| *d <= origin);
    let end = data.dates().partition_point(|d| *d <= window.end);
    let first_in_window = data.dates().partition_point(|d| *d < window.start);
    if first_in_window >= end {
        return Err(Error::DateOutOfRange {
            date: window.start,
            first: data.first_date(),
            last: data.last_date(),
        });
    }
    if window.end > data.last_date() {
        return Err(Error::DateOutOfRange {
            date: window.end,
            first: data.first_date(),
            last: data.last_date(),
        });
    }
    Ok((after..end, first_in_window - after, origin))
}

fn first_step(fit: &GarchFit) -> f64 {
    let p = &fit.params;
    let h_t = *fit.cond_variance.values().last().expect("non-empty fit");
    let e_t = *fit.residuals.values().last().expect("non-empty fit");
    p.beta0 + p.beta1 * h_t + p.beta2 * e_t * e_t
}

fn assemble(
    fit: &GarchFit,
    data: &AlignedDataset,
    rows: std::ops::Range<usize>,
    skip: usize,
    variance: Vec<f64>,
    mode: ForecastMode,
    origin: NaiveDate,
) -> ForecastResult {
    let p = &fit.params;
    let rows = rows.start + skip..rows.end;
    ForecastResult {
        dates: data.dates()[rows.clone()].to_vec(),
        mean_forecast: data.exog()[rows].iter().map(|x| p.alpha0 + p.alpha1 * x).collect(),
        variance_forecast: variance[skip..].to_vec(),
        mode,
        origin,
    }
}

/// One-step-ahead forecasts over `window`, feeding realized residuals from
/// `data` into the recursion.
pub fn forecast_static(fit: &GarchFit, data: &AlignedDataset, window: &ForecastWindow) -> Result<ForecastResult> {
    let (rows, skip, origin) = horizon(fit, data, window)?;
    let p = &fit.params;
    let mut h = first_step(fit);
    let mut variance = Vec::with_capacity(rows.len());
    for i in rows.clone() {
        variance.push(h);
        let e = data.returns()[i] - p.alpha0 - p.alpha1 * data.exog()[i];
        h = p.beta0 + p.beta1 * h + p.beta2 * e * e;
    }
    Ok(assemble(fit, data, rows, skip, variance, ForecastMode::Static, origin))
}

/// Multi-step forecasts from the origin; the horizon counts rows of `data`.
pub fn forecast_dynamic(fit: &GarchFit, data: &AlignedDataset, window: &ForecastWindow) -> Result<ForecastResult> {
    let (rows, skip, origin) = horizon(fit, data, window)?;
    let variance = dynamic_variance_path(&fit.params, first_step(fit), rows.len());
    Ok(assemble(fit, data, rows, skip, variance, ForecastMode::Dynamic, origin))
}

pub fn forecast(fit: &GarchFit, data: &AlignedDataset, window: &ForecastWindow, mode: ForecastMode) -> Result<ForecastResult> {
    match mode {
        ForecastMode::Static => forecast_static(fit, data, window),
        ForecastMode::Dynamic => forecast_dynamic(fit, data, window),
    }
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::TooShort {
            what: "forecast metric",
            needed: 1,
            got: 0,
        });
    }
    if let Some(i) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "forecast metric input".into(),
            index: i % a.len(),
        });
    }
    Ok(())
}

fn rms(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

pub fn rmse(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    Ok(rms(actual.iter().zip(forecast).map(|(a, f)| a - f), actual.len()))
}

pub fn mae(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    Ok(actual.iter().zip(forecast).map(|(a, f)| (a - f).abs()).sum::<f64>() / actual.len() as f64)
}

/// `rms(x - y) / (rms(x) + rms(y))`
pub fn theil_u(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len();
    let denom = rms(x.iter().copied(), n) + rms(y.iter().copied(), n);
    if denom == 0.0 {
        return Err(Error::Degenerate("Theil coefficient of two zero vectors".into()));
    }
    let u = rms(x.iter().zip(y).map(|(a, b)| a - b), n) / denom;
    Ok(u.min(1.0))
}

/// Realized returns on the forecast dates.
fn realized(forecast: &ForecastResult, data: &AlignedDataset) -> Result<Vec<f64>> {
    forecast
        .dates
        .iter()
        .map(|d| {
            data.position(*d).map(|i| data.returns()[i]).ok_or(Error::DateOutOfRange {
                date: *d,
                first: data.first_date(),
                last: data.last_date(),
            })
        })
        .collect()
}

/// RMSE and MAE of the variance forecast against `r_t^2`; Theil-U on the
/// pair selected by `target`.
pub fn evaluate(forecast: &ForecastResult, data: &AlignedDataset, target: TheilTarget) -> Result<ForecastEvaluation> {
    let r = realized(forecast, data)?;
    let proxy: Vec<f64> = r.iter().map(|v| v * v).collect();
    let theil = match target {
        TheilTarget::Variance => theil_u(&proxy, &forecast.variance_forecast)?,
        TheilTarget::Returns => theil_u(&r, &forecast.mean_forecast)?,
    };
    Ok(ForecastEvaluation {
        rmse: rmse(&proxy, &forecast.variance_forecast)?,
        mae: mae(&proxy, &forecast.variance_forecast)?,
        theil_u: theil,
    })
}

/// One row of the plottable forecast table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub date: NaiveDate,
    pub actual_return: f64,
    pub mean_forecast: f64,
    pub lower: f64,
    pub upper: f64,
    pub squared_return: f64,
    pub variance_forecast: f64,
}

/// Mean forecast with a `±2 sqrt(h)` band next to the variance proxy.
pub fn plot_rows(forecast: &ForecastResult, data: &AlignedDataset) -> Result<Vec<PlotRow>> {
    let r = realized(forecast, data)?;
    Ok(forecast
        .dates
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let band = 2.0 * forecast.variance_forecast[i].sqrt();
            PlotRow {
                date: *d,
                actual_return: r[i],
                mean_forecast: forecast.mean_forecast[i],
                lower: forecast.mean_forecast[i] - band,
                upper: forecast.mean_forecast[i] + band,
                squared_return: r[i] * r[i],
                variance_forecast: forecast.variance_forecast[i],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garch::{fit, variance_recursion, FitOptions};
    use crate::simulate::{simulate, NormalStream, SimConfig};
    use proptest::prelude::*;

    fn setup(seed: u64) -> (GarchFit, AlignedDataset, NaiveDate) {
        let p = GarchParams::new(0.0, 0.5, 0.1, 0.8, 0.1).unwrap();
        let data = simulate(&SimConfig::new(p, 600, seed)).unwrap().dataset().unwrap();
        let cut = data.dates()[499];
        let f = fit(&data.rows(0..500).unwrap(), &FitOptions::default()).unwrap();
        (f, data, cut)
    }

    fn window_after(data: &AlignedDataset, cut: NaiveDate) -> ForecastWindow {
        ForecastWindow::new(cut.succ_opt().unwrap(), data.last_date()).unwrap()
    }

    #[test]
    fn static_matches_full_recursion() {
        let (f, data, cut) = setup(3);
        let fc = forecast_static(&f, &data, &window_after(&data, cut)).unwrap();
        assert_eq!(fc.len(), 100);
        let resid: Vec<f64> = data.returns().iter().zip(data.exog()).map(|(r, x)| r - f.params.alpha0 - f.params.alpha1 * x).collect();
        let h = variance_recursion(&f.params, &resid, f.h0).unwrap();
        for (a, b) in fc.variance_forecast.iter().zip(&h[500..]) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        assert_eq!(fc.origin, cut);
    }

    #[test]
    fn dynamic_matches_closed_form() {
        let (f, data, cut) = setup(4);
        let fc = forecast_dynamic(&f, &data, &window_after(&data, cut)).unwrap();
        let p = f.params;
        let phi = p.persistence();
        let h1 = fc.variance_forecast[0];
        for (m, h) in fc.variance_forecast.iter().enumerate() {
            let geo: f64 = (0..m).map(|j| phi.powi(j as i32)).sum();
            let closed = p.beta0 * geo + phi.powi(m as i32) * h1;
            assert!((h - closed).abs() <= 1e-12 * closed);
        }
        // a window starting later picks up the same path
        let later = ForecastWindow::new(data.dates()[550], data.last_date()).unwrap();
        let fc2 = forecast_dynamic(&f, &data, &later).unwrap();
        assert_eq!(fc2.variance_forecast[..], fc.variance_forecast[50..]);
    }

    #[test]
    fn collapsed_recursion_gives_constant_forecast() {
        let (mut f, data, cut) = setup(5);
        f.params.beta1 = 0.0;
        f.params.beta2 = 0.0;
        let w = window_after(&data, cut);
        for mode in [ForecastMode::Static, ForecastMode::Dynamic] {
            let fc = forecast(&f, &data, &w, mode).unwrap();
            assert!(fc.variance_forecast.iter().all(|h| *h == f.params.beta0));
        }
    }

    #[test]
    fn window_errors() {
        let (f, data, cut) = setup(6);
        assert!(forecast_static(&f, &data, &ForecastWindow::new(cut, data.last_date()).unwrap()).is_err());
        let beyond = data.last_date().succ_opt().unwrap();
        assert!(forecast_static(&f, &data, &ForecastWindow::new(beyond, beyond).unwrap()).is_err());
        assert!(forecast_static(&f, &data, &ForecastWindow::new(data.dates()[510], beyond).unwrap()).is_err());
        assert!(ForecastWindow::new(data.last_date(), cut).is_err());
    }

    #[test]
    fn dynamic_limit_is_unconditional_variance() {
        let p = GarchParams::new(0.0, 0.0, 0.1, 0.8, 0.1).unwrap();
        let path = dynamic_variance_path(&p, 7.0, 400);
        let target = p.unconditional_variance().unwrap();
        assert!((path[399] - target).abs() < 1e-6);
        assert!(path.windows(2).all(|w| w[1] <= w[0] && w[1] >= target));
        assert!(path[..100].windows(2).all(|w| w[1] < w[0]));
        let up = dynamic_variance_path(&p, 0.01, 400);
        assert!(up.windows(2).all(|w| w[1] >= w[0] && w[1] <= target));
        assert!(up[..100].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn metric_examples() {
        assert!((rmse(&[1.0, 4.0], &[0.0, 0.0]).unwrap() - 8.5f64.sqrt()).abs() < 1e-15);
        assert!((rmse(&[1.0, 4.0], &[0.0, 0.0]).unwrap() - 2.91548).abs() < 1e-5);
        assert_eq!(mae(&[1.0, 4.0], &[0.0, 0.0]).unwrap(), 2.5);
        assert_eq!(rmse(&[1.0], &[0.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(theil_u(&[1.0, -2.0], &[1.0, -2.0]).unwrap(), 0.0);
        assert_eq!(theil_u(&[1.0, -2.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(theil_u(&[1.0, -2.0], &[-1.0, 2.0]).unwrap(), 1.0);
        assert!(theil_u(&[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn perfect_and_zero_forecasts() {
        let (f, data, cut) = setup(8);
        let mut fc = forecast_static(&f, &data, &window_after(&data, cut)).unwrap();
        let r = realized(&fc, &data).unwrap();
        fc.variance_forecast = r.iter().map(|v| v * v).collect();
        let e = evaluate(&fc, &data, TheilTarget::Variance).unwrap();
        assert_eq!((e.rmse, e.mae, e.theil_u), (0.0, 0.0, 0.0));
        fc.variance_forecast = vec![0.0; fc.len()];
        assert_eq!(evaluate(&fc, &data, TheilTarget::Variance).unwrap().theil_u, 1.0);
        fc.mean_forecast = r.clone();
        assert_eq!(evaluate(&fc, &data, TheilTarget::Returns).unwrap().theil_u, 0.0);
    }

    #[test]
    fn evaluation_matches_formulas() {
        let (f, data, cut) = setup(9);
        let fc = forecast_static(&f, &data, &window_after(&data, cut)).unwrap();
        let e = evaluate(&fc, &data, TheilTarget::Variance).unwrap();
        let (mut se, mut ae, mut pp, mut hh) = (0.0, 0.0, 0.0, 0.0);
        for (i, h) in fc.variance_forecast.iter().enumerate() {
            let proxy = data.returns()[500 + i].powi(2);
            se += (proxy - h).powi(2);
            ae += (proxy - h).abs();
            pp += proxy * proxy;
            hh += h * h;
        }
        let n = fc.len() as f64;
        assert!((e.rmse - (se / n).sqrt()).abs() < 1e-12);
        assert!((e.mae - ae / n).abs() < 1e-12);
        let u = (se / n).sqrt() / ((pp / n).sqrt() + (hh / n).sqrt());
        assert!((e.theil_u - u).abs() < 1e-12);
        let rows = plot_rows(&fc, &data).unwrap();
        assert_eq!(rows.len(), fc.len());
        assert!(rows.iter().all(|r| r.lower < r.mean_forecast && r.mean_forecast < r.upper));
    }

    fn vectors(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut z = NormalStream::new(seed);
        let x = (0..n).map(|_| z.next_normal()).collect();
        let y = (0..n).map(|_| z.next_normal() * 3.0).collect();
        (x, y)
    }

    proptest! {
        #[test]
        fn metric_properties(seed in 0u64..100_000, n in 1usize..40, a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0]) {
            let (x, y) = vectors(seed, n);
            let u = theil_u(&x, &y).unwrap();
            prop_assert!((0.0..=1.0).contains(&u));
            prop_assert!((u - theil_u(&y, &x).unwrap()).abs() < 1e-12);
            let ax: Vec<f64> = x.iter().map(|v| v * a).collect();
            let ay: Vec<f64> = y.iter().map(|v| v * a).collect();
            prop_assert!((u - theil_u(&ax, &ay).unwrap()).abs() < 1e-12);
            prop_assert!(rmse(&x, &y).unwrap() >= mae(&x, &y).unwrap() - 1e-15);
        }
    }
}
