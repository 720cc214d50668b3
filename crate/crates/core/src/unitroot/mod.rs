//! Augmented Dickey-Fuller and Phillips-Perron unit-root tests.
//!
//! Both tests take "the series has a unit root" as the null; a small p-value
//! is evidence of stationarity. They share the OLS engine in [`ols`] and the
//! response surfaces in [`mackinnon`].

pub mod mackinnon;
mod ols;

use serde::{Deserialize, Serialize};

pub use ols::{ols, OlsResult};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::timeseries::DatedSeries;

/// Shortest series either test accepts (before augmentation lags).
pub const MIN_LENGTH: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deterministic {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl Deterministic {
    fn columns(self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagSelection {
    /// Use exactly `max_lags`.
    Fixed,
    Aic,
    #[default]
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bandwidth {
    /// `floor(4 (T/100)^(2/9))`
    #[default]
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one_pct: f64,
    #[serde(rename = "5%")]
    pub five_pct: f64,
    #[serde(rename = "10%")]
    pub ten_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Augmentation lags (ADF) or Bartlett bandwidth (PP).
    pub lags_used: usize,
    pub deterministic: Deterministic,
    pub critical_values: CriticalValues,
    /// Rows in the final regression.
    pub nobs: usize,
    /// Plain t-ratio on the lagged level, before any PP correction.
    pub regression_t: f64,
}

impl UnitRootResult {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// `floor(12 (T/100)^(1/4))`
pub fn schwert_max_lags(len: usize) -> usize {
    (12.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize
}

fn check_series(values: &[f64], needed: usize) -> Result<()> {
    if values.len() < needed {
        return Err(Error::TooShort {
            what: "unit-root test",
            needed,
            got: values.len(),
        });
    }
    let first = values[0];
    if values.iter().all(|v| *v == first) {
        return Err(Error::Degenerate("constant series".into()));
    }
    Ok(())
}

/// Regression of `Δy_t` on `y_{t-1}`, `lags` lagged differences, and the
/// deterministic terms, using rows `t` with `start <= t < T-1` in
/// difference indexing.
fn df_regression(y: &[f64], dy: &[f64], lags: usize, start: usize, det: Deterministic) -> Result<OlsResult> {
    let rows = start..dy.len();
    let mut columns = Vec::with_capacity(1 + lags + det.columns());
    columns.push(rows.clone().map(|t| y[t]).collect::<Vec<_>>());
    for j in 1..=lags {
        columns.push(rows.clone().map(|t| dy[t - j]).collect());
    }
    if det != Deterministic::None {
        columns.push(vec![1.0; rows.len()]);
    }
    if det == Deterministic::ConstantTrend {
        columns.push(rows.clone().map(|t| (t + 1) as f64).collect());
    }
    let design = Matrix::from_columns(&columns)?;
    ols(&design, &dy[rows])
}

fn assemble(
    statistic: f64,
    regression_t: f64,
    lags_used: usize,
    nobs: usize,
    det: Deterministic,
) -> UnitRootResult {
    let [one_pct, five_pct, ten_pct] = mackinnon::critical_values(det, nobs);
    UnitRootResult {
        statistic,
        p_value: mackinnon::p_value(statistic, det),
        lags_used,
        deterministic: det,
        critical_values: CriticalValues {
            one_pct,
            five_pct,
            ten_pct,
        },
        nobs,
        regression_t,
    }
}

pub fn adf_test(
    series: &DatedSeries,
    max_lags: Option<usize>,
    det: Deterministic,
    selection: LagSelection,
) -> Result<UnitRootResult> {
    adf(series.values(), max_lags, det, selection)
}

/// ADF on raw values. `max_lags = None` uses the Schwert rule, capped so the
/// minimum-length requirement still holds.
pub fn adf(
    y: &[f64],
    max_lags: Option<usize>,
    det: Deterministic,
    selection: LagSelection,
) -> Result<UnitRootResult> {
    let max_lags = match max_lags {
        Some(m) => m,
        None => schwert_max_lags(y.len()).min(y.len().saturating_sub(MIN_LENGTH)),
    };
    check_series(y, MIN_LENGTH + max_lags)?;
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();

    let lags = match selection {
        LagSelection::Fixed => max_lags,
        LagSelection::Aic | LagSelection::Bic => {
            // every candidate is scored on the same rows
            let mut best = (f64::INFINITY, 0);
            for p in 0..=max_lags {
                let fit = df_regression(y, &dy, p, max_lags, det)?;
                let n = fit.nobs as f64;
                let k = fit.nparams as f64;
                let penalty = match selection {
                    LagSelection::Aic => 2.0 * k,
                    _ => n.ln() * k,
                };
                let ic = -2.0 * fit.log_likelihood() + penalty;
                if ic < best.0 {
                    best = (ic, p);
                }
            }
            best.1
        }
    };

    let fit = df_regression(y, &dy, lags, lags, det)?;
    let t = fit.t_stats[0];
    if !t.is_finite() {
        return Err(Error::Degenerate("zero residual variance in ADF regression".into()));
    }
    Ok(assemble(t, t, lags, fit.nobs, det))
}

pub fn pp_test(series: &DatedSeries, det: Deterministic, bandwidth: Bandwidth) -> Result<UnitRootResult> {
    pp(series.values(), det, bandwidth)
}

pub fn pp(y: &[f64], det: Deterministic, bandwidth: Bandwidth) -> Result<UnitRootResult> {
    check_series(y, MIN_LENGTH)?;
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let fit = df_regression(y, &dy, 0, 0, det)?;
    let n = fit.nobs;
    let lags = match bandwidth {
        Bandwidth::Auto => (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize,
        Bandwidth::Fixed(l) => l,
    };
    if lags >= n {
        return Err(Error::invalid(format!(
            "bandwidth {lags} must be below the {n} regression rows"
        )));
    }

    let u = &fit.residuals;
    let nf = n as f64;
    let gamma = |j: usize| u[j..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / nf;
    let gamma0 = gamma(0);
    let lam2 = gamma0
        + 2.0
            * (1..=lags)
                .map(|j| (1.0 - j as f64 / (lags as f64 + 1.0)) * gamma(j))
                .sum::<f64>();
    if !(gamma0 > 0.0 && lam2 > 0.0) {
        return Err(Error::Degenerate("non-positive long-run variance".into()));
    }
    let s = fit.sigma2().sqrt();
    let se = fit.std_errors[0];
    let t = fit.t_stats[0];
    let lam = lam2.sqrt();
    let stat = (gamma0 / lam2).sqrt() * t - 0.5 * (lam2 - gamma0) / lam * (nf * se / s);
    Ok(assemble(stat, t, lags, n, det))
}
