//! Date-indexed series, quote handling, and the transforms that turn raw
//! exchange-rate quotes and case counts into an estimation dataset.

use std::ops::Range;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest dataset the GARCH estimator accepts.
pub const MIN_OBSERVATIONS: usize = 30;

fn check_dates(dates: &[NaiveDate]) -> Result<()> {
    for w in dates.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::UnorderedDates {
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

fn check_finite(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            what: what.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

/// `n` consecutive calendar days starting at `start`.
pub fn daily_dates(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    (0..n as u64)
        .map(|i| start.checked_add_days(Days::new(i)).expect("date overflow"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatedSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl DatedSeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if dates.len() != values.len() {
            return Err(Error::invalid(format!(
                "series `{label}`: {} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if dates.is_empty() {
            return Err(Error::TooShort {
                what: "series",
                needed: 1,
                got: 0,
            });
        }
        check_dates(&dates)?;
        check_finite(&label, &values)?;
        Ok(Self {
            label,
            dates,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.dates
            .binary_search(&date)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Daily buying and selling quotes for one currency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteSeries {
    label: String,
    dates: Vec<NaiveDate>,
    buy: Vec<f64>,
    sell: Vec<f64>,
}

impl QuoteSeries {
    pub fn new(
        label: impl Into<String>,
        dates: Vec<NaiveDate>,
        buy: Vec<f64>,
        sell: Vec<f64>,
    ) -> Result<Self> {
        let label = label.into();
        if dates.len() != buy.len() || dates.len() != sell.len() {
            return Err(Error::invalid(format!(
                "quotes `{label}`: column lengths differ"
            )));
        }
        if dates.is_empty() {
            return Err(Error::TooShort {
                what: "quote series",
                needed: 1,
                got: 0,
            });
        }
        check_dates(&dates)?;
        check_finite("buy", &buy)?;
        check_finite("sell", &sell)?;
        let quotes = Self {
            label,
            dates,
            buy,
            sell,
        };
        quotes.check_positive()?;
        for ((d, b), s) in quotes.dates.iter().zip(&quotes.buy).zip(&quotes.sell) {
            if s < b {
                return Err(Error::invalid(format!(
                    "selling rate {s} below buying rate {b} on {d}"
                )));
            }
        }
        Ok(quotes)
    }

    fn check_positive(&self) -> Result<()> {
        for ((&date, &b), &s) in self.dates.iter().zip(&self.buy).zip(&self.sell) {
            if b <= 0.0 {
                return Err(Error::NonPositive {
                    what: "buying rate",
                    date,
                    value: b,
                });
            }
            if s <= 0.0 {
                return Err(Error::NonPositive {
                    what: "selling rate",
                    date,
                    value: s,
                });
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn buy(&self) -> &[f64] {
        &self.buy
    }

    pub fn sell(&self) -> &[f64] {
        &self.sell
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// How `align` pairs return dates with exogenous dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignPolicy {
    /// Keep only dates present in both series.
    #[default]
    Intersect,
    /// Keep every return date; use the latest exogenous value on or before it.
    /// Exogenous-only dates are dropped.
    CarryForward,
}

/// Returns paired with the exogenous regressor on a common date index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedDataset {
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
    exog: Vec<f64>,
    return_label: String,
    exog_label: String,
}

impl AlignedDataset {
    pub fn new(
        dates: Vec<NaiveDate>,
        returns: Vec<f64>,
        exog: Vec<f64>,
        return_label: impl Into<String>,
        exog_label: impl Into<String>,
    ) -> Result<Self> {
        if dates.len() != returns.len() || dates.len() != exog.len() {
            return Err(Error::invalid("dataset columns have different lengths"));
        }
        if dates.len() < MIN_OBSERVATIONS {
            return Err(Error::TooShort {
                what: "dataset",
                needed: MIN_OBSERVATIONS,
                got: dates.len(),
            });
        }
        check_dates(&dates)?;
        check_finite("returns", &returns)?;
        check_finite("exogenous", &exog)?;
        Ok(Self {
            dates,
            returns,
            exog,
            return_label: return_label.into(),
            exog_label: exog_label.into(),
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn exog(&self) -> &[f64] {
        &self.exog
    }

    pub fn return_label(&self) -> &str {
        &self.return_label
    }

    pub fn exog_label(&self) -> &str {
        &self.exog_label
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    pub fn returns_series(&self) -> DatedSeries {
        DatedSeries {
            label: self.return_label.clone(),
            dates: self.dates.clone(),
            values: self.returns.clone(),
        }
    }

    pub fn exog_series(&self) -> DatedSeries {
        DatedSeries {
            label: self.exog_label.clone(),
            dates: self.dates.clone(),
            values: self.exog.clone(),
        }
    }

    /// Index range of the rows dated within `[start, end]`.
    pub fn index_range(&self, start: NaiveDate, end: NaiveDate) -> Range<usize> {
        let lo = self.dates.partition_point(|d| *d < start);
        let hi = self.dates.partition_point(|d| *d <= end);
        lo..hi.max(lo)
    }

    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    /// Rows dated within `[start, end]`, subject to the minimum length.
    pub fn between(&self, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        self.rows(self.index_range(start, end))
    }

    pub(crate) fn rows(&self, range: Range<usize>) -> Result<Self> {
        Self::new(
            self.dates[range.clone()].to_vec(),
            self.returns[range.clone()].to_vec(),
            self.exog[range].to_vec(),
            self.return_label.clone(),
            self.exog_label.clone(),
        )
    }

    /// Appends `later` after `self`; `later` must start after `self` ends.
    pub fn concat(&self, later: &Self) -> Result<Self> {
        let mut dates = self.dates.clone();
        dates.extend_from_slice(&later.dates);
        let mut returns = self.returns.clone();
        returns.extend_from_slice(&later.returns);
        let mut exog = self.exog.clone();
        exog.extend_from_slice(&later.exog);
        Self::new(
            dates,
            returns,
            exog,
            self.return_label.clone(),
            self.exog_label.clone(),
        )
    }

    pub fn with_labels(mut self, returns: impl Into<String>, exog: impl Into<String>) -> Self {
        self.return_label = returns.into();
        self.exog_label = exog.into();
        self
    }
}

/// Nominal rate as the average of buying and selling quotes.
pub fn mid_rate(quotes: &QuoteSeries) -> Result<DatedSeries> {
    quotes.check_positive()?;
    let values = quotes
        .buy
        .iter()
        .zip(&quotes.sell)
        .map(|(b, s)| (b + s) / 2.0)
        .collect();
    DatedSeries::new(quotes.label.clone(), quotes.dates.clone(), values)
}

/// `ln(x_t) - ln(x_{t-1})`, dated at `t`.
pub fn log_returns(series: &DatedSeries) -> Result<DatedSeries> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            what: "log returns",
            needed: 2,
            got: series.len(),
        });
    }
    if let Some(i) = series.values.iter().position(|v| *v <= 0.0) {
        return Err(Error::NonPositive {
            what: "level",
            date: series.dates[i],
            value: series.values[i],
        });
    }
    let values = series
        .values
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    DatedSeries::new(
        series.label.clone(),
        series.dates[1..].to_vec(),
        values,
    )
}

pub fn first_difference(series: &DatedSeries) -> Result<DatedSeries> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            what: "first difference",
            needed: 2,
            got: series.len(),
        });
    }
    let values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    DatedSeries::new(
        series.label.clone(),
        series.dates[1..].to_vec(),
        values,
    )
}

/// `ln(x_t + shift)`. With `shift = 0` every value must be positive.
pub fn log_transform(series: &DatedSeries, shift: f64) -> Result<DatedSeries> {
    let mut values = Vec::with_capacity(series.len());
    for (&date, &v) in series.dates.iter().zip(&series.values) {
        let shifted = v + shift;
        if shifted <= 0.0 {
            return Err(Error::NonPositive {
                what: "shifted value for log transform",
                date,
                value: shifted,
            });
        }
        values.push(shifted.ln());
    }
    DatedSeries::new(series.label.clone(), series.dates.clone(), values)
}

pub fn align(
    returns: &DatedSeries,
    exog: &DatedSeries,
    policy: AlignPolicy,
) -> Result<AlignedDataset> {
    let mut dates = Vec::new();
    let mut r = Vec::new();
    let mut x = Vec::new();
    match policy {
        AlignPolicy::Intersect => {
            let (mut i, mut j) = (0, 0);
            while i < returns.len() && j < exog.len() {
                match returns.dates[i].cmp(&exog.dates[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        dates.push(returns.dates[i]);
                        r.push(returns.values[i]);
                        x.push(exog.values[j]);
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        AlignPolicy::CarryForward => {
            let mut j = 0;
            let mut latest = None;
            for (&date, &value) in returns.dates.iter().zip(&returns.values) {
                while j < exog.len() && exog.dates[j] <= date {
                    latest = Some(exog.values[j]);
                    j += 1;
                }
                if let Some(xv) = latest {
                    dates.push(date);
                    r.push(value);
                    x.push(xv);
                }
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    AlignedDataset::new(dates, r, x, returns.label.clone(), exog.label.clone())
}

/// Splits into rows dated `<= cutoff` and rows dated `> cutoff`.
pub fn split_period(
    data: &AlignedDataset,
    cutoff: NaiveDate,
) -> Result<(AlignedDataset, AlignedDataset)> {
    if cutoff < data.first_date() || cutoff >= data.last_date() {
        return Err(Error::DateOutOfRange {
            date: cutoff,
            first: data.first_date(),
            last: data.last_date(),
        });
    }
    let k = data.dates.partition_point(|d| *d <= cutoff);
    let first = data.rows(0..k)?;
    let second = data.rows(k..data.len())?;
    Ok((first, second))
}
