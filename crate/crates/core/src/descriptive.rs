//! Summary statistics and the Jarque-Bera normality test.
//!
//! Skewness and kurtosis use the biased (1/n) central moments; the reported
//! standard deviation uses the n-1 denominator. Kurtosis is raw (3 for a
//! Gaussian), not excess.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::timeseries::DatedSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
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

impl SummaryStats {
    /// Row labels in report order.
    pub const ROW_NAMES: [&'static str; 9] = [
        "Mean",
        "Median",
        "Maximum",
        "Minimum",
        "Std. Dev.",
        "Skewness",
        "Kurtosis",
        "Jarque-Bera",
        "Probability",
    ];

    /// Values aligned with [`Self::ROW_NAMES`].
    pub fn row_values(&self) -> [f64; 9] {
        [
            self.mean,
            self.median,
            self.max,
            self.min,
            self.std_dev,
            self.skewness,
            self.kurtosis,
            self.jarque_bera,
            self.jb_p_value,
        ]
    }
}

pub fn summary_stats(series: &DatedSeries) -> Result<SummaryStats> {
    summarize(series.values())
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort {
            what: "summary statistics",
            needed: 4,
            got: n,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[n - 1]);
    if min == max {
        return Err(Error::Degenerate("constant series has no spread".into()));
    }
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };

    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std_dev = (m2 / (nf - 1.0)).sqrt();
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let (jarque_bera, jb_p_value) = jarque_bera(n, skewness, kurtosis)?;

    Ok(SummaryStats {
        n,
        // clamp the rounding of the mean into the sample range
        mean: mean.clamp(min, max),
        median,
        max,
        min,
        std_dev,
        skewness,
        kurtosis,
        jarque_bera,
        jb_p_value,
    })
}

/// `(n/6)(S^2 + (K-3)^2/4)` with its chi-square(2) upper-tail probability.
pub fn jarque_bera(n: usize, skewness: f64, kurtosis: f64) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(Error::TooShort {
            what: "Jarque-Bera",
            needed: 4,
            got: n,
        });
    }
    if !skewness.is_finite() || !kurtosis.is_finite() {
        return Err(Error::invalid("skewness and kurtosis must be finite"));
    }
    let excess = kurtosis - 3.0;
    let stat = n as f64 / 6.0 * (skewness * skewness + excess * excess / 4.0);
    Ok((stat, chi_square_sf(stat, 2.0)))
}

/// Upper tail of a chi-square distribution with `dof` degrees of freedom.
pub(crate) fn chi_square_sf(stat: f64, dof: f64) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    dist.sf(stat).clamp(0.0, 1.0)
}
