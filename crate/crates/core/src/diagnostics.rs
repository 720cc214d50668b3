//! Residual tests: Ljung-Box for serial correlation and Engle's ARCH-LM for
//! conditional heteroskedasticity.

use serde::{Deserialize, Serialize};

use crate::descriptive::chi_square_sf;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::unitroot::ols;

pub const DEFAULT_LJUNG_BOX_LAGS: usize = 10;
pub const DEFAULT_ARCH_LAGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Reject,
    FailToReject,
}

impl Verdict {
    pub fn at_5pct(p_value: f64) -> Self {
        if p_value < 0.05 {
            Verdict::Reject
        } else {
            Verdict::FailToReject
        }
    }

    /// "Yes" when the null of no effect is rejected.
    pub fn yes_no(&self) -> &'static str {
        match self {
            Verdict::Reject => "Yes",
            Verdict::FailToReject => "No",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
    pub verdict: Verdict,
}

impl TestResult {
    fn chi_square(statistic: f64, lags: usize) -> Self {
        let p_value = chi_square_sf(statistic, lags as f64);
        Self {
            statistic,
            p_value,
            lags,
            verdict: Verdict::at_5pct(p_value),
        }
    }
}

fn check(series: &[f64], lags: usize, min_len: usize, what: &'static str) -> Result<()> {
    if lags == 0 {
        return Err(Error::invalid(format!("{what} needs at least one lag")));
    }
    if series.len() <= min_len {
        return Err(Error::TooShort {
            what,
            needed: min_len + 1,
            got: series.len(),
        });
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: what.to_string(),
            index: i,
        });
    }
    if series.iter().all(|v| *v == series[0]) {
        return Err(Error::Degenerate(format!("{what} on a constant series")));
    }
    Ok(())
}

/// Sample autocorrelations at lags `1..=lags`.
pub fn autocorrelations(series: &[f64], lags: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    (1..=lags)
        .map(|k| dev[k..].iter().zip(&dev).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect()
}

/// `Q = n(n+2) sum_k rho_k^2 / (n-k)`, compared with chi-square(lags).
pub fn ljung_box(series: &[f64], lags: usize) -> Result<TestResult> {
    check(series, lags, lags, "Ljung-Box test")?;
    let n = series.len() as f64;
    let q = n * (n + 2.0)
        * autocorrelations(series, lags)
            .iter()
            .enumerate()
            .map(|(i, r)| r * r / (n - (i + 1) as f64))
            .sum::<f64>();
    Ok(TestResult::chi_square(q, lags))
}

/// Regresses `e_t^2` on a constant and `e_{t-1}^2 .. e_{t-lags}^2`;
/// the statistic is `(T - lags) R^2`.
pub fn arch_lm(series: &[f64], lags: usize) -> Result<TestResult> {
    check(series, lags, 2 * lags, "ARCH-LM test")?;
    let sq: Vec<f64> = series.iter().map(|e| e * e).collect();
    let rows = sq.len() - lags;
    let y = sq[lags..].to_vec();
    let mut columns = vec![vec![1.0; rows]];
    for k in 1..=lags {
        columns.push(sq[lags - k..sq.len() - k].to_vec());
    }
    let design = Matrix::from_columns(&columns)?;
    let fit = ols(&design, &y)?;
    let r2 = fit.r_squared(&y).clamp(0.0, 1.0);
    Ok(TestResult::chi_square(rows as f64 * r2, lags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garch::GarchParams;
    use crate::simulate::{simulate, NormalStream, SimConfig};
    use proptest::prelude::*;

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut z = NormalStream::new(seed);
        (0..n).map(|_| z.next_normal()).collect()
    }

    #[test]
    fn ljung_box_by_hand() {
        // mean 1.8, c0 = 2.8, c1 = 0.16, rho1 = 2/35, Q = 5*7*rho1^2/4 = 1/35
        let r = ljung_box(&[1.0, 2.0, 3.0, 2.0, 1.0], 1).unwrap();
        assert!((r.statistic - 1.0 / 35.0).abs() < 1e-15);
        assert_eq!(r.lags, 1);
    }

    #[test]
    fn alternating_series_rejects() {
        let s: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 3.0 } else { -3.0 }).collect();
        let r = ljung_box(&s, 1).unwrap();
        assert!(r.p_value < 1e-10);
        assert_eq!(r.verdict, Verdict::Reject);
    }

    #[test]
    fn errors() {
        assert!(matches!(ljung_box(&[2.0; 20], 3), Err(Error::Degenerate(_))));
        assert!(ljung_box(&[1.0, 2.0, 3.0], 3).is_err());
        assert!(ljung_box(&[1.0, 2.0, 3.0], 0).is_err());
        assert!(matches!(arch_lm(&[2.0; 20], 3), Err(Error::Degenerate(_))));
        assert!(arch_lm(&noise(1, 10), 5).is_err());
    }

    #[test]
    fn arch_effect_detected_and_whitened_by_true_variance() {
        let p = GarchParams::new(0.0, 0.0, 0.05, 0.6, 0.35).unwrap();
        let sim = simulate(&SimConfig::new(p, 3000, 11)).unwrap();
        assert!(arch_lm(&sim.returns, 5).unwrap().p_value < 0.01);
        let z: Vec<f64> = sim.innovations.iter().zip(&sim.cond_variance).map(|(e, h)| e / h.sqrt()).collect();
        assert!(arch_lm(&z, 5).unwrap().p_value > 0.01);
    }

    #[test]
    fn verdict_follows_p_value() {
        for seed in 0..20 {
            let r = ljung_box(&noise(seed, 200), 10).unwrap();
            assert_eq!(r.verdict == Verdict::Reject, r.p_value < 0.05);
        }
    }

    proptest! {
        #[test]
        fn scale_invariance(seed in 0u64..1000, a in 1e-3f64..1e3) {
            let s = noise(seed, 150);
            let t: Vec<f64> = s.iter().map(|v| v * a).collect();
            let (l0, l1) = (ljung_box(&s, 10).unwrap(), ljung_box(&t, 10).unwrap());
            prop_assert!((l0.statistic - l1.statistic).abs() <= 1e-9 * l0.statistic);
            let (a0, a1) = (arch_lm(&s, 5).unwrap(), arch_lm(&t, 5).unwrap());
            prop_assert!((a0.statistic - a1.statistic).abs() <= 1e-9 * a0.statistic.max(1e-12));
        }

        #[test]
        fn q_nondecreasing_in_lags(seed in 0u64..1000) {
            let s = noise(seed, 80);
            let mut prev = 0.0;
            for lags in 1..20 {
                let q = ljung_box(&s, lags).unwrap().statistic;
                prop_assert!(q >= prev);
                prev = q;
            }
        }

        #[test]
        fn arch_statistic_bounded(seed in 0u64..1000, lags in 1usize..8) {
            let s = noise(seed, 120);
            let r = arch_lm(&s, lags).unwrap();
            prop_assert!(r.statistic >= 0.0 && r.statistic <= (120 - lags) as f64);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }
}
