use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Ordinary least squares fit with classical standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub nobs: usize,
    pub nparams: usize,
}

impl OlsResult {
    /// `RSS / (n - k)`
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.nobs - self.nparams) as f64
    }

    /// Gaussian log-likelihood at the ML variance `RSS / n`.
    pub fn log_likelihood(&self) -> f64 {
        let n = self.nobs as f64;
        -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (self.rss / n).ln() + 1.0)
    }

    /// Centered R² against `response`.
    pub fn r_squared(&self, response: &[f64]) -> f64 {
        let mean = response.iter().sum::<f64>() / response.len() as f64;
        let tss: f64 = response.iter().map(|y| (y - mean).powi(2)).sum();
        if tss == 0.0 {
            return 0.0;
        }
        1.0 - self.rss / tss
    }
}

pub fn ols(design: &Matrix, response: &[f64]) -> Result<OlsResult> {
    let (n, k) = (design.rows(), design.cols());
    if response.len() != n {
        return Err(Error::invalid(format!(
            "response has {} rows, design has {n}",
            response.len()
        )));
    }
    if k == 0 || n <= k {
        return Err(Error::TooShort {
            what: "regression",
            needed: k + 1,
            got: n,
        });
    }
    if design.as_slice().iter().chain(response).any(|v| !v.is_finite()) {
        return Err(Error::invalid("regression inputs must be finite"));
    }

    let xtx_inv = design.gram().invert_symmetric()?;
    let mut beta = xtx_inv.mul_vec(&design.t_mul_vec(response));
    let mut residuals = residuals_of(design, response, &beta);
    // one step of iterative refinement
    let correction = xtx_inv.mul_vec(&design.t_mul_vec(&residuals));
    for (b, c) in beta.iter_mut().zip(&correction) {
        *b += c;
    }
    residuals = residuals_of(design, response, &beta);

    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n - k) as f64;
    let std_errors: Vec<f64> = (0..k).map(|i| (sigma2 * xtx_inv[(i, i)]).sqrt()).collect();
    let t_stats = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| if *s > 0.0 { b / s } else { f64::NAN })
        .collect();

    Ok(OlsResult {
        coefficients: beta,
        std_errors,
        t_stats,
        residuals,
        rss,
        nobs: n,
        nparams: k,
    })
}

fn residuals_of(design: &Matrix, response: &[f64], beta: &[f64]) -> Vec<f64> {
    design
        .mul_vec(beta)
        .iter()
        .zip(response)
        .map(|(fit, y)| y - fit)
        .collect()
}
