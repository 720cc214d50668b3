//! GARCH(1,1) with an exogenous regressor in the mean equation:
//!
//! ```text
//! r_t = alpha0 + alpha1 x_t + e_t
//! h_t = beta0 + beta1 h_{t-1} + beta2 e_{t-1}^2
//! ```
//!
//! with Gaussian innovations `e_t ~ N(0, h_t)`.

mod estimate;
mod hessian;
mod likelihood;
mod nelder_mead;
mod reparam;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::timeseries::DatedSeries;

pub use estimate::fit;
pub use hessian::{numerical_gradient, numerical_hessian, StepPolicy};
pub use likelihood::{
    log_likelihood, log_likelihood_gradient, log_likelihood_raw, mean_residuals,
    variance_path_from, variance_recursion, H0Policy,
};
pub use nelder_mead::{nelder_mead, Minimum, NelderMeadOptions};
pub use reparam::{from_unconstrained, to_unconstrained, PERSISTENCE_CAP};

/// Parameter names in vector order.
pub const PARAM_NAMES: [&str; 5] = ["alpha0", "alpha1", "beta0", "beta1", "beta2"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    /// Mean-equation intercept.
    pub alpha0: f64,
    /// Coefficient on the exogenous regressor.
    pub alpha1: f64,
    /// Variance intercept.
    pub beta0: f64,
    /// Weight on the previous conditional variance (GARCH term).
    pub beta1: f64,
    /// Weight on the previous squared innovation (ARCH term).
    pub beta2: f64,
}

impl GarchParams {
    pub fn new(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let p = Self {
            alpha0,
            alpha1,
            beta0,
            beta1,
            beta2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.beta0 <= 0.0 {
            return Err(Error::InvalidParams(format!("beta0 = {} must be > 0", self.beta0)));
        }
        if self.beta1 < 0.0 || self.beta2 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta1 = {} and beta2 = {} must be >= 0",
                self.beta1, self.beta2
            )));
        }
        if self.persistence() >= 1.0 {
            return Err(Error::NonStationary {
                persistence: self.persistence(),
            });
        }
        Ok(())
    }

    /// `beta1 + beta2`
    pub fn persistence(&self) -> f64 {
        self.beta1 + self.beta2
    }

    /// `beta0 / (1 - beta1 - beta2)`, the level volatility reverts to.
    pub fn unconditional_variance(&self) -> Result<f64> {
        if self.persistence() >= 1.0 {
            return Err(Error::NonStationary {
                persistence: self.persistence(),
            });
        }
        Ok(self.beta0 / (1.0 - self.persistence()))
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha0, self.alpha1, self.beta0, self.beta1, self.beta2]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Self {
            alpha0: v[0],
            alpha1: v[1],
            beta0: v[2],
            beta1: v[3],
            beta2: v[4],
        }
    }
}

/// `beta0 / (1 - beta1 - beta2)`
pub fn unconditional_variance(params: &GarchParams) -> Result<f64> {
    params.unconditional_variance()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Simplex spread tolerance on the per-observation objective.
    pub f_tol: f64,
    /// Simplex size tolerance in the unconstrained coordinates.
    pub x_tol: f64,
    /// Run the simplex a second time from the incumbent.
    pub restart: bool,
    pub hessian_step: StepPolicy,
    /// Overrides the default starting values.
    pub start: Option<GarchParams>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            f_tol: 1e-8,
            x_tol: 1e-6,
            restart: true,
            hessian_step: StepPolicy::default(),
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub params: GarchParams,
    /// In [`PARAM_NAMES`] order; NaN when the Hessian is not invertible.
    pub std_errors: [f64; 5],
    pub z_stats: [f64; 5],
    pub p_values: [f64; 5],
    /// Inverse negative Hessian of the log-likelihood.
    pub covariance: Option<Matrix>,
    pub log_likelihood: f64,
    /// Log-likelihood at the starting values.
    pub start_log_likelihood: f64,
    pub nobs: usize,
    pub cond_variance: DatedSeries,
    pub residuals: DatedSeries,
    pub std_residuals: DatedSeries,
    pub converged: bool,
    pub iterations: usize,
    /// Pre-sample variance (also used for the pre-sample squared innovation).
    pub h0: f64,
    pub warnings: Vec<String>,
}

impl GarchFit {
    pub fn has_standard_errors(&self) -> bool {
        self.std_errors.iter().all(|s| s.is_finite() && *s > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconditional_variance_examples() {
        let p = GarchParams::new(0.0, 0.0, 0.2, 0.5, 0.3).unwrap();
        assert!((p.unconditional_variance().unwrap() - 1.0).abs() < 1e-15);
        let q = GarchParams::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(q.unconditional_variance().unwrap(), 1.0);
        let usd = GarchParams::new(7.43e-7, 5.86e-9, 2.76e-11, 0.4910, 0.2695).unwrap();
        // 2.76e-11 / 0.2395, by hand
        assert!((usd.unconditional_variance().unwrap() / 1.152400835073069e-10 - 1.0).abs() < 1e-12);
        assert!(usd.persistence() < 1.0);
    }

    #[test]
    fn non_stationary_rejected() {
        let p = GarchParams { alpha0: 0.0, alpha1: 0.0, beta0: 0.1, beta1: 0.6, beta2: 0.4 };
        assert!(matches!(p.unconditional_variance(), Err(Error::NonStationary { .. })));
        assert!(p.validate().is_err());
        assert!(GarchParams::new(0.0, 0.0, 0.0, 0.1, 0.1).is_err());
        assert!(GarchParams::new(0.0, 0.0, 0.1, -0.1, 0.1).is_err());
        assert!(GarchParams::new(f64::NAN, 0.0, 0.1, 0.1, 0.1).is_err());
    }
}
