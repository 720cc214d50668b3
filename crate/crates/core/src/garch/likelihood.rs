use serde::{Deserialize, Serialize};

use super::GarchParams;
use crate::error::{Error, Result};
use crate::timeseries::{AlignedDataset, MIN_OBSERVATIONS};

const LN_2PI: f64 = 1.8378770664093453;

/// How the pre-sample variance `h0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H0Policy {
    /// Variance (1/n, centered) of the mean-equation residuals at the given
    /// parameters.
    ResidualVariance,
    Fixed(f64),
}

impl H0Policy {
    pub fn resolve(&self, residuals: &[f64]) -> Result<f64> {
        let h0 = match *self {
            H0Policy::Fixed(v) => v,
            H0Policy::ResidualVariance => {
                let n = residuals.len() as f64;
                let mean = residuals.iter().sum::<f64>() / n;
                residuals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n
            }
        };
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(Error::Degenerate(format!("pre-sample variance {h0} is not positive")));
        }
        Ok(h0)
    }
}

/// `r_t - alpha0 - alpha1 x_t`
pub fn mean_residuals(params: &GarchParams, returns: &[f64], exog: &[f64]) -> Vec<f64> {
    returns
        .iter()
        .zip(exog)
        .map(|(r, x)| r - params.alpha0 - params.alpha1 * x)
        .collect()
}

/// Variance path with `h_1 = first_h` and
/// `h_t = beta0 + beta1 h_{t-1} + beta2 e_{t-1}^2` afterwards.
pub fn variance_path_from(params: &GarchParams, first_h: f64, residuals: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(residuals.len());
    if residuals.is_empty() {
        return out;
    }
    let mut h = first_h;
    out.push(h);
    for e in &residuals[..residuals.len() - 1] {
        h = params.beta0 + params.beta1 * h + params.beta2 * e * e;
        out.push(h);
    }
    out
}

/// Conditional variances for `residuals`, seeding both the pre-sample
/// variance and the pre-sample squared innovation with `h0`.
pub fn variance_recursion(params: &GarchParams, residuals: &[f64], h0: f64) -> Result<Vec<f64>> {
    params.validate()?;
    if residuals.is_empty() {
        return Err(Error::TooShort {
            what: "variance recursion",
            needed: 1,
            got: 0,
        });
    }
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::invalid(format!("h0 = {h0} must be positive")));
    }
    let first = params.beta0 + params.beta1 * h0 + params.beta2 * h0;
    Ok(variance_path_from(params, first, residuals))
}

/// Gaussian log-likelihood over the dataset.
pub fn log_likelihood(params: &GarchParams, data: &AlignedDataset, h0: H0Policy) -> Result<f64> {
    if data.len() < MIN_OBSERVATIONS {
        return Err(Error::TooShort {
            what: "log-likelihood",
            needed: MIN_OBSERVATIONS,
            got: data.len(),
        });
    }
    params.validate()?;
    let resid = mean_residuals(params, data.returns(), data.exog());
    let h0 = h0.resolve(&resid)?;
    ll_unchecked(params, data.returns(), data.exog(), h0)
}

/// Log-likelihood on raw vectors with no minimum length.
pub fn log_likelihood_raw(params: &GarchParams, returns: &[f64], exog: &[f64], h0: f64) -> Result<f64> {
    params.validate()?;
    check_inputs(returns, exog, h0)?;
    ll_unchecked(params, returns, exog, h0)
}

fn check_inputs(returns: &[f64], exog: &[f64], h0: f64) -> Result<()> {
    if returns.len() != exog.len() {
        return Err(Error::invalid("returns and exogenous lengths differ"));
    }
    if returns.is_empty() {
        return Err(Error::TooShort {
            what: "log-likelihood",
            needed: 1,
            got: 0,
        });
    }
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::invalid(format!("h0 = {h0} must be positive")));
    }
    Ok(())
}

/// Likelihood without parameter-invariant checks; only requires every
/// `h_t` to stay positive and finite. Used inside the optimizer and the
/// Hessian stencil, which may step just outside the constraint set.
pub(crate) fn ll_unchecked(params: &GarchParams, returns: &[f64], exog: &[f64], h0: f64) -> Result<f64> {
    let mut h = params.beta0 + params.beta1 * h0 + params.beta2 * h0;
    let mut total = 0.0;
    for (t, (r, x)) in returns.iter().zip(exog).enumerate() {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("conditional variance {h}"),
                index: t,
            });
        }
        let e = r - params.alpha0 - params.alpha1 * x;
        total += LN_2PI + h.ln() + e * e / h;
        h = params.beta0 + params.beta1 * h + params.beta2 * e * e;
    }
    let ll = -0.5 * total;
    if !ll.is_finite() {
        return Err(Error::NonFinite {
            what: "log-likelihood".into(),
            index: returns.len(),
        });
    }
    Ok(ll)
}

/// Analytic gradient of [`log_likelihood_raw`] with respect to
/// `(alpha0, alpha1, beta0, beta1, beta2)`, holding `h0` fixed.
pub fn log_likelihood_gradient(params: &GarchParams, returns: &[f64], exog: &[f64], h0: f64) -> Result<[f64; 5]> {
    params.validate()?;
    check_inputs(returns, exog, h0)?;
    let GarchParams {
        alpha0,
        alpha1,
        beta0,
        beta1,
        beta2,
    } = *params;

    let mut h = beta0 + beta1 * h0 + beta2 * h0;
    // dh/d(alpha0, alpha1, beta0, beta1, beta2) for the current h
    let mut dh = [0.0, 0.0, 1.0, h0, h0];
    let mut grad = [0.0; 5];
    for (r, x) in returns.iter().zip(exog) {
        let e = r - alpha0 - alpha1 * x;
        let de = [-1.0, -x, 0.0, 0.0, 0.0];
        let wh = 1.0 / h - e * e / (h * h);
        let we = 2.0 * e / h;
        for k in 0..5 {
            grad[k] -= 0.5 * (wh * dh[k] + we * de[k]);
        }
        let mut next = [0.0; 5];
        for k in 0..5 {
            next[k] = beta1 * dh[k] + 2.0 * beta2 * e * de[k];
        }
        next[2] += 1.0;
        next[3] += h;
        next[4] += e * e;
        h = beta0 + beta1 * h + beta2 * e * e;
        dh = next;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a0: f64, a1: f64, b0: f64, b1: f64, b2: f64) -> GarchParams {
        GarchParams::new(a0, a1, b0, b1, b2).unwrap()
    }

    #[test]
    fn constant_variance_recursion() {
        let h = variance_recursion(&p(0.0, 0.0, 1.0, 0.0, 0.0), &[3.0, -2.0, 0.5], 7.0).unwrap();
        assert_eq!(h, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn recursion_by_hand() {
        let params = p(0.0, 0.0, 0.2, 0.5, 0.3);
        // h1 = 0.2 + 0.5*1 + 0.3*1; h2 uses e1 = 1; h3 uses e2 = 2
        let h = variance_recursion(&params, &[1.0, 2.0, 0.0], 1.0).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-15);
        assert!((h[1] - 1.0).abs() < 1e-15);
        assert!((h[2] - 1.9).abs() < 1e-15);
    }

    #[test]
    fn recursion_matches_reference_loop() {
        // straightforward re-implementation written independently of the library
        fn reference(b: [f64; 3], e: &[f64], h0: f64) -> Vec<f64> {
            let mut out = vec![];
            let mut prev_h = h0;
            let mut prev_e2 = h0;
            for x in e {
                let h = b[0] + b[1] * prev_h + b[2] * prev_e2;
                out.push(h);
                prev_h = h;
                prev_e2 = x * x;
            }
            out
        }
        let mut z = crate::simulate::NormalStream::new(42);
        for _ in 0..50 {
            let b1 = z.next_uniform() * 0.6;
            let b2 = z.next_uniform() * 0.35;
            let b0 = z.next_uniform() + 0.01;
            let e: Vec<f64> = (0..100).map(|_| z.next_normal() * 2.0).collect();
            let h0 = z.next_uniform() * 3.0 + 0.1;
            let got = variance_recursion(&p(0.0, 0.0, b0, b1, b2), &e, h0).unwrap();
            for (a, b) in got.iter().zip(reference([b0, b1, b2], &e, h0)) {
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn recursion_errors() {
        assert!(variance_recursion(&p(0.0, 0.0, 0.1, 0.1, 0.1), &[], 1.0).is_err());
        assert!(variance_recursion(&p(0.0, 0.0, 0.1, 0.1, 0.1), &[1.0], 0.0).is_err());
        let bad = GarchParams { alpha0: 0.0, alpha1: 0.0, beta0: 0.1, beta1: 0.9, beta2: 0.2 };
        assert!(variance_recursion(&bad, &[1.0], 1.0).is_err());
    }

    #[test]
    fn single_standard_normal_point() {
        let ll = log_likelihood_raw(&p(0.0, 0.0, 1.0, 0.0, 0.0), &[0.0], &[0.0], 5.0).unwrap();
        assert!((ll + 0.9189385332046727).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_intercept_rejected() {
        let bad = GarchParams { alpha0: 0.0, alpha1: 0.0, beta0: 0.0, beta1: 0.5, beta2: 0.3 };
        assert!(log_likelihood_raw(&bad, &[0.1], &[0.0], 1.0).is_err());
    }

    #[test]
    fn likelihood_equals_sum_of_normal_densities() {
        use statrs::distribution::{Continuous, Normal};
        let mut z = crate::simulate::NormalStream::new(8);
        let r: Vec<f64> = (0..60).map(|_| z.next_normal()).collect();
        let x: Vec<f64> = (0..60).map(|_| z.next_normal()).collect();
        let params = p(0.1, -0.3, 0.2, 0.6, 0.25);
        let resid = mean_residuals(&params, &r, &x);
        let h = variance_recursion(&params, &resid, 1.3).unwrap();
        let brute: f64 = resid
            .iter()
            .zip(&h)
            .map(|(e, h)| Normal::new(0.0, h.sqrt()).unwrap().ln_pdf(*e))
            .sum();
        let ll = log_likelihood_raw(&params, &r, &x, 1.3).unwrap();
        assert!((ll - brute).abs() < 1e-10 * brute.abs());
    }

    #[test]
    fn residual_variance_h0_policy() {
        let h0 = H0Policy::ResidualVariance.resolve(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(h0, 1.0);
        assert!(H0Policy::ResidualVariance.resolve(&[2.0; 4]).is_err());
        assert!(H0Policy::Fixed(-1.0).resolve(&[1.0]).is_err());
    }
}
