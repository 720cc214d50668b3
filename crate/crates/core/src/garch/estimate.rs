//! Maximum-likelihood estimation.
//!
//! The optimizer works on a standardized copy of the data: returns divided
//! by their standard deviation `s`, exogenous values centered and divided by
//! their standard deviation. The likelihood of the standardized problem
//! differs from the original one by the constant `n ln s`, and the two
//! parameter vectors are related by a fixed affine map, so the optimum and
//! the inverse Hessian carry over exactly. Scaling makes one simplex and one
//! finite-difference step size fit returns of any magnitude.

use log::warn;
use statrs::distribution::{ContinuousCDF, Normal};

use super::likelihood::{ll_unchecked, mean_residuals, variance_recursion};
use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::reparam::{from_unconstrained, to_unconstrained};
use super::{FitOptions, GarchFit, GarchParams, StepPolicy};
use crate::error::{Error, Result};
use crate::garch::numerical_hessian;
use crate::linalg::Matrix;
use crate::timeseries::{AlignedDataset, DatedSeries};

/// Initial simplex offsets in unconstrained coordinates.
const SIMPLEX_STEPS: [f64; 5] = [0.1, 0.1, 0.5, 0.5, 0.5];

struct Standardization {
    return_sd: f64,
    exog_mean: f64,
    exog_sd: f64,
}

impl Standardization {
    fn of(data: &AlignedDataset) -> Result<Self> {
        let (rm, rv) = mean_var(data.returns());
        let (xm, xv) = mean_var(data.exog());
        if rv.is_nan() || rv <= 0.0 || data.returns().iter().all(|r| *r == data.returns()[0]) {
            return Err(Error::Degenerate("returns are constant".into()));
        }
        let _ = rm;
        if xv.is_nan() || xv <= 0.0 || data.exog().iter().all(|x| *x == data.exog()[0]) {
            return Err(Error::Degenerate(
                "exogenous regressor is constant, so its coefficient is not identified".into(),
            ));
        }
        Ok(Self {
            return_sd: rv.sqrt(),
            exog_mean: xm,
            exog_sd: xv.sqrt(),
        })
    }

    fn apply(&self, data: &AlignedDataset) -> (Vec<f64>, Vec<f64>) {
        let r = data.returns().iter().map(|r| r / self.return_sd).collect();
        let x = data
            .exog()
            .iter()
            .map(|x| (x - self.exog_mean) / self.exog_sd)
            .collect();
        (r, x)
    }

    /// Jacobian of original parameters with respect to standardized ones.
    fn jacobian(&self) -> Matrix {
        let s = self.return_sd;
        let mut j = Matrix::identity(5);
        j[(0, 0)] = s;
        j[(0, 1)] = -s * self.exog_mean / self.exog_sd;
        j[(1, 1)] = s / self.exog_sd;
        j[(2, 2)] = s * s;
        j
    }

    fn to_original(&self, p: &GarchParams) -> GarchParams {
        let s = self.return_sd;
        let alpha1 = p.alpha1 * s / self.exog_sd;
        GarchParams {
            alpha0: s * p.alpha0 - alpha1 * self.exog_mean,
            alpha1,
            beta0: s * s * p.beta0,
            beta1: p.beta1,
            beta2: p.beta2,
        }
    }

    fn to_standard(&self, p: &GarchParams) -> GarchParams {
        let s = self.return_sd;
        GarchParams {
            alpha0: (p.alpha0 + p.alpha1 * self.exog_mean) / s,
            alpha1: p.alpha1 * self.exog_sd / s,
            beta0: p.beta0 / (s * s),
            beta1: p.beta1,
            beta2: p.beta2,
        }
    }
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n)
}

fn default_start(data: &AlignedDataset) -> GarchParams {
    let (mean, var) = mean_var(data.returns());
    GarchParams {
        alpha0: mean,
        alpha1: 0.0,
        beta0: 0.1 * var,
        beta1: 0.8,
        beta2: 0.1,
    }
}

pub fn fit(data: &AlignedDataset, options: &FitOptions) -> Result<GarchFit> {
    let std = Standardization::of(data)?;
    let start = match options.start {
        Some(p) => {
            p.validate()?;
            p
        }
        None => default_start(data),
    };

    // pre-sample variance from the residuals at the starting values
    let start_resid = mean_residuals(&start, data.returns(), data.exog());
    let (_, h0) = mean_var(&start_resid);
    if h0.is_nan() || h0 <= 0.0 {
        return Err(Error::Degenerate("starting residuals have zero variance".into()));
    }
    let (r, x) = std.apply(data);
    let h0_std = h0 / (std.return_sd * std.return_sd);
    let n = data.len() as f64;

    let objective = |theta: &[f64]| -> f64 {
        let theta: [f64; 5] = theta.try_into().expect("five parameters");
        let p = from_unconstrained(&theta);
        match ll_unchecked(&p, &r, &x, h0_std) {
            Ok(ll) => -ll / n,
            Err(_) => f64::INFINITY,
        }
    };

    let start_std = std.to_standard(&start);
    let theta0 = to_unconstrained(&start_std)?;
    let nm = NelderMeadOptions {
        max_iterations: options.max_iterations,
        f_tol: options.f_tol,
        x_tol: options.x_tol,
    };
    let mut best = nelder_mead(objective, &theta0, &SIMPLEX_STEPS, &nm);
    let mut iterations = best.iterations;
    if options.restart {
        let again = nelder_mead(objective, &best.x, &SIMPLEX_STEPS, &nm);
        iterations += again.iterations;
        if again.f <= best.f {
            best = again;
        } else {
            best.converged = again.converged;
        }
    }
    let mut warnings = Vec::new();
    if !best.converged {
        let msg = format!(
            "simplex did not meet tolerances within {} iterations per run",
            options.max_iterations
        );
        warn!("{}: {msg}", data.return_label());
        warnings.push(msg);
    }

    let theta: [f64; 5] = best.x.as_slice().try_into().expect("five parameters");
    let fitted_std = from_unconstrained(&theta);
    let params = std.to_original(&fitted_std);
    if let Err(e) = params.validate() {
        return Err(Error::InvalidParams(format!("optimizer left the parameter space: {e}")));
    }

    let covariance = covariance(&fitted_std, &r, &x, h0_std, &std, &options.hessian_step, &mut warnings);
    let est = params.to_array();
    let mut std_errors = [f64::NAN; 5];
    if let Some(cov) = &covariance {
        for (i, se) in std_errors.iter_mut().enumerate() {
            let v = cov[(i, i)];
            if v > 0.0 {
                *se = v.sqrt();
            }
        }
        if std_errors.iter().any(|s| s.is_nan()) {
            warnings.push("covariance matrix has non-positive diagonal entries".into());
        }
    }
    let normal = Normal::standard();
    let z_stats: [f64; 5] = std::array::from_fn(|i| est[i] / std_errors[i]);
    let p_values: [f64; 5] = std::array::from_fn(|i| {
        let z = z_stats[i];
        if z.is_nan() {
            f64::NAN
        } else {
            (2.0 * normal.sf(z.abs())).min(1.0)
        }
    });

    let resid = mean_residuals(&params, data.returns(), data.exog());
    let h = variance_recursion(&params, &resid, h0)?;
    let log_likelihood = ll_unchecked(&params, data.returns(), data.exog(), h0)?;
    let start_log_likelihood = ll_unchecked(&start, data.returns(), data.exog(), h0)?;
    let std_resid: Vec<f64> = resid.iter().zip(&h).map(|(e, h)| e / h.sqrt()).collect();

    let label = data.return_label();
    let dates = data.dates().to_vec();
    Ok(GarchFit {
        params,
        std_errors,
        z_stats,
        p_values,
        covariance,
        log_likelihood,
        start_log_likelihood,
        nobs: data.len(),
        cond_variance: DatedSeries::new(format!("{label} conditional variance"), dates.clone(), h)?,
        residuals: DatedSeries::new(format!("{label} residual"), dates.clone(), resid)?,
        std_residuals: DatedSeries::new(format!("{label} standardized residual"), dates, std_resid)?,
        converged: best.converged,
        iterations,
        h0,
        warnings,
    })
}

/// Inverse negative Hessian in original units.
fn covariance(
    fitted_std: &GarchParams,
    r: &[f64],
    x: &[f64],
    h0: f64,
    std: &Standardization,
    step: &StepPolicy,
    warnings: &mut Vec<String>,
) -> Option<Matrix> {
    let mut step = step.clone();
    if step.scale.is_empty() {
        // alphas are O(1) after standardization; beta0 steps stay relative
        // so the stencil keeps it positive
        step.scale = vec![1.0, 1.0, 0.0, 1e-2, 1e-2];
    }
    let neg_ll = |v: &[f64]| -> f64 {
        let p = GarchParams::from_array(v.try_into().expect("five parameters"));
        ll_unchecked(&p, r, x, h0).map_or(f64::NAN, |ll| -ll)
    };
    let hessian = match numerical_hessian(neg_ll, &fitted_std.to_array(), &step) {
        Ok(h) => h,
        Err(e) => {
            warnings.push(format!("Hessian evaluation failed: {e}"));
            return None;
        }
    };
    let cov_std = match hessian.invert_symmetric() {
        Ok(c) => c,
        Err(e) => {
            warnings.push(format!("Hessian is not invertible: {e}"));
            return None;
        }
    };
    let j = std.jacobian();
    let mut cov = j.mul(&cov_std).mul(&j.transpose());
    cov.symmetrize();
    Some(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate, SimConfig};

    fn truth() -> GarchParams {
        GarchParams::new(0.0, 0.5, 0.1, 0.8, 0.1).unwrap()
    }

    #[test]
    fn standardization_round_trip() {
        let sim = simulate(&SimConfig::new(truth(), 200, 1)).unwrap();
        let data = sim.dataset().unwrap();
        let s = Standardization::of(&data).unwrap();
        let p = GarchParams::new(0.3, -1.2, 0.05, 0.6, 0.3).unwrap();
        let back = s.to_original(&s.to_standard(&p)).to_array();
        for (a, b) in back.iter().zip(p.to_array()) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
        // likelihoods differ by n ln s
        let (r, x) = s.apply(&data);
        let h0 = 1.7;
        let ll = ll_unchecked(&p, data.returns(), data.exog(), h0).unwrap();
        let ll_std = ll_unchecked(&s.to_standard(&p), &r, &x, h0 / s.return_sd.powi(2)).unwrap();
        let shift = data.len() as f64 * s.return_sd.ln();
        assert!((ll - (ll_std - shift)).abs() < 1e-8 * ll.abs());
    }

    #[test]
    fn recovers_simulated_parameters() {
        let sim = simulate(&SimConfig::new(truth(), 5000, 2024)).unwrap();
        let f = fit(&sim.dataset().unwrap(), &FitOptions::default()).unwrap();
        assert!(f.converged, "{:?}", f.warnings);
        assert!(f.has_standard_errors());
        let est = f.params.to_array();
        for (i, t) in truth().to_array().iter().enumerate() {
            assert!((est[i] - t).abs() < 3.0 * f.std_errors[i], "param {i}: {} vs {t} (se {})", est[i], f.std_errors[i]);
        }
        assert!((f.params.beta1 - 0.8).abs() < 0.05);
        assert!((f.params.beta2 - 0.1).abs() < 0.05);
        assert!(f.log_likelihood >= f.start_log_likelihood);
        let z = f.std_residuals.values();
        let var = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
        assert!((0.9..=1.1).contains(&var), "{var}");
        for (i, e) in est.iter().enumerate() {
            assert!((f.z_stats[i] - e / f.std_errors[i]).abs() < 1e-12 * f.z_stats[i].abs().max(1.0));
            assert!((0.0..=1.0).contains(&f.p_values[i]));
        }
        let h = variance_recursion(&f.params, f.residuals.values(), f.h0).unwrap();
        for (a, b) in h.iter().zip(f.cond_variance.values()) {
            assert!((a - b).abs() <= 1e-10 * b);
        }
    }

    #[test]
    fn tiny_return_scale_fits_like_unit_scale() {
        // daily FX returns are ~1e-4 while case differences run to the hundreds
        let sim = simulate(&SimConfig::new(truth(), 2000, 77)).unwrap();
        let base = sim.dataset().unwrap();
        let (a, b) = (1e-4, 250.0);
        let scaled = AlignedDataset::new(
            base.dates().to_vec(),
            base.returns().iter().map(|r| r * a).collect(),
            base.exog().iter().map(|x| x * b).collect(),
            "r",
            "x",
        )
        .unwrap();
        let f0 = fit(&base, &FitOptions::default()).unwrap();
        let f1 = fit(&scaled, &FitOptions::default()).unwrap();
        let rel = |u: f64, v: f64| (u - v).abs() / v.abs();
        assert!(rel(f1.params.alpha1, f0.params.alpha1 * a / b) < 1e-4);
        assert!(rel(f1.params.beta0, f0.params.beta0 * a * a) < 1e-3);
        assert!((f1.params.beta1 - f0.params.beta1).abs() < 1e-4);
        assert!(rel(f1.std_errors[1], f0.std_errors[1] * a / b) < 1e-3);
    }

    #[test]
    fn exog_shift_moves_only_the_intercept() {
        let sim = simulate(&SimConfig::new(truth(), 1500, 5)).unwrap();
        let base = sim.dataset().unwrap();
        let c = 40.0;
        let shifted = AlignedDataset::new(
            base.dates().to_vec(),
            base.returns().to_vec(),
            base.exog().iter().map(|x| x + c).collect(),
            "r",
            "x",
        )
        .unwrap();
        let f0 = fit(&base, &FitOptions::default()).unwrap();
        let f1 = fit(&shifted, &FitOptions::default()).unwrap();
        let rel = |u: f64, v: f64| (u - v).abs() <= 1e-4 * v.abs().max(1e-12);
        assert!(rel(f1.params.alpha1, f0.params.alpha1));
        assert!(rel(f1.params.beta0, f0.params.beta0));
        assert!(rel(f1.params.beta1, f0.params.beta1));
        assert!(rel(f1.params.beta2, f0.params.beta2));
        let expect = f0.params.alpha0 - f0.params.alpha1 * c;
        assert!((f1.params.alpha0 - expect).abs() <= 1e-4 * expect.abs().max(f0.std_errors[0]));
    }

    #[test]
    fn constant_returns_rejected() {
        let sim = simulate(&SimConfig::new(truth(), 100, 3)).unwrap();
        let d = sim.dataset().unwrap();
        let flat = AlignedDataset::new(d.dates().to_vec(), vec![0.01; 100], d.exog().to_vec(), "r", "x").unwrap();
        assert!(matches!(fit(&flat, &FitOptions::default()), Err(Error::Degenerate(_))));
        let no_x = AlignedDataset::new(d.dates().to_vec(), d.returns().to_vec(), vec![3.0; 100], "r", "x").unwrap();
        assert!(matches!(fit(&no_x, &FitOptions::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn iteration_cap_flags_non_convergence() {
        let sim = simulate(&SimConfig::new(truth(), 500, 9)).unwrap();
        let opts = FitOptions {
            max_iterations: 5,
            ..Default::default()
        };
        let f = fit(&sim.dataset().unwrap(), &opts).unwrap();
        assert!(!f.converged);
        assert!(!f.warnings.is_empty());
        assert!(f.params.persistence() < 1.0);
    }
}
