//! Map between the constrained parameters and an unconstrained vector.
//!
//! `beta0 = exp(t2)`; the persistence `beta1 + beta2 = CAP * logistic(t3)`
//! and the GARCH share `beta1 / (beta1 + beta2) = logistic(t4)`. The mean
//! coefficients pass through unchanged.

use super::GarchParams;
use crate::error::{Error, Result};

/// Upper bound on `beta1 + beta2` reachable by the optimizer.
pub const PERSISTENCE_CAP: f64 = 1.0 - 1e-6;

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub fn from_unconstrained(theta: &[f64; 5]) -> GarchParams {
    let persistence = PERSISTENCE_CAP * logistic(theta[3]);
    let share = logistic(theta[4]);
    GarchParams {
        alpha0: theta[0],
        alpha1: theta[1],
        beta0: theta[2].exp(),
        beta1: persistence * share,
        beta2: persistence * (1.0 - share),
    }
}

/// Inverse of [`from_unconstrained`]; needs `beta1, beta2 > 0` and
/// persistence below [`PERSISTENCE_CAP`].
pub fn to_unconstrained(params: &GarchParams) -> Result<[f64; 5]> {
    let p = params.persistence();
    if !(params.beta0 > 0.0 && params.beta1 > 0.0 && params.beta2 > 0.0 && p < PERSISTENCE_CAP) {
        return Err(Error::InvalidParams(format!(
            "{params:?} lies outside the interior of the parameter space"
        )));
    }
    Ok([
        params.alpha0,
        params.alpha1,
        params.beta0.ln(),
        logit(p / PERSISTENCE_CAP),
        logit(params.beta1 / p),
    ])
}
