//! Central finite differences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Step `h_i = relative * max(|x_i|, scale_i)`; `scale` defaults to 1 for
/// coordinates it does not cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub relative: f64,
    pub scale: Vec<f64>,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            relative: 1e-4,
            scale: Vec::new(),
        }
    }
}

impl StepPolicy {
    pub fn steps(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let s = self.scale.get(i).copied().unwrap_or(1.0);
                self.relative * x.abs().max(s)
            })
            .collect()
    }
}

fn evaluate<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], index: usize) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            what: format!("objective in difference stencil at {x:?}"),
            index,
        })
    }
}

/// Symmetric matrix of central second differences.
pub fn numerical_hessian<F>(f: F, point: &[f64], step: &StepPolicy) -> Result<Matrix>
where
    F: Fn(&[f64]) -> f64,
{
    let n = point.len();
    let h = step.steps(point);
    if h.iter().any(|s| s.is_nan() || *s <= 0.0) {
        return Err(Error::invalid("finite-difference steps must be positive"));
    }
    let f0 = evaluate(&f, point, 0)?;
    let mut x = point.to_vec();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        x[i] = point[i] + h[i];
        let fp = evaluate(&f, &x, i)?;
        x[i] = point[i] - h[i];
        let fm = evaluate(&f, &x, i)?;
        x[i] = point[i];
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                x[i] = point[i] + si * h[i];
                x[j] = point[j] + sj * h[j];
                let v = evaluate(&f, &x, i);
                x[i] = point[i];
                x[j] = point[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out.symmetrize();
    Ok(out)
}

pub fn numerical_gradient<F>(f: F, point: &[f64], step: &StepPolicy) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let h = step.steps(point);
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        x[i] = point[i] + h[i];
        let fp = evaluate(&f, &x, i)?;
        x[i] = point[i] - h[i];
        let fm = evaluate(&f, &x, i)?;
        x[i] = point[i];
        grad.push((fp - fm) / (2.0 * h[i]));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square() {
        for x in [-3.0, 0.0, 0.7, 120.0] {
            let h = numerical_hessian(|v| v[0] * v[0], &[x], &StepPolicy::default()).unwrap();
            assert!((h[(0, 0)] - 2.0).abs() < 1e-6, "{x}: {}", h[(0, 0)]);
        }
    }

    #[test]
    fn bilinear() {
        let h = numerical_hessian(|v| v[0] * v[1], &[0.3, -2.0], &StepPolicy::default()).unwrap();
        assert!((h[(0, 1)] - 1.0).abs() < 1e-6);
        assert!((h[(1, 0)] - 1.0).abs() < 1e-6);
        assert!(h[(0, 0)].abs() < 1e-6 && h[(1, 1)].abs() < 1e-6);
    }

    #[test]
    fn stencil_hitting_nan_errors() {
        let r = numerical_hessian(|v| v[0].ln(), &[1e-5], &StepPolicy { relative: 2.0, scale: vec![] });
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    fn quartic(v: &[f64]) -> f64 {
        let (x, y, z) = (v[0], v[1], v[2]);
        x.powi(4) + x * x * y * y + y * z.powi(3) + z.powi(4)
    }

    fn quartic_hessian(x: f64, y: f64, z: f64) -> [[f64; 3]; 3] {
        [
            [12.0 * x * x + 2.0 * y * y, 4.0 * x * y, 0.0],
            [4.0 * x * y, 2.0 * x * x, 3.0 * z * z],
            [0.0, 3.0 * z * z, 6.0 * y * z + 12.0 * z * z],
        ]
    }

    proptest! {
        #[test]
        fn quartic_matches_analytic(x in 0.5f64..3.0, y in 0.5f64..3.0, z in 0.5f64..3.0) {
            let num = numerical_hessian(quartic, &[x, y, z], &StepPolicy::default()).unwrap();
            let exact = quartic_hessian(x, y, z);
            let scale = exact.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((num[(i, j)] - exact[i][j]).abs() <= 1e-4 * scale,
                        "({i},{j}) {} vs {}", num[(i, j)], exact[i][j]);
                }
            }
        }

        #[test]
        fn gradient_of_quartic(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
            let g = numerical_gradient(quartic, &[x, y, z], &StepPolicy { relative: 1e-6, scale: vec![] }).unwrap();
            let exact = [
                4.0 * x.powi(3) + 2.0 * x * y * y,
                2.0 * x * x * y + z.powi(3),
                3.0 * y * z * z + 4.0 * z.powi(3),
            ];
            for i in 0..3 {
                prop_assert!((g[i] - exact[i]).abs() < 1e-7);
            }
        }
    }
}
