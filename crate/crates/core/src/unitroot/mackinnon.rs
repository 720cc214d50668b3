//! Response-surface approximations for the Dickey-Fuller tau distribution
//! with a single integrated variable.
//!
//! P-values follow MacKinnon (1994, "Approximate asymptotic distribution
//! functions for unit-root and cointegration tests"); finite-sample critical
//! values follow MacKinnon (2010, "Critical values for cointegration tests",
//! Queen's Economics Department Working Paper 1227). The constants are the
//! same tables distributed with statsmodels' `adfvalues` module.

use statrs::distribution::{ContinuousCDF, Normal};

use super::Deterministic;

struct Surface {
    tau_max: f64,
    tau_min: f64,
    tau_star: f64,
    small_p: [f64; 3],
    large_p: [f64; 4],
    /// 1%, 5%, 10% rows of `b0 + b1/T + b2/T^2 + b3/T^3`
    critical: [[f64; 4]; 3],
}

const NONE: Surface = Surface {
    tau_max: f64::INFINITY,
    tau_min: -19.04,
    tau_star: -1.04,
    small_p: [0.6344, 1.2378, 3.2496e-2],
    large_p: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
    critical: [
        [-2.56574, -2.2358, -3.627, 0.0],
        [-1.94100, -0.2686, -3.365, 31.223],
        [-1.61682, 0.2656, -2.714, 25.364],
    ],
};

const CONSTANT: Surface = Surface {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small_p: [2.1659, 1.4412, 3.8269e-2],
    large_p: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
    critical: [
        [-3.43035, -6.5393, -16.786, -79.433],
        [-2.86154, -2.8903, -4.234, -40.040],
        [-2.56677, -1.5384, -2.809, 0.0],
    ],
};

const CONSTANT_TREND: Surface = Surface {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small_p: [3.2512, 1.6047, 4.9588e-2],
    large_p: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
    critical: [
        [-3.95877, -9.0531, -28.428, -134.155],
        [-3.41049, -4.3904, -9.036, -45.374],
        [-3.12705, -2.5856, -3.925, -22.380],
    ],
};

fn surface(det: Deterministic) -> &'static Surface {
    match det {
        Deterministic::None => &NONE,
        Deterministic::Constant => &CONSTANT,
        Deterministic::ConstantTrend => &CONSTANT_TREND,
    }
}

/// Evaluates `c[0] + c[1] x + c[2] x^2 + ...`.
fn poly(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Asymptotic p-value of a Dickey-Fuller tau statistic.
pub fn p_value(stat: f64, det: Deterministic) -> f64 {
    let s = surface(det);
    if stat > s.tau_max {
        return 1.0;
    }
    if stat < s.tau_min {
        return 0.0;
    }
    let z = if stat <= s.tau_star {
        poly(&s.small_p, stat)
    } else {
        poly(&s.large_p, stat)
    };
    Normal::standard().cdf(z)
}

/// Finite-sample critical values at 1%, 5%, 10% for `nobs` regression rows.
pub fn critical_values(det: Deterministic, nobs: usize) -> [f64; 3] {
    let inv = 1.0 / nobs as f64;
    surface(det).critical.map(|row| poly(&row, inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Deterministic; 3] = [
        Deterministic::None,
        Deterministic::Constant,
        Deterministic::ConstantTrend,
    ];

    #[test]
    fn critical_values_are_ordered() {
        for det in ALL {
            for nobs in [10, 20, 25, 50, 100, 212, 1000, 100_000] {
                let [c1, c5, c10] = critical_values(det, nobs);
                assert!(c1 < c5 && c5 < c10 && c10 < 0.0, "{det:?} {nobs}");
            }
        }
    }

    #[test]
    fn asymptotic_constant_case() {
        // tables' leading terms are the T -> infinity critical values
        let [c1, c5, c10] = critical_values(Deterministic::Constant, usize::MAX);
        assert!((c1 + 3.43035).abs() < 1e-9);
        assert!((c5 + 2.86154).abs() < 1e-9);
        assert!((c10 + 2.56677).abs() < 1e-9);
    }

    #[test]
    fn p_values_against_statsmodels() {
        // statsmodels.tsa.adfvalues.mackinnonp(stat, regression, N=1)
        let cases = [
            (-2.86154, Deterministic::Constant, 0.050006651165625596),
            (-3.5, Deterministic::Constant, 0.007987094061496709),
            (-1.0, Deterministic::Constant, 0.7532643012005655),
            (-3.41049, Deterministic::ConstantTrend, 0.05000209078363985),
            (-2.0, Deterministic::None, 0.043520623056049056),
        ];
        for (stat, det, expect) in cases {
            let p = p_value(stat, det);
            assert!((p - expect).abs() < 1e-10, "{stat} {det:?}: {p} vs {expect}");
        }
    }

    #[test]
    fn p_value_monotone_and_clipped() {
        for det in ALL {
            let mut prev = 0.0;
            for i in 0..400 {
                let stat = -20.0 + i as f64 * 0.05;
                let p = p_value(stat, det);
                assert!((0.0..=1.0).contains(&p));
                assert!(p + 1e-12 >= prev, "{det:?} at {stat}");
                prev = p;
            }
        }
        assert_eq!(p_value(-25.0, Deterministic::Constant), 0.0);
        assert_eq!(p_value(3.0, Deterministic::Constant), 1.0);
    }
}
