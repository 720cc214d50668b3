//! GARCH(1,1)-X data generator.
//!
//! Normal draws come from the Box-Muller transform applied to uniforms taken
//! from a ChaCha20 stream (a counter-based generator), so a seed reproduces
//! the same bits on every platform. Innovations use stream 0 of the seed and
//! exogenous draws use stream 1, so changing the exogenous spec never moves
//! the innovation sequence.

use chrono::NaiveDate;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::GarchParams;
use crate::timeseries::{daily_dates, AlignedDataset};

pub const DEFAULT_BURN_IN: usize = 500;

/// Seeded standard-normal stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform on (0, 1] with 53 bits of resolution.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExogSpec {
    Zeros,
    IidNormal { mean: f64, sd: f64 },
    Supplied(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: GarchParams,
    pub length: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub exog: ExogSpec,
    pub start_date: NaiveDate,
}

impl SimConfig {
    pub fn new(params: GarchParams, length: usize, seed: u64) -> Self {
        Self {
            params,
            length,
            burn_in: DEFAULT_BURN_IN,
            seed,
            exog: ExogSpec::IidNormal { mean: 0.0, sd: 1.0 },
            start_date: NaiveDate::from_ymd_opt(2020, 3, 9).expect("valid date"),
        }
    }
}

/// A simulated path with the true conditional variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<f64>,
    pub exog: Vec<f64>,
    pub innovations: Vec<f64>,
    pub cond_variance: Vec<f64>,
}

impl Simulation {
    pub fn dataset(&self) -> Result<AlignedDataset> {
        AlignedDataset::new(
            self.dates.clone(),
            self.returns.clone(),
            self.exog.clone(),
            "return",
            "exog",
        )
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

pub fn simulate(config: &SimConfig) -> Result<Simulation> {
    simulate_regimes(
        &[(config.params, config.length)],
        config.burn_in,
        config.seed,
        &config.exog,
        config.start_date,
    )
}

/// Simulates consecutive regimes, each `(params, length)`, carrying the
/// variance state across regime boundaries. Burn-in uses the first regime.
pub fn simulate_regimes(
    regimes: &[(GarchParams, usize)],
    burn_in: usize,
    seed: u64,
    exog: &ExogSpec,
    start_date: NaiveDate,
) -> Result<Simulation> {
    let Some(&(first, _)) = regimes.first() else {
        return Err(Error::invalid("no regimes to simulate"));
    };
    for (p, _) in regimes {
        p.validate()?;
    }
    let length: usize = regimes.iter().map(|r| r.1).sum();
    if length == 0 {
        return Err(Error::invalid("simulation length must be at least 1"));
    }
    let x = match exog {
        ExogSpec::Zeros => vec![0.0; length],
        ExogSpec::IidNormal { mean, sd } => {
            if sd.is_nan() || *sd < 0.0 {
                return Err(Error::invalid("exogenous sd must be non-negative"));
            }
            let mut z = NormalStream::with_stream(seed, 1);
            (0..length).map(|_| mean + sd * z.next_normal()).collect()
        }
        ExogSpec::Supplied(v) => {
            if v.len() != length {
                return Err(Error::invalid(format!(
                    "supplied exogenous path has {} values, simulation needs {length}",
                    v.len()
                )));
            }
            v.clone()
        }
    };

    let mut z = NormalStream::new(seed);
    let mut h = first.unconditional_variance()?;
    let mut eps = h.sqrt() * z.next_normal();
    for _ in 0..burn_in {
        h = first.beta0 + first.beta1 * h + first.beta2 * eps * eps;
        eps = h.sqrt() * z.next_normal();
    }

    let mut innovations = Vec::with_capacity(length);
    let mut cond_variance = Vec::with_capacity(length);
    let mut returns = Vec::with_capacity(length);
    let mut t = 0;
    for (p, len) in regimes {
        for _ in 0..*len {
            if t > 0 || burn_in > 0 {
                h = p.beta0 + p.beta1 * h + p.beta2 * eps * eps;
                eps = h.sqrt() * z.next_normal();
            }
            cond_variance.push(h);
            innovations.push(eps);
            returns.push(p.alpha0 + p.alpha1 * x[t] + eps);
            t += 1;
        }
    }

    Ok(Simulation {
        dates: daily_dates(start_date, length),
        returns,
        exog: x,
        innovations,
        cond_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptive::summarize;
    use crate::garch::variance_path_from;

    fn params(a0: f64, a1: f64, b0: f64, b1: f64, b2: f64) -> GarchParams {
        GarchParams::new(a0, a1, b0, b1, b2).unwrap()
    }

    #[test]
    fn uniform_is_in_open_closed_unit_interval() {
        let mut s = NormalStream::new(1);
        for _ in 0..10_000 {
            let u = s.next_uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn constant_variance_case() {
        let mut cfg = SimConfig::new(params(0.0, 0.0, 0.5, 0.0, 0.0), 10_000, 11);
        cfg.exog = ExogSpec::Zeros;
        let sim = simulate(&cfg).unwrap();
        let n = sim.len() as f64;
        let mean = sim.returns.iter().sum::<f64>() / n;
        let var = sim.returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 0.5 - 1.0).abs() < 0.05, "{var}");
        assert!(sim.cond_variance.iter().all(|h| *h == 0.5));
    }

    #[test]
    fn same_seed_same_bits() {
        let cfg = SimConfig::new(params(0.1, 0.5, 0.1, 0.8, 0.1), 300, 99);
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let mut other = cfg.clone();
        other.seed = 100;
        assert_ne!(simulate(&cfg).unwrap().returns, simulate(&other).unwrap().returns);
    }

    #[test]
    fn exog_spec_does_not_move_innovations() {
        let mut cfg = SimConfig::new(params(0.0, 0.5, 0.1, 0.8, 0.1), 200, 5);
        let a = simulate(&cfg).unwrap();
        cfg.exog = ExogSpec::Zeros;
        let b = simulate(&cfg).unwrap();
        assert_eq!(a.innovations, b.innovations);
        assert_eq!(b.returns, b.innovations);
    }

    #[test]
    fn garch_returns_are_fat_tailed() {
        let mut cfg = SimConfig::new(params(0.0, 0.0, 0.05, 0.8, 0.15), 10_000, 3);
        cfg.exog = ExogSpec::Zeros;
        let sim = simulate(&cfg).unwrap();
        let k = summarize(&sim.returns).unwrap().kurtosis;
        assert!(k > 3.0, "{k}");
    }

    #[test]
    fn stored_path_satisfies_recursion() {
        let p = params(0.2, -0.3, 0.1, 0.7, 0.2);
        let sim = simulate(&SimConfig::new(p, 2_000, 17)).unwrap();
        let h = variance_path_from(&p, sim.cond_variance[0], &sim.innovations);
        for (a, b) in h.iter().zip(&sim.cond_variance) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        let resid: Vec<f64> = sim
            .returns
            .iter()
            .zip(&sim.exog)
            .map(|(r, x)| r - p.alpha0 - p.alpha1 * x)
            .collect();
        for (e, i) in resid.iter().zip(&sim.innovations) {
            assert!((e - i).abs() < 1e-12);
        }
    }

    #[test]
    fn long_run_variance_converges() {
        let p = params(0.0, 0.0, 0.1, 0.8, 0.1);
        let mut cfg = SimConfig::new(p, 100_000, 2024);
        cfg.exog = ExogSpec::Zeros;
        let sim = simulate(&cfg).unwrap();
        let var = sim.innovations.iter().map(|e| e * e).sum::<f64>() / sim.len() as f64;
        let target = p.unconditional_variance().unwrap();
        assert!((var / target - 1.0).abs() < 0.05, "{var} vs {target}");
    }

    #[test]
    fn no_burn_in_starts_at_unconditional_variance() {
        let p = params(0.0, 0.0, 0.2, 0.5, 0.3);
        let mut cfg = SimConfig::new(p, 5, 1);
        cfg.burn_in = 0;
        let sim = simulate(&cfg).unwrap();
        assert!((sim.cond_variance[0] - 1.0).abs() < 1e-15);
        assert!(sim.dataset().is_err());
    }

    #[test]
    fn regimes_switch_mean_coefficient() {
        let before = params(0.0, -0.5, 0.1, 0.8, 0.1);
        let after = params(0.0, 0.5, 0.1, 0.8, 0.1);
        let start = NaiveDate::from_ymd_opt(2020, 3, 9).unwrap();
        let sim = simulate_regimes(&[(before, 50), (after, 70)], 100, 4, &ExogSpec::IidNormal { mean: 0.0, sd: 1.0 }, start).unwrap();
        assert_eq!(sim.len(), 120);
        for t in 0..120 {
            let a1 = if t < 50 { -0.5 } else { 0.5 };
            assert!((sim.returns[t] - a1 * sim.exog[t] - sim.innovations[t]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_configs() {
        let bad = GarchParams { alpha0: 0.0, alpha1: 0.0, beta0: 0.1, beta1: 0.7, beta2: 0.4 };
        assert!(simulate(&SimConfig::new(bad, 10, 1)).is_err());
        let mut cfg = SimConfig::new(params(0.0, 0.0, 0.1, 0.5, 0.2), 0, 1);
        assert!(simulate(&cfg).is_err());
        cfg.length = 10;
        cfg.exog = ExogSpec::Supplied(vec![1.0; 3]);
        assert!(simulate(&cfg).is_err());
    }
}
