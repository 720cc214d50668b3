//! `simulate`: writes files the other subcommands read.
//!
//! `rates.csv` holds `date,buy,sell` with buy = sell = `100 exp(cumsum r)`
//! and `cases.csv` holds `date,cases` with cases = `cumsum x`, both starting
//! one day before the first simulated return so that log returns and first
//! differences recover `r` and `x`. `truth.csv` has the simulated values and
//! true conditional variances.

use std::path::PathBuf;

use chrono::NaiveDate;
use clap::Args;

use super::CliError;
use crate::error::Error;
use crate::garch::GarchParams;
use crate::io::write_columns;
use crate::report::{Cell, Report, Table};
use crate::simulate::{simulate_regimes, ExogSpec, NormalStream, Simulation, DEFAULT_BURN_IN};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Simulated returns per series
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// Number of rate series sharing one case series
    #[arg(long, default_value_t = 1)]
    pub series: usize,
    #[arg(long, default_value = "2020-03-09", value_name = "DATE")]
    pub start_date: NaiveDate,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta0: f64,
    #[arg(long, default_value_t = 0.8)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta2: f64,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub exog_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub exog_sd: f64,

    /// Row at which the second regime starts (0-based)
    #[arg(long, value_name = "ROW")]
    pub switch_at: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha0_after: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1_after: Option<f64>,
    #[arg(long)]
    pub beta0_after: Option<f64>,
    #[arg(long)]
    pub beta1_after: Option<f64>,
    #[arg(long)]
    pub beta2_after: Option<f64>,
}

impl SimulateArgs {
    fn params(&self) -> Result<(GarchParams, Option<GarchParams>), CliError> {
        let bad = |e: Error| CliError::Usage(e.to_string());
        let before = GarchParams::new(self.alpha0, self.alpha1, self.beta0, self.beta1, self.beta2).map_err(bad)?;
        let has_after = [self.alpha0_after, self.alpha1_after, self.beta0_after, self.beta1_after, self.beta2_after]
            .iter()
            .any(Option::is_some);
        if has_after && self.switch_at.is_none() {
            return Err(CliError::Usage("--*-after parameters need --switch-at".into()));
        }
        let after = match self.switch_at {
            None => None,
            Some(_) => Some(
                GarchParams::new(
                    self.alpha0_after.unwrap_or(self.alpha0),
                    self.alpha1_after.unwrap_or(self.alpha1),
                    self.beta0_after.unwrap_or(self.beta0),
                    self.beta1_after.unwrap_or(self.beta1),
                    self.beta2_after.unwrap_or(self.beta2),
                )
                .map_err(bad)?,
            ),
        };
        Ok((before, after))
    }
}

fn series_file(series: usize, i: usize) -> String {
    if series == 1 {
        "rates.csv".into()
    } else {
        format!("rates_{}.csv", i + 1)
    }
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let Some(out) = &a.out else {
        return Err(CliError::Usage("simulate needs --out DIR".into()));
    };
    if a.length == 0 || a.series == 0 {
        return Err(CliError::Usage("--length and --series must be at least 1".into()));
    }
    if a.exog_sd.is_nan() || a.exog_sd < 0.0 {
        return Err(CliError::Usage("--exog-sd must be non-negative".into()));
    }
    let (before, after) = a.params()?;
    let regimes = match (a.switch_at, after) {
        (Some(k), Some(p)) => {
            if k == 0 || k >= a.length {
                return Err(CliError::Usage(format!("--switch-at must lie in 1..{}", a.length)));
            }
            vec![(before, k), (p, a.length - k)]
        }
        _ => vec![(before, a.length)],
    };

    let mut z = NormalStream::with_stream(a.seed, 1);
    let exog: Vec<f64> = (0..a.length).map(|_| a.exog_mean + a.exog_sd * z.next_normal()).collect();
    let sims: Vec<Simulation> = (0..a.series as u64)
        .map(|i| {
            simulate_regimes(&regimes, a.burn_in, a.seed.wrapping_add(i), &ExogSpec::Supplied(exog.clone()), a.start_date)
        })
        .collect::<Result<_, _>>()?;

    std::fs::create_dir_all(out).map_err(Error::from)?;
    let day0 = a
        .start_date
        .pred_opt()
        .ok_or_else(|| CliError::Usage("start date out of range".into()))?;
    let mut dates = vec![day0];
    dates.extend_from_slice(&sims[0].dates);

    let mut files = Vec::new();
    for (i, s) in sims.iter().enumerate() {
        let mut level = vec![100.0];
        let mut acc = 0.0;
        for r in &s.returns {
            acc += r;
            level.push(100.0 * acc.exp());
        }
        if level.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(CliError::Numerical(
                "cumulated returns overflow the rate level; use a smaller --beta0 or --length".into(),
            ));
        }
        let name = series_file(a.series, i);
        write_columns(&out.join(&name), &["buy", "sell"], &dates, &[&level, &level])?;
        files.push(name);
    }
    let mut cases = vec![0.0];
    let mut acc = 0.0;
    for x in &exog {
        acc += x;
        cases.push(acc);
    }
    write_columns(&out.join("cases.csv"), &["cases"], &dates, &[&cases])?;
    files.push("cases.csv".into());

    let mut names = vec!["exog".to_string()];
    let mut cols: Vec<&[f64]> = vec![&exog];
    for (i, s) in sims.iter().enumerate() {
        let tag = if a.series == 1 { String::new() } else { format!("_{}", i + 1) };
        names.push(format!("return{tag}"));
        names.push(format!("cond_variance{tag}"));
        cols.push(&s.returns);
        cols.push(&s.cond_variance);
    }
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    write_columns(&out.join("truth.csv"), &name_refs, &sims[0].dates, &cols)?;
    files.push("truth.csv".into());

    let columns: Vec<String> = if regimes.len() == 1 {
        vec!["value".into()]
    } else {
        vec!["regime 1".into(), "regime 2".into()]
    };
    let mut t = Table::new("Simulation parameters", columns);
    for (i, name) in crate::garch::PARAM_NAMES.iter().enumerate() {
        t.push(*name, regimes.iter().map(|(p, _)| Cell::number(p.to_array()[i])).collect());
    }
    t.push("Observations", regimes.iter().map(|(_, n)| Cell::number(*n as f64)).collect());
    let mut r = Report::new("simulate");
    r.tables.push(t);
    r.notes.push(format!(
        "seed {}, burn-in {}, {} series, first return dated {}",
        a.seed, a.burn_in, a.series, a.start_date
    ));
    if let (Some(k), true) = (a.switch_at, regimes.len() == 2) {
        r.notes.push(format!("second regime starts {}", sims[0].dates[k]));
    }
    for f in files {
        r.notes.push(format!("wrote {}", out.join(f).display()));
    }
    Ok(r)
}
