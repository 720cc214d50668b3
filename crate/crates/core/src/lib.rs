//! GARCH(1,1) volatility modeling with an exogenous regressor in the mean
//! equation, plus the surrounding workflow: series construction, descriptive
//! statistics, unit-root tests, residual diagnostics, forecasting and
//! simulation.

pub mod cli;
pub mod descriptive;
pub mod diagnostics;
pub mod error;
pub mod forecast;
pub mod garch;
pub mod io;
pub mod linalg;
pub mod report;
pub mod simulate;
pub mod timeseries;
pub mod unitroot;

pub use error::{Error, Result};
pub use garch::{fit, FitOptions, GarchFit, GarchParams};
pub use timeseries::{AlignPolicy, AlignedDataset, DatedSeries, QuoteSeries};
