//! Decide, per input time series, whether it is plausibly drawn from a
//! Gaussian stationary process.
//!
//! The decision flow per series: a four-test stationarity panel, then two
//! marginal Gaussianity tests valid under serial dependence combined by a
//! dependent-case false-discovery-rate adjustment, then — for series the
//! marginal stage does not reject — a random-projection test able to reject
//! process-level Gaussianity even when every one-dimensional marginal is
//! Gaussian.
//!
//! Entry points: [`pipeline::analyze_station`] / [`pipeline::analyze_batch`]
//! for the full flow, the individual tests in [`stationarity`],
//! [`marginal`] and [`projection`], and the seeded generators in [`synth`]
//! for calibration.

pub mod error;
pub mod fdr;
pub mod marginal;
pub mod pipeline;
pub mod projection;
pub mod series;
pub mod stationarity;
mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use series::{MomentSet, RawRecord, TimeSeries};
pub use stationarity::{PBound, StationarityPanel, TestName, TestOutcome};
pub use stats::derive_seed;
