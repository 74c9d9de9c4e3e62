//! Pareto tail exponent estimation from tabulated income summaries.
//!
//! Published income statistics rarely come as micro data. Tax authorities
//! release tabulations: for each income bracket, the number of returns and
//! the total income accruing to it. This crate estimates the Pareto exponent
//! of the upper tail from such tabulations.
//!
//! * [`tabulation`] holds the data model and the cleaning transforms
//!   (zero-count merging, common thresholds, capital income derivation).
//! * [`pareto`] has the closed-form tail math and log-log share curves.
//! * [`estimators`] implements the minimum-distance estimator on ratios of
//!   group incomes with efficient weighting, grouped maximum likelihood on
//!   threshold counts, and the two threshold/share heuristics.
//! * [`sampleframe`] estimates the number of potential tax units.
//! * [`simulate`] generates seeded Pareto samples and runs Monte Carlo
//!   calibration studies.
//!
//! ## Cargo features
//!
//! * `std`: links the standard library; implied by `parallel`.
//! * `parallel`: runs Monte Carlo replications on the rayon thread pool.
//! * `serde`: derives `Serialize`/`Deserialize` for the public data types.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
// NaN must fail these guards, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod estimators;
mod math;
mod minimize;
pub mod pareto;
pub mod sampleframe;
pub mod simulate;
mod spline;
pub mod tabulation;

pub use error::{Error, Result};
pub use estimators::{EstimateResult, Method, TwConfig};
pub use pareto::{ParetoTail, ShareCurve};
pub use sampleframe::{DemographicField, DemographicRecord, DemographicSeries};
pub use simulate::{Boundaries, McReport, SimConfig};
pub use spline::NaturalCubicSpline;
pub use tabulation::{Concept, CumulativeView, IncomeGroup, Tabulation};

pub use nalgebra;
