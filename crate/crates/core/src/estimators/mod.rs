//! Pareto exponent estimators for tabulated data.
//!
//! | method | needs | module |
//! |--------|-------|--------|
//! | TW (minimum distance on group income ratios) | counts and totals | [`tw`] |
//! | ML (grouped maximum likelihood) | thresholds and counts | [`ml`] |
//! | FP (two-threshold tail ratio) | thresholds and counts | [`heuristic`] |
//! | AP (two-fractile share ratio) | top share curve | [`heuristic`] |

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;

pub mod heuristic;
pub mod ml;
pub mod moments;
pub mod select;
pub mod tw;

pub use heuristic::{ap_estimate, fp_estimate};
pub use ml::{ml_estimate, ml_grouped};
pub use moments::{
    build_moment_system, empirical_ratios, mu_segment, sigma2_segment, sigma_cross, EmpiricalMoments, MomentSystem,
};
pub use select::{select_top_groups, tail_scan, ScanPoint};
pub use tw::{asymptotic_se, tw_estimate, tw_estimate_groups, tw_fit, TwConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "UPPERCASE"))]
pub enum Method {
    Tw,
    Ml,
    Fp,
    Ap,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Tw, Method::Ml, Method::Fp, Method::Ap];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Tw => "TW",
            Method::Ml => "ML",
            Method::Fp => "FP",
            Method::Ap => "AP",
        }
    }

    /// Whether the method reads income thresholds.
    pub fn needs_thresholds(self) -> bool {
        !matches!(self, Method::Tw)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tw" => Ok(Method::Tw),
            "ml" => Ok(Method::Ml),
            "fp" => Ok(Method::Fp),
            "ap" => Ok(Method::Ap),
            other => Err(Error::InvalidConfig(alloc::format!("unknown method `{other}`"))),
        }
    }
}

/// Outcome of one estimator run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateResult {
    pub method: Method,
    pub alpha_hat: f64,
    /// Asymptotic standard error; absent for FP and AP.
    pub se: Option<f64>,
    /// Number of income groups `L` entering the estimate.
    pub l_used: usize,
    pub iterations: usize,
    /// Final minimum distance objective for TW, normalized log likelihood
    /// for ML, zero for the closed-form methods.
    pub objective_value: f64,
    pub warnings: Vec<String>,
}
