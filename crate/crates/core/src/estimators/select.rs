use alloc::vec::Vec;

use super::tw::{tw_estimate_groups, TwConfig};
use super::EstimateResult;
use crate::error::{Error, Result};
use crate::tabulation::{CumulativeView, Tabulation};

/// Largest `L` such that the top `L + 1` groups lie within the top
/// `fraction` of the population.
pub fn select_top_groups(cv: &CumulativeView, n: f64, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(alloc::format!("top fraction {fraction} outside (0, 1]")));
    }
    if let Some(&last) = cv.cum_counts.last() {
        if !(n >= last as f64) {
            return Err(Error::PopulationTooSmall { n, required: last });
        }
    }
    let groups = cv.cum_counts.iter().take_while(|&&c| c as f64 / n <= fraction).count();
    if groups < 3 {
        return Err(Error::TooFewTopGroups { fraction, groups });
    }
    Ok(groups - 1)
}

/// One point of a threshold-sensitivity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub l: usize,
    /// Lower threshold of group `L + 1`, the lowest group used.
    pub threshold: Option<f64>,
    /// Top fractile `n_{L+1} / n` covered by the groups used.
    pub fractile: f64,
    pub estimate: core::result::Result<EstimateResult, Error>,
}

/// Minimum distance estimates for every `L` from 2 up to all positive
/// groups. Failed points stay in the list with their error.
pub fn tail_scan(t: &Tabulation, n: f64, cfg: &TwConfig) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    let cv = t.cumulate(true);
    if cv.len() < 3 {
        return Err(Error::InsufficientGroups { needed: 3, found: cv.len() });
    }
    Ok((2..cv.len())
        .map(|l| ScanPoint {
            l,
            threshold: cv.thresholds[l],
            fractile: cv.cum_counts[l] as f64 / n,
            estimate: tw_estimate_groups(&cv, n, l, cfg),
        })
        .collect())
}
