//! Two-point estimators: the tail-count ratio across two thresholds and the
//! share ratio across two top fractiles. Both are exact under a Pareto tail
//! but carry no standard error.

use alloc::vec::Vec;

use super::{EstimateResult, Method};
use crate::error::{domain, Error, Result};
use crate::math::ln;
use crate::pareto::{interpolate_share, ShareCurve};
use crate::tabulation::CumulativeView;

/// Tail fraction the two FP thresholds bracket.
pub const FP_TARGET_FRACTION: f64 = 0.005;

/// Default AP fractiles `(p, q)`.
pub const AP_FRACTILES: (f64, f64) = (0.001, 0.01);

/// `ln[(1 - F(y1)) / (1 - F(y2))] / ln(y2 / y1)` from tail counts at
/// `y1 < y2`.
pub fn fp_from_tail(y1: f64, tail1: f64, y2: f64, tail2: f64) -> Result<f64> {
    if !(0.0 < y1 && y1 < y2) {
        return Err(domain("need thresholds 0 < y1 < y2"));
    }
    if !(tail1 > 0.0 && tail2 > 0.0) {
        return Err(domain("tail counts must be positive"));
    }
    Ok(ln(tail1 / tail2) / ln(y2 / y1))
}

/// FP estimate bracketing the top 0.5%.
pub fn fp_estimate(cv: &CumulativeView, n: f64) -> Result<EstimateResult> {
    fp_estimate_at(cv, n, FP_TARGET_FRACTION)
}

/// `y1` is the largest threshold whose tail fraction reaches `target`, and
/// `y2` the next threshold above it.
pub fn fp_estimate_at(cv: &CumulativeView, n: f64, target: f64) -> Result<EstimateResult> {
    if cv.thresholds.iter().any(Option::is_none) {
        return Err(Error::Mismatch("FP needs income thresholds".into()));
    }
    if !(n > 0.0) {
        return Err(domain("population must be positive"));
    }
    let k = cv
        .cum_counts
        .iter()
        .position(|&c| c as f64 / n >= target)
        .filter(|&k| k > 0)
        .ok_or(Error::NoBracket { target })?;
    let y1 = cv.thresholds[k].expect("checked");
    let y2 = cv.thresholds[k - 1].expect("checked");
    let alpha = fp_from_tail(y1, cv.cum_counts[k] as f64, y2, cv.cum_counts[k - 1] as f64)?;
    Ok(EstimateResult {
        method: Method::Fp,
        alpha_hat: alpha,
        se: None,
        l_used: 2,
        iterations: 0,
        objective_value: 0.0,
        warnings: Vec::new(),
    })
}

/// `(1 - ln[S(q)/S(p)] / ln(q/p))^-1` for shares at `p < q`.
pub fn ap_from_shares(share_p: f64, share_q: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0 < p && p < q) {
        return Err(domain("need fractiles 0 < p < q"));
    }
    if !(share_p > 0.0 && share_q > 0.0) {
        return Err(domain("shares must be positive"));
    }
    let ratio = share_q / share_p;
    let slope = ln(ratio) / ln(q / p);
    // a Pareto tail with alpha > 1 has 0 < slope < 1
    if !(slope > 0.0 && slope < 1.0) {
        return Err(Error::AlphaAtMostOne { ratio, fractile_ratio: q / p });
    }
    Ok(1.0 / (1.0 - slope))
}

/// AP estimate from a share curve, interpolating shares at `p` and `q`.
pub fn ap_estimate(curve: &ShareCurve, p: f64, q: f64) -> Result<EstimateResult> {
    if !(p < q) {
        return Err(domain("need p < q"));
    }
    let share_p = interpolate_share(curve, p)?;
    let share_q = interpolate_share(curve, q)?;
    let alpha = ap_from_shares(share_p, share_q, p, q)?;
    Ok(EstimateResult {
        method: Method::Ap,
        alpha_hat: alpha,
        se: None,
        l_used: curve.len(),
        iterations: 0,
        objective_value: 0.0,
        warnings: Vec::new(),
    })
}
