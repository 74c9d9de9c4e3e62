//! Grouped maximum likelihood when income thresholds are published.
//!
//! Conditional on income above the lowest threshold used, `t_L`, group
//! counts are multinomial with probabilities
//! `P_k = (t_k/t_L)^-alpha - (t_{k-1}/t_L)^-alpha` (with `t_0 = inf`).

use alloc::format;
use alloc::vec::Vec;

use super::select::select_top_groups;
use super::{EstimateResult, Method};
use crate::error::{domain, Error, Result};
use crate::math::{exp, ln, sqrt};
use crate::minimize::minimize;
use crate::tabulation::Tabulation;

/// Bracket searched for the likelihood maximum.
pub const ML_SEARCH_INTERVAL: (f64, f64) = (0.05, 50.0);

// Per-group log probabilities in a form that stays finite for large alpha:
// ln P_k = -alpha ln x_k + ln(1 - (x_{k-1}/x_k)^-alpha), x_k = t_k / t_L.
struct Grouped {
    log_x: Vec<f64>,
    q: Vec<f64>,
    n_l: f64,
}

impl Grouped {
    fn new(thresholds: &[f64], counts: &[u64], l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InsufficientGroups { needed: 2, found: l });
        }
        if thresholds.len() < l || counts.len() < l {
            return Err(Error::InsufficientGroups { needed: l, found: thresholds.len().min(counts.len()) });
        }
        let t = &thresholds[..l];
        if t.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(domain("thresholds must be positive"));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] < w[0])) {
            return Err(Error::NonMonotoneThresholds { index: i + 2 });
        }
        if let Some(k) = counts[..l].iter().position(|&c| c == 0) {
            return Err(domain(format!("group {} has a zero count; merge it first", k + 1)));
        }
        let n_l: u64 = counts[..l].iter().sum();
        let t_l = t[l - 1];
        Ok(Grouped {
            log_x: t.iter().map(|&v| ln(v / t_l)).collect(),
            q: counts[..l].iter().map(|&c| c as f64 / n_l as f64).collect(),
            n_l: n_l as f64,
        })
    }

    fn log_likelihood(&self, alpha: f64) -> f64 {
        let mut ll = 0.0;
        for (k, (&lx, &q)) in self.log_x.iter().zip(&self.q).enumerate() {
            let mut log_p = -alpha * lx;
            if k > 0 {
                let gap = self.log_x[k - 1] - lx;
                log_p += libm::log1p(-exp(-alpha * gap));
            }
            ll += q * log_p;
        }
        ll
    }

    fn score(&self, alpha: f64) -> f64 {
        let mut d = 0.0;
        for (k, (&lx, &q)) in self.log_x.iter().zip(&self.q).enumerate() {
            let term = if k == 0 {
                -lx
            } else {
                let rho = exp(-alpha * (self.log_x[k - 1] - lx));
                (-lx + self.log_x[k - 1] * rho) / (1.0 - rho)
            };
            d += q * term;
        }
        d
    }
}

/// Normalized log likelihood `sum_k q_k ln P_k(alpha)` over the top `l`
/// groups.
pub fn ml_log_likelihood(alpha: f64, thresholds: &[f64], counts: &[u64], l: usize) -> Result<f64> {
    Ok(Grouped::new(thresholds, counts, l)?.log_likelihood(alpha))
}

/// Maximum likelihood from the top `l` groups. Thresholds run from the
/// highest down; `counts[k]` is the number of returns in group `k + 1`.
/// The standard error comes from the observed information `-n_L l''`.
pub fn ml_grouped(thresholds: &[f64], counts: &[u64], l: usize) -> Result<EstimateResult> {
    let g = Grouped::new(thresholds, counts, l)?;
    let (lo, hi) = ML_SEARCH_INTERVAL;
    let m = minimize(|a| -g.log_likelihood(a), |a| -g.score(a), lo, hi, 1e-14);
    if !m.fx.is_finite() {
        return Err(Error::NonFinite("grouped log likelihood"));
    }
    if m.x - lo < 1e-8 || hi - m.x < 1e-8 {
        return Err(Error::BoundaryHit { alpha: m.x });
    }
    let alpha = m.x;
    let h = 1e-5 * alpha;
    let curvature = (g.score(alpha + h) - g.score(alpha - h)) / (2.0 * h);
    let information = -g.n_l * curvature;
    if !(information > 0.0 && information.is_finite()) {
        return Err(Error::Singular("observed information"));
    }
    Ok(EstimateResult {
        method: Method::Ml,
        alpha_hat: alpha,
        se: Some(1.0 / sqrt(information)),
        l_used: l,
        iterations: 1,
        objective_value: -m.fx,
        warnings: Vec::new(),
    })
}

/// Maximum likelihood on a tabulation with its own thresholds, using every
/// group inside the top `fraction` (the same `L + 1` groups that enter the
/// minimum distance estimator).
pub fn ml_estimate(t: &Tabulation, n: f64, fraction: f64) -> Result<EstimateResult> {
    if !t.has_own_thresholds() {
        return Err(Error::Mismatch(format!("{} tabulation lacks its own income thresholds", t.concept)));
    }
    let cv = t.cumulate(true);
    let groups = select_top_groups(&cv, n, fraction)? + 1;
    let thresholds: Vec<f64> = cv.thresholds[..groups].iter().map(|v| v.expect("checked")).collect();
    let counts: Vec<u64> = (1..=groups).map(|k| cv.group_count(k)).collect();
    ml_grouped(&thresholds, &counts, groups)
}
