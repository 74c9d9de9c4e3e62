//! Minimum distance estimation on ratios of group incomes.
//!
//! The estimate minimizes `(r(alpha) - s)' W (r(alpha) - s)` over a compact
//! interval. Starting from `W = Omega(alpha_init)^-1` the weighting matrix
//! is re-evaluated at each new estimate until the estimate stops moving, at
//! which point `W = Omega(alpha_hat)^-1` is the efficient weighting and the
//! asymptotic variance reduces to `(R' Omega^-1 R)^-1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::moments::{build_moment_system, check_fractiles, empirical_ratios, ratios_derivative_raw, ratios_raw};
use super::select::select_top_groups;
use super::{EstimateResult, Method};
use crate::error::{Error, Result};
use crate::math::{abs, sqrt};
use crate::minimize::minimize;
use crate::tabulation::{CumulativeView, Tabulation};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwConfig {
    /// Groups are used while their cumulative fractile stays within this.
    pub top_fraction: f64,
    /// Exponent at which the first-stage weighting matrix is evaluated.
    pub alpha_init: f64,
    pub search_interval: (f64, f64),
    pub iteration_tol: f64,
    pub max_iterations: usize,
    pub objective_tol: f64,
}

impl Default for TwConfig {
    fn default() -> Self {
        TwConfig {
            top_fraction: 0.01,
            alpha_init: 2.0,
            search_interval: (1.05, 20.0),
            iteration_tol: 1e-6,
            max_iterations: 50,
            objective_tol: 1e-10,
        }
    }
}

impl TwConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.search_interval;
        if !(1.0 < lo && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidConfig(format!("search interval ({lo}, {hi}) must satisfy 1 < lo < hi")));
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!("top fraction {} outside (0, 1]", self.top_fraction)));
        }
        if !(self.alpha_init > 1.0 && self.alpha_init.is_finite()) {
            return Err(Error::InvalidConfig(format!("initial alpha {} must exceed 1", self.alpha_init)));
        }
        if !(self.iteration_tol > 0.0 && self.objective_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

// distance from a search bound below which the minimizer counts as stuck
const BOUNDARY_TOL: f64 = 1e-8;

/// Estimates from a tabulation, choosing `L` from `cfg.top_fraction`.
pub fn tw_estimate(t: &Tabulation, n: f64, cfg: &TwConfig) -> Result<EstimateResult> {
    let cv = t.cumulate(true);
    let l = select_top_groups(&cv, n, cfg.top_fraction)?;
    tw_estimate_groups(&cv, n, l, cfg)
}

/// Estimates from groups `2..=L+1` of a cumulative view.
pub fn tw_estimate_groups(cv: &CumulativeView, n: f64, l: usize, cfg: &TwConfig) -> Result<EstimateResult> {
    let emp = empirical_ratios(cv, l)?;
    let required = cv.cum_counts[l];
    if !(n >= required as f64) {
        return Err(Error::PopulationTooSmall { n, required });
    }
    let fractiles = cv.fractiles(n, l + 1);
    tw_fit(&fractiles, emp.s.as_slice(), n, cfg)
}

/// Fits `alpha` to observed ratios `s` (length `L - 1`) at top fractiles
/// `p_1..p_{L+1}`. `n` only scales the standard error.
pub fn tw_fit(fractiles: &[f64], s: &[f64], n: f64, cfg: &TwConfig) -> Result<EstimateResult> {
    cfg.validate()?;
    let l = check_fractiles(fractiles)?;
    if s.len() != l - 1 {
        return Err(Error::Mismatch(format!("{} ratios for {} segments", s.len(), l)));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("income ratios"));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(crate::error::domain("population must be positive"));
    }
    let s = DVector::from_column_slice(s);
    let (lo, hi) = cfg.search_interval;
    let mut warnings = Vec::new();

    let mut weight = efficient_weight(cfg.alpha_init, fractiles, &mut warnings)?;
    let mut previous = cfg.alpha_init;
    let mut last_change = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        let objective = |alpha: f64| {
            let d = ratios_raw(alpha, fractiles) - &s;
            (d.transpose() * &weight * &d)[(0, 0)]
        };
        let slope = |alpha: f64| {
            let d = ratios_raw(alpha, fractiles) - &s;
            let dr = ratios_derivative_raw(alpha, fractiles);
            2.0 * (d.transpose() * &weight * dr)[(0, 0)]
        };
        let m = minimize(objective, slope, lo, hi, cfg.objective_tol);
        if !m.fx.is_finite() {
            return Err(Error::NonFinite("minimum distance objective"));
        }
        if m.x - lo < BOUNDARY_TOL || hi - m.x < BOUNDARY_TOL {
            return Err(Error::BoundaryHit { alpha: m.x });
        }
        last_change = abs(m.x - previous);
        if last_change < cfg.iteration_tol {
            let variance = variance_with_warnings(m.x, fractiles, &mut warnings)?;
            return Ok(EstimateResult {
                method: Method::Tw,
                alpha_hat: m.x,
                se: Some(sqrt(variance / n)),
                l_used: l,
                iterations: iteration,
                objective_value: m.fx,
                warnings,
            });
        }
        previous = m.x;
        weight = efficient_weight(m.x, fractiles, &mut warnings)?;
    }
    Err(Error::NoConvergence { iterations: cfg.max_iterations, last_change })
}

/// `Omega(alpha)^-1`.
pub fn efficient_weight_matrix(alpha: f64, fractiles: &[f64]) -> Result<DMatrix<f64>> {
    efficient_weight(alpha, fractiles, &mut Vec::new())
}

fn efficient_weight(alpha: f64, fractiles: &[f64], warnings: &mut Vec<String>) -> Result<DMatrix<f64>> {
    let ms = build_moment_system(alpha, fractiles)?;
    Ok(factor_spd(ms.omega, warnings)?.inverse())
}

/// Cholesky factor of a symmetric positive definite matrix, retried once
/// with a small diagonal jitter.
fn factor_spd(m: DMatrix<f64>, warnings: &mut Vec<String>) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c);
    }
    let size = m.nrows();
    let jitter = 1e-12 * m.trace() / size as f64;
    let jittered = m + DMatrix::identity(size, size) * jitter;
    match Cholesky::new(jittered) {
        Some(c) => {
            warnings.push(format!("Omega factorization needed diagonal jitter {jitter:e}"));
            Ok(c)
        }
        None => Err(Error::Singular("Omega is not positive definite")),
    }
}

/// Central-difference gradient `R = d r / d alpha` with step
/// `1e-6 * max(1, alpha)`.
pub fn ratio_gradient(alpha: f64, fractiles: &[f64]) -> Result<DVector<f64>> {
    check_fractiles(fractiles)?;
    let h = 1e-6 * alpha.max(1.0);
    if !(alpha - h > 1.0) {
        return Err(crate::error::domain("alpha too close to 1 for the gradient step"));
    }
    Ok((ratios_raw(alpha + h, fractiles) - ratios_raw(alpha - h, fractiles)) / (2.0 * h))
}

/// Efficient asymptotic variance `(R' Omega^-1 R)^-1` of `sqrt(n)(alpha_hat - alpha)`.
pub fn asymptotic_variance(alpha_hat: f64, fractiles: &[f64]) -> Result<f64> {
    variance_with_warnings(alpha_hat, fractiles, &mut Vec::new())
}

fn variance_with_warnings(alpha: f64, fractiles: &[f64], warnings: &mut Vec<String>) -> Result<f64> {
    let ms = build_moment_system(alpha, fractiles)?;
    let grad = ratio_gradient(alpha, fractiles)?;
    let chol = factor_spd(ms.omega, warnings)?;
    let info = grad.dot(&chol.solve(&grad));
    if !(info > 0.0 && info.is_finite()) {
        return Err(Error::Singular("R' Omega^-1 R"));
    }
    Ok(1.0 / info)
}

/// Standard error `sqrt((R' Omega^-1 R)^-1 / n)`.
pub fn asymptotic_se(alpha_hat: f64, fractiles: &[f64], n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(crate::error::domain("population must be positive"));
    }
    Ok(sqrt(asymptotic_variance(alpha_hat, fractiles)? / n))
}

/// Sandwich variance `(R'WR)^-1 R'W Omega W R (R'WR)^-1` for an arbitrary
/// weighting matrix `W`.
pub fn sandwich_variance(grad: &DVector<f64>, weight: &DMatrix<f64>, omega: &DMatrix<f64>) -> f64 {
    let wr = weight * grad;
    let bread = grad.dot(&wr);
    let meat = wr.dot(&(omega * &wr));
    meat / (bread * bread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::moments::moment_ratios;

    fn geometric(l: usize, top: f64) -> Vec<f64> {
        (0..=l).map(|k| top * crate::math::pow(2.0, k as f64 - l as f64)).collect()
    }

    #[test]
    fn exact_moments_are_recovered() {
        let cfg = TwConfig::default();
        for alpha in [1.2, 1.5, 2.0, 3.0] {
            let p = geometric(5, 0.01);
            let s = moment_ratios(alpha, &p).unwrap();
            let est = tw_fit(&p, s.as_slice(), 1e8, &cfg).unwrap();
            assert!((est.alpha_hat - alpha).abs() < 1e-6, "{alpha}: {}", est.alpha_hat);
            assert!(est.objective_value < 1e-16);
            assert_eq!(est.method, Method::Tw);
            assert_eq!(est.l_used, 5);
        }
    }

    #[test]
    fn se_scales_with_inverse_root_n() {
        let p = geometric(4, 0.01);
        let a = asymptotic_se(1.7, &p, 1e7).unwrap();
        let b = asymptotic_se(1.7, &p, 2e7).unwrap();
        assert!((a / b - crate::math::sqrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn boundary_minimum_is_an_error() {
        // ratios far beyond anything a Pareto tail with alpha > 1.05 produces
        let p = geometric(3, 0.01);
        let s = [50.0, 60.0];
        let err = tw_fit(&p, &s, 1e6, &TwConfig::default()).unwrap_err();
        assert!(matches!(err, Error::BoundaryHit { .. }), "{err:?}");
    }

    #[test]
    fn config_validation() {
        let bad = TwConfig { search_interval: (0.9, 20.0), ..TwConfig::default() };
        assert!(bad.validate().is_err());
        let bad = TwConfig { top_fraction: 0.0, ..TwConfig::default() };
        assert!(bad.validate().is_err());
        assert!(TwConfig::default().validate().is_ok());
    }

    #[test]
    fn mismatched_ratio_length() {
        let p = geometric(4, 0.01);
        assert!(matches!(tw_fit(&p, &[1.0], 1e6, &TwConfig::default()), Err(Error::Mismatch(_))));
    }

    #[test]
    fn sandwich_equals_efficient_at_inverse_omega() {
        let p = geometric(5, 0.02);
        let ms = build_moment_system(1.8, &p).unwrap();
        let grad = ratio_gradient(1.8, &p).unwrap();
        let w = ms.omega.clone().try_inverse().unwrap();
        let v = sandwich_variance(&grad, &w, &ms.omega);
        let eff = asymptotic_variance(1.8, &p).unwrap();
        assert!((v - eff).abs() < 1e-8 * eff);
        let identity = DMatrix::identity(4, 4);
        assert!(sandwich_variance(&grad, &identity, &ms.omega) >= eff * (1.0 - 1e-10));
    }
}
