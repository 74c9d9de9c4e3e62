//! Moment conditions for ratios of group incomes under a Pareto tail.
//!
//! With tail index `xi = 1/alpha`, the expected income of the order
//! statistics between top fractiles `p < q` is proportional to
//! `mu(p, q) = (q^(1-xi) - p^(1-xi)) / (1 - xi)`. Ratios of these segment
//! means do not depend on the tail scale, which makes them usable when only
//! group totals are published. [`MomentSystem`] collects the means, their
//! ratios and the asymptotic covariance of the ratio vector at one `alpha`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::math::{ln, pow, power_difference};
use crate::tabulation::CumulativeView;

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("tail index {xi} outside (0, 1)")))
    }
}

fn check_segment(p: f64, q: f64) -> Result<()> {
    if p > 0.0 && p <= q && q <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("segment ({p}, {q}) is not an ordered pair of fractiles in (0, 1]")))
    }
}

/// Mean of the quantile function over `[p, q]`, up to scale.
pub fn mu_segment(p: f64, q: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    check_segment(p, q)?;
    Ok(mu_raw(p, q, xi))
}

/// Asymptotic variance of one segment's partial sum.
///
/// The first bracketed term has a removable singularity at `xi = 1/2`
/// where it equals `ln(q/p)`; it is evaluated through `(e^x - 1)/x`.
pub fn sigma2_segment(p: f64, q: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    check_segment(p, q)?;
    Ok(sigma2_raw(p, q, xi))
}

/// Asymptotic covariance between segments `[p_j, p_j1]` and `[p_k, p_k1]`
/// with the first lying wholly above the second in the ranking.
pub fn sigma_cross(p_j: f64, p_j1: f64, p_k: f64, p_k1: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    check_segment(p_j, p_j1)?;
    check_segment(p_k, p_k1)?;
    if p_j1 > p_k {
        return Err(domain("covariance segments overlap or are out of order"));
    }
    Ok(sigma_cross_raw(p_j, p_j1, p_k, p_k1, xi))
}

fn mu_raw(p: f64, q: f64, xi: f64) -> f64 {
    (pow(q, 1.0 - xi) - pow(p, 1.0 - xi)) / (1.0 - xi)
}

// d mu / d xi
fn mu_raw_dxi(p: f64, q: f64, xi: f64) -> f64 {
    let a = 1.0 - xi;
    let (qa, pa) = (pow(q, a), pow(p, a));
    -((ln(q) * qa - ln(p) * pa) / a - (qa - pa) / (a * a))
}

fn sigma2_raw(p: f64, q: f64, xi: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let a = 1.0 - xi;
    let first = power_difference(p, q, 1.0 - 2.0 * xi);
    let second = pow(p, a) * (pow(q, -xi) - pow(p, -xi)) / xi;
    let third = (2.0 * pow(p, a) * pow(q, a) - pow(p, 2.0 * a) - pow(q, 2.0 * a)) / (2.0 * a);
    2.0 * xi * xi / a * (first + second + third)
}

fn sigma_cross_raw(p_j: f64, p_j1: f64, p_k: f64, p_k1: f64, xi: f64) -> f64 {
    let a = 1.0 - xi;
    let upper = (pow(p_j1, a) - pow(p_j, a)) / a;
    let lower = (pow(p_k1, -xi) - pow(p_k, -xi)) / xi + (pow(p_k1, a) - pow(p_k, a)) / a;
    -xi * xi * upper * lower
}

/// Checks `p_1 < ... < p_{L+1}` in `(0, 1]` with `L >= 2` and returns `L`.
pub(crate) fn check_fractiles(fractiles: &[f64]) -> Result<usize> {
    if fractiles.len() < 3 {
        return Err(Error::InsufficientGroups { needed: 3, found: fractiles.len() });
    }
    if !(fractiles[0] > 0.0 && fractiles[fractiles.len() - 1] <= 1.0) {
        return Err(domain("fractiles must lie in (0, 1]"));
    }
    if fractiles.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("fractiles must strictly increase"));
    }
    Ok(fractiles.len() - 1)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("alpha {alpha} must exceed 1")))
    }
}

/// Everything the minimum distance estimator needs at one exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    /// Top fractiles `p_1 < ... < p_{L+1}`.
    pub fractiles: Vec<f64>,
    pub xi: f64,
    /// Segment means `mu_k = mu(p_k, p_{k+1})`, length `L`.
    pub mu: DVector<f64>,
    /// Ratios `r_k = mu_k / mu_L`, length `L - 1`.
    pub r: DVector<f64>,
    /// Covariance of the segment sums, `L x L`.
    pub sigma: DMatrix<f64>,
    /// Jacobian of the ratio map, `(L-1) x L`.
    pub h: DMatrix<f64>,
    /// Asymptotic covariance of the ratio vector, `H Sigma H'`.
    pub omega: DMatrix<f64>,
}

impl MomentSystem {
    pub fn alpha(&self) -> f64 {
        1.0 / self.xi
    }

    /// Number of segments `L`.
    pub fn l(&self) -> usize {
        self.mu.len()
    }
}

pub fn build_moment_system(alpha: f64, fractiles: &[f64]) -> Result<MomentSystem> {
    check_alpha(alpha)?;
    let l = check_fractiles(fractiles)?;
    let xi = 1.0 / alpha;
    let p = fractiles;

    let mu = DVector::from_fn(l, |k, _| mu_raw(p[k], p[k + 1], xi));
    let mu_l = mu[l - 1];
    let r = DVector::from_fn(l - 1, |k, _| mu[k] / mu_l);

    let mut sigma = DMatrix::zeros(l, l);
    for j in 0..l {
        sigma[(j, j)] = sigma2_raw(p[j], p[j + 1], xi);
        for k in j + 1..l {
            let c = sigma_cross_raw(p[j], p[j + 1], p[k], p[k + 1], xi);
            sigma[(j, k)] = c;
            sigma[(k, j)] = c;
        }
    }

    let mut h = DMatrix::zeros(l - 1, l);
    for j in 0..l - 1 {
        h[(j, j)] = 1.0 / mu_l;
        h[(j, l - 1)] = -r[j] / mu_l;
    }
    let omega = &h * &sigma * h.transpose();
    // exact symmetry for the factorization
    let omega = (&omega + omega.transpose()) * 0.5;

    Ok(MomentSystem { fractiles: p.to_vec(), xi, mu, r, sigma, h, omega })
}

/// Theoretical ratio vector `r(alpha)`.
pub fn moment_ratios(alpha: f64, fractiles: &[f64]) -> Result<DVector<f64>> {
    check_alpha(alpha)?;
    check_fractiles(fractiles)?;
    Ok(ratios_raw(alpha, fractiles))
}

pub(crate) fn ratios_raw(alpha: f64, p: &[f64]) -> DVector<f64> {
    let xi = 1.0 / alpha;
    let l = p.len() - 1;
    let mu_l = mu_raw(p[l - 1], p[l], xi);
    DVector::from_fn(l - 1, |k, _| mu_raw(p[k], p[k + 1], xi) / mu_l)
}

/// Analytic `d r / d alpha`.
pub(crate) fn ratios_derivative_raw(alpha: f64, p: &[f64]) -> DVector<f64> {
    let xi = 1.0 / alpha;
    let dxi = -1.0 / (alpha * alpha);
    let l = p.len() - 1;
    let mu_l = mu_raw(p[l - 1], p[l], xi);
    let dmu_l = mu_raw_dxi(p[l - 1], p[l], xi);
    DVector::from_fn(l - 1, |k, _| {
        let mu_k = mu_raw(p[k], p[k + 1], xi);
        let dmu_k = mu_raw_dxi(p[k], p[k + 1], xi);
        (dmu_k * mu_l - mu_k * dmu_l) / (mu_l * mu_l) * dxi
    })
}

/// Observed ratios of group incomes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    /// `s_k = (S_k - S_{k-1}) / (S_{L+1} - S_L)` for `k = 2..=L`. Position
    /// `j` (0-based) holds group `j + 2` and pairs with `r[j]`.
    pub s: DVector<f64>,
    pub l: usize,
}

/// Income of groups `2..=L` relative to group `L + 1`. The top group is
/// never used.
pub fn empirical_ratios(cv: &CumulativeView, l: usize) -> Result<EmpiricalMoments> {
    if l < 2 {
        return Err(Error::InsufficientGroups { needed: 3, found: l + 1 });
    }
    if cv.len() < l + 1 {
        return Err(Error::InsufficientGroups { needed: l + 1, found: cv.len() });
    }
    let denominator = cv.group_total(l + 1);
    if denominator == 0 {
        return Err(Error::ZeroDenominator("group income ratios"));
    }
    let mut s = DVector::zeros(l - 1);
    for k in 2..=l {
        let v = cv.group_total(k) as f64 / denominator as f64;
        if !(v > 0.0) {
            return Err(domain(format!("group {k} income ratio {v} is not positive")));
        }
        s[k - 2] = v;
    }
    Ok(EmpiricalMoments { s, l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabulation::{Concept, IncomeGroup, Tabulation};
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn mu_examples() {
        assert_relative_eq!(mu_segment(0.01, 0.04, 0.5).unwrap(), 0.2, max_relative = 1e-14);
        assert_eq!(mu_segment(0.3, 0.3, 0.2).unwrap(), 0.0);
        let expected = (pow(0.01, 2.0 / 3.0) - 0.01) * 1.5;
        assert_relative_eq!(mu_segment(0.001, 0.01, 1.0 / 3.0).unwrap(), expected, max_relative = 1e-14);
        assert!((expected - 0.054_623_8).abs() < 1e-7);
        assert!(mu_segment(0.01, 0.02, 1.0).is_err());
        assert!(mu_segment(0.01, 0.02, 0.0).is_err());
    }

    #[test]
    fn sigma2_examples() {
        // log 4 + 2(sqrt(1/4) - 1) - (0.2 - 0.1)^2 through the log-limit branch
        let expected = ln(4.0) - 1.0 - 0.01;
        assert_relative_eq!(sigma2_segment(0.01, 0.04, 0.5).unwrap(), expected, max_relative = 1e-13);
        assert!((expected - 0.376_294).abs() < 1e-6);
        assert_eq!(sigma2_segment(0.2, 0.2, 0.4).unwrap(), 0.0);
        assert!((sigma2_segment(0.25, 1.0, 0.25).unwrap() - 0.022_603_0).abs() < 5e-8);
    }

    #[test]
    fn sigma2_continuous_through_half() {
        let at = sigma2_segment(0.01, 0.04, 0.5).unwrap();
        for eps in [1e-6, 1e-9, 1e-12] {
            assert!((sigma2_segment(0.01, 0.04, 0.5 + eps).unwrap() - at).abs() < 1e-5);
            assert!((sigma2_segment(0.01, 0.04, 0.5 - eps).unwrap() - at).abs() < 1e-5);
        }
    }

    #[test]
    fn sigma_cross_examples() {
        let c = sigma_cross(0.01, 0.04, 0.04, 0.09, 0.5).unwrap();
        assert_relative_eq!(c, 0.156_666_666_666_666_7, max_relative = 1e-12);
        assert_eq!(sigma_cross(0.01, 0.01, 0.04, 0.09, 0.5).unwrap(), 0.0);
        assert!(sigma_cross(0.01, 0.05, 0.04, 0.09, 0.5).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn geometric_grid_ratios() {
        let ms = build_moment_system(2.0, &[0.001, 0.002, 0.004, 0.008, 0.016]).unwrap();
        let expected = [0.353_553, 0.5, 0.707_107];
        for (r, e) in ms.r.iter().zip(expected) {
            assert!((r - e).abs() < 1e-6);
        }
        assert_eq!(ms.h.shape(), (3, 4));
        assert_eq!(ms.omega.shape(), (3, 3));
    }

    #[test]
    fn h_annihilates_mu() {
        for alpha in [1.3, 2.0, 4.5] {
            let ms = build_moment_system(alpha, &[0.0005, 0.0011, 0.003, 0.0042, 0.01]).unwrap();
            let hm = &ms.h * &ms.mu;
            assert!(hm.amax() < 1e-12);
        }
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(build_moment_system(2.0, &[0.01, 0.02]).is_err());
        assert!(build_moment_system(1.0, &[0.01, 0.02, 0.03]).is_err());
        assert!(build_moment_system(2.0, &[0.01, 0.03, 0.02]).is_err());
    }

    #[test]
    fn analytic_derivative_matches_differences() {
        let p = [0.0003, 0.0007, 0.002, 0.005, 0.01];
        for alpha in [1.2, 2.0, 3.3] {
            let d = ratios_derivative_raw(alpha, &p);
            let h = 1e-6;
            let fd = (ratios_raw(alpha + h, &p) - ratios_raw(alpha - h, &p)) / (2.0 * h);
            for (a, b) in d.iter().zip(fd.iter()) {
                assert_relative_eq!(*a, *b, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn empirical_ratio_cases() {
        let equal = Tabulation::new(
            0,
            Concept::Other,
            (1..=5).map(|k| IncomeGroup::new(Some(100.0 / k as f64), 10, 70)).collect(),
        )
        .unwrap();
        let em = empirical_ratios(&equal.cumulate(true), 4).unwrap();
        assert_eq!(em.s.as_slice(), &[1.0, 1.0, 1.0]);
        let em = empirical_ratios(&equal.cumulate(true), 2).unwrap();
        assert_eq!(em.s.len(), 1);
        assert!(empirical_ratios(&equal.cumulate(true), 5).is_err());

        let zero = Tabulation::new(
            0,
            Concept::Other,
            vec![
                IncomeGroup::new(None, 1, 5),
                IncomeGroup::new(None, 1, 5),
                IncomeGroup::new(None, 1, 5),
                IncomeGroup::new(None, 1, 0),
            ],
        )
        .unwrap();
        assert_eq!(
            empirical_ratios(&zero.cumulate(false), 3).unwrap_err(),
            Error::ZeroDenominator("group income ratios")
        );
    }
}
