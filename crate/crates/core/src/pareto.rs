//! Closed-form Pareto tail math and log-log top share curves.
//!
//! Under a Pareto upper tail with exponent `alpha > 1` the income share of
//! the top `p` fractile is proportional to `p^(1 - 1/alpha)`, so top shares
//! plotted against fractiles on log-log axes form a straight line.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math::{ln, pow};
use crate::spline::NaturalCubicSpline;
use crate::tabulation::Tabulation;

/// Pareto upper tail beyond `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParetoTail {
    alpha: f64,
    cutoff: f64,
}

impl ParetoTail {
    pub fn new(alpha: f64, cutoff: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("alpha must be positive"));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(domain("cutoff must be positive"));
        }
        Ok(ParetoTail { alpha, cutoff })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `P(Y > y | Y > c) = (y/c)^(-alpha)` for `y >= c`.
    pub fn tail_probability(&self, y: f64) -> Result<f64> {
        if !(y >= self.cutoff) {
            return Err(domain("tail probability below the cutoff"));
        }
        Ok(pow(y / self.cutoff, -self.alpha))
    }

    /// Income level exceeded with conditional probability `prob`.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(domain("tail probability must lie in (0, 1]"));
        }
        Ok(self.cutoff * pow(prob, -1.0 / self.alpha))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain("alpha must exceed 1 for the mean to exist"))
    }
}

/// Income share of the top `p` fractile, `p^(1 - 1/alpha)`.
pub fn top_share(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain("fractile must lie in (0, 1]"));
    }
    Ok(pow(p, 1.0 - 1.0 / alpha))
}

/// Share of the top `p` implied by the share of the top `q >= p`:
/// `S(p) = (p/q)^(1 - 1/alpha) S(q)`.
pub fn implied_share(share_q: f64, q: f64, p: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(p > 0.0 && q <= 1.0) {
        return Err(domain("fractiles must lie in (0, 1]"));
    }
    if p > q {
        return Err(domain("implied share needs p <= q"));
    }
    if !(share_q > 0.0 && share_q <= 1.0) {
        return Err(domain("share must lie in (0, 1]"));
    }
    Ok(pow(p / q, 1.0 - 1.0 / alpha) * share_q)
}

/// Top share curve: (fractile, share) points with both coordinates
/// strictly increasing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShareCurve {
    points: Vec<(f64, f64)>,
}

impl ShareCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        for &(p, s) in &points {
            if !(p > 0.0 && p <= 1.0) {
                return Err(domain("curve fractiles must lie in (0, 1]"));
            }
            if !(s > 0.0 && s <= 1.0) {
                return Err(domain("curve shares must lie in (0, 1]"));
            }
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
            return Err(domain("curve points must strictly increase in fractile and share"));
        }
        Ok(ShareCurve { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Log-log natural cubic spline through the points.
    pub fn log_spline(&self) -> Result<NaturalCubicSpline> {
        let (x, y): (Vec<f64>, Vec<f64>) = self.points.iter().map(|&(p, s)| (ln(p), ln(s))).unzip();
        NaturalCubicSpline::new(&x, &y)
    }
}

/// Top share at fractile `p`, interpolating `log(share)` over
/// `log(fractile)` with a natural cubic spline.
pub fn interpolate_share(curve: &ShareCurve, p: f64) -> Result<f64> {
    let spline = curve.log_spline()?;
    let (lo, hi) = (curve.points[0].0, curve.points[curve.len() - 1].0);
    if !(p >= lo && p <= hi) {
        return Err(Error::Extrapolation { p, min: lo, max: hi });
    }
    if let Some(&(_, s)) = curve.points.iter().find(|&&(q, _)| q == p) {
        return Ok(s);
    }
    Ok(crate::math::exp(spline.eval(ln(p))?))
}

/// Share curve at every group boundary of a tabulation.
///
/// The denominator is the income of all groups with positive totals; the
/// bottom (deficit) row is left out of both numerator and denominator.
pub fn share_curve_from_tabulation(t: &Tabulation, n: f64) -> Result<ShareCurve> {
    let cv = t.cumulate(true);
    let Some(&top_n) = cv.cum_counts.last() else {
        return Err(Error::InsufficientGroups { needed: 1, found: 0 });
    };
    if !(n >= top_n as f64) {
        return Err(Error::PopulationTooSmall { n, required: top_n });
    }
    let denominator: i128 = t.groups().iter().filter(|g| g.total > 0).map(|g| i128::from(g.total)).sum();
    let denominator = denominator as f64;
    let points =
        cv.cum_counts.iter().zip(&cv.cum_totals).map(|(&c, &s)| (c as f64 / n, s as f64 / denominator)).collect();
    ShareCurve::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabulation::{Concept, IncomeGroup};
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn tail_probability_examples() {
        assert_eq!(ParetoTail::new(2.0, 1.0).unwrap().tail_probability(2.0).unwrap(), 0.25);
        assert_eq!(ParetoTail::new(3.7, 5.0).unwrap().tail_probability(5.0).unwrap(), 1.0);
        let t = ParetoTail::new(1.5, 1.0).unwrap();
        assert_relative_eq!(t.tail_probability(10.0).unwrap(), 0.031_622_776_601_683_79, max_relative = 1e-15);
        assert!(t.tail_probability(0.5).is_err());
    }

    #[test]
    fn top_share_examples() {
        assert_relative_eq!(top_share(2.0, 0.01).unwrap(), 0.1, max_relative = 1e-15);
        assert_eq!(top_share(1.7, 1.0).unwrap(), 1.0);
        assert_relative_eq!(top_share(1.5, 0.001).unwrap(), 0.1, max_relative = 1e-14);
        assert!(top_share(1.0, 0.5).is_err());
        assert!(top_share(0.8, 0.5).is_err());
    }

    #[test]
    fn implied_share_examples() {
        // top 1% share of 13.0% in 1985 carried down to the top 0.1% at alpha 1.5
        let s = implied_share(0.130, 0.01, 0.001, 1.5).unwrap();
        assert_relative_eq!(s, 0.130 * pow(10.0, -1.0 / 3.0), max_relative = 1e-14);
        assert!((s - 0.0603).abs() < 5e-5);
        assert_eq!(implied_share(0.2, 0.05, 0.05, 2.5).unwrap(), 0.2);
        assert_relative_eq!(implied_share(0.1, 0.01, 0.0001, 2.0).unwrap(), 0.01, max_relative = 1e-14);
        assert!(implied_share(0.1, 0.01, 0.02, 2.0).is_err());
    }

    fn power_curve(exponent: f64, fractiles: &[f64]) -> ShareCurve {
        ShareCurve::new(fractiles.iter().map(|&p| (p, pow(p, exponent))).collect()).unwrap()
    }

    #[test]
    fn interpolation_exact_at_knots() {
        let curve = ShareCurve::new(vec![(0.001, 0.05), (0.004, 0.09), (0.01, 0.13), (0.05, 0.3)]).unwrap();
        for &(p, s) in curve.points() {
            assert_eq!(interpolate_share(&curve, p).unwrap(), s);
        }
    }

    #[test]
    fn interpolation_recovers_power_law() {
        let curve = power_curve(0.5, &[0.0005, 0.001, 0.003, 0.01, 0.04, 0.1]);
        for p in [0.0007, 0.002, 0.0055, 0.02, 0.07] {
            let s = interpolate_share(&curve, p).unwrap();
            assert_relative_eq!(s, pow(p, 0.5), max_relative = 1e-4);
        }
    }

    #[test]
    fn interpolation_rejects_two_points_and_extrapolation() {
        let two = power_curve(0.5, &[0.001, 0.01]);
        assert!(interpolate_share(&two, 0.005).is_err());
        let three = power_curve(0.5, &[0.001, 0.005, 0.01]);
        assert!(matches!(interpolate_share(&three, 0.02), Err(Error::Extrapolation { .. })));
        assert!(matches!(interpolate_share(&three, 0.0009), Err(Error::Extrapolation { .. })));
    }

    #[test]
    fn share_curve_single_group() {
        let t = Tabulation::new(0, Concept::Agi, vec![IncomeGroup::new(Some(1.0), 100, 5000)]).unwrap();
        let curve = share_curve_from_tabulation(&t, 100.0).unwrap();
        assert_eq!(curve.points(), &[(1.0, 1.0)]);
        assert!(share_curve_from_tabulation(&t, 99.0).is_err());
    }

    #[test]
    fn log_top_share_is_linear() {
        for alpha in [1.2, 1.5, 2.0, 3.5] {
            let slope = 1.0 - 1.0 / alpha;
            for p in [1e-5, 1e-4, 3e-3, 0.02, 0.4] {
                let s = top_share(alpha, p).unwrap();
                assert_relative_eq!(ln(s), slope * ln(p), max_relative = 1e-13);
            }
        }
    }
}
