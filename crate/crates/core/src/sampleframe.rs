//! Number of potential tax units `n`.
//!
//! After the cutover year almost every adult files, and non-filers would
//! file singly, so `n = A - J` (adults minus joint returns). Before it, joint
//! returns are imputed from married couples through a log-log regression of
//! `J/A` on `M/A` fitted on the later years. `A - M` is the lower-bound
//! alternative that assumes every married couple files jointly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math::{exp, ln};

pub const DEFAULT_CUTOVER: i32 = 1950;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DemographicField {
    /// Adult population `A`.
    Adults,
    /// Joint returns `J`.
    JointReturns,
    /// Married couples `M`.
    MarriedCouples,
    /// Total returns `T`.
    TotalReturns,
}

impl DemographicField {
    pub fn as_str(self) -> &'static str {
        match self {
            DemographicField::Adults => "A",
            DemographicField::JointReturns => "J",
            DemographicField::MarriedCouples => "M",
            DemographicField::TotalReturns => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DemographicRecord {
    pub year: i32,
    pub adults: Option<f64>,
    pub joint_returns: Option<f64>,
    pub married_couples: Option<f64>,
    pub total_returns: Option<f64>,
}

impl DemographicRecord {
    pub fn get(&self, field: DemographicField) -> Option<f64> {
        match field {
            DemographicField::Adults => self.adults,
            DemographicField::JointReturns => self.joint_returns,
            DemographicField::MarriedCouples => self.married_couples,
            DemographicField::TotalReturns => self.total_returns,
        }
    }
}

/// Yearly demographic records, sorted by year with no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DemographicSeries {
    records: Vec<DemographicRecord>,
}

impl DemographicSeries {
    pub fn new(mut records: Vec<DemographicRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.year);
        if let Some(w) = records.windows(2).find(|w| w[0].year == w[1].year) {
            return Err(domain(format!("year {} appears twice", w[0].year)));
        }
        for r in &records {
            for v in [r.adults, r.joint_returns, r.married_couples, r.total_returns].into_iter().flatten() {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(domain(format!("non-positive demographic value in {}", r.year)));
                }
            }
            if let (Some(j), Some(t)) = (r.joint_returns, r.total_returns) {
                if j > t {
                    return Err(domain(format!("joint returns exceed total returns in {}", r.year)));
                }
            }
        }
        Ok(DemographicSeries { records })
    }

    pub fn records(&self) -> &[DemographicRecord] {
        &self.records
    }

    pub fn get(&self, year: i32) -> Option<&DemographicRecord> {
        self.records.binary_search_by_key(&year, |r| r.year).ok().map(|i| &self.records[i])
    }

    pub fn year_range(&self) -> Option<(i32, i32)> {
        Some((self.records.first()?.year, self.records.last()?.year))
    }

    /// Recorded value, or the log-linear interpolation between the nearest
    /// recorded years.
    pub fn value(&self, field: DemographicField, year: i32) -> Result<f64> {
        interpolate_intercensal(self, field, year)
    }
}

/// Geometric interpolation between the nearest years that record `field`.
pub fn interpolate_intercensal(series: &DemographicSeries, field: DemographicField, year: i32) -> Result<f64> {
    let missing = || Error::MissingField { field: field.as_str(), year };
    if let Some(v) = series.get(year).and_then(|r| r.get(field)) {
        return Ok(v);
    }
    let before = series.records.iter().rev().find(|r| r.year < year && r.get(field).is_some());
    let after = series.records.iter().find(|r| r.year > year && r.get(field).is_some());
    let (Some(b), Some(a)) = (before, after) else {
        return Err(missing());
    };
    let (vb, va) = (b.get(field).ok_or_else(missing)?, a.get(field).ok_or_else(missing)?);
    let w = f64::from(year - b.year) / f64::from(a.year - b.year);
    Ok(exp((1.0 - w) * ln(vb) + w * ln(va)))
}

/// OLS fit of `log(J/A) = intercept + slope * log(M/A)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointShareFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub observations: usize,
    /// Years in the regression sample.
    pub years: Vec<i32>,
    pub warnings: Vec<String>,
}

impl JointShareFit {
    /// Fitted `J/A` at a given married share `M/A`.
    pub fn joint_share(&self, married_share: f64) -> f64 {
        exp(self.intercept + self.slope * ln(married_share))
    }

    /// Residuals `log(J/A) - fitted` over the regression sample.
    pub fn residuals(&self, series: &DemographicSeries) -> Vec<f64> {
        self.years
            .iter()
            .filter_map(|&y| series.get(y))
            .filter_map(|r| Some((r.adults?, r.joint_returns?, r.married_couples?)))
            .map(|(a, j, m)| ln(j / a) - (self.intercept + self.slope * ln(m / a)))
            .collect()
    }
}

pub(crate) struct SimpleOls {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub(crate) fn simple_ols(x: &[f64], y: &[f64]) -> Result<SimpleOls> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateRegressor);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0_f64, 1.0) } else { 1.0 };
    Ok(SimpleOls { intercept, slope, r_squared })
}

/// Regresses `log(J/A)` on `log(M/A)` over every year from `from_year` on
/// where all three are recorded.
pub fn fit_joint_share_regression(series: &DemographicSeries, from_year: i32) -> Result<JointShareFit> {
    let mut years = Vec::new();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for r in series.records.iter().filter(|r| r.year >= from_year) {
        if let (Some(a), Some(j), Some(m)) = (r.adults, r.joint_returns, r.married_couples) {
            years.push(r.year);
            x.push(ln(m / a));
            y.push(ln(j / a));
        }
    }
    if years.len() < 2 {
        return Err(Error::InsufficientGroups { needed: 2, found: years.len() });
    }
    let fit = simple_ols(&x, &y)?;
    let mut warnings = Vec::new();
    if years.len() < 3 {
        warnings.push(format!("regression on {} observations has no residual degrees of freedom", years.len()));
    }
    Ok(JointShareFit {
        intercept: fit.intercept,
        slope: fit.slope,
        r_squared: fit.r_squared,
        observations: years.len(),
        years,
        warnings,
    })
}

/// `A - J` from the cutover year on, `A - J_hat` before it.
pub fn potential_units(series: &DemographicSeries, year: i32, cutover: i32) -> Result<f64> {
    if year >= cutover {
        let a = series.value(DemographicField::Adults, year)?;
        let j = series.value(DemographicField::JointReturns, year)?;
        return Ok(a - j);
    }
    let fit = fit_joint_share_regression(series, cutover)?;
    potential_units_with_fit(series, year, cutover, &fit)
}

/// [`potential_units`] with a regression fitted once by the caller.
pub fn potential_units_with_fit(
    series: &DemographicSeries,
    year: i32,
    cutover: i32,
    fit: &JointShareFit,
) -> Result<f64> {
    let a = series.value(DemographicField::Adults, year)?;
    if year >= cutover {
        return Ok(a - series.value(DemographicField::JointReturns, year)?);
    }
    let m = series.value(DemographicField::MarriedCouples, year)?;
    Ok(a - a * fit.joint_share(m / a))
}

/// Lower bound `A - M`.
pub fn alt_units(series: &DemographicSeries, year: i32) -> Result<f64> {
    let a = series.value(DemographicField::Adults, year)?;
    let m = series.value(DemographicField::MarriedCouples, year)?;
    Ok(a - m)
}
