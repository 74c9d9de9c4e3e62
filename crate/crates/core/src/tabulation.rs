//! Tabulated income summaries.
//!
//! A [`Tabulation`] is one year of one income concept: income groups ordered
//! from the richest down, each with a return count and an income total. The
//! residual row below the lowest published threshold (the deficit row in
//! AGI tables) is kept separately as the bottom row; it takes part in the
//! conservation checks but never in estimation.
//!
//! Totals are stored as `i64` in the published unit (thousands of dollars
//! for SOI tables) so that merges and differences conserve mass exactly.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Income concept of a tabulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Concept {
    Agi,
    Wages,
    Capital,
    Other,
}

impl Concept {
    pub const ALL: [Concept; 4] = [Concept::Agi, Concept::Wages, Concept::Capital, Concept::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Concept::Agi => "agi",
            Concept::Wages => "wages",
            Concept::Capital => "capital",
            Concept::Other => "other",
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Concept {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "agi" | "total" => Ok(Concept::Agi),
            "wages" | "labor" | "salaries" => Ok(Concept::Wages),
            "capital" => Ok(Concept::Capital),
            "other" => Ok(Concept::Other),
            other => Err(Error::InvalidConfig(alloc::format!("unknown concept `{other}`"))),
        }
    }
}

/// One row of a tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IncomeGroup {
    /// Lower income threshold of the group, in currency units.
    pub lower_threshold: Option<f64>,
    /// Number of returns in the group.
    pub count: u64,
    /// Total income of the group in the published unit.
    pub total: i64,
}

impl IncomeGroup {
    pub fn new(lower_threshold: Option<f64>, count: u64, total: i64) -> Self {
        IncomeGroup { lower_threshold, count, total }
    }
}

/// One year × income concept of grouped income data.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tabulation {
    pub year: i32,
    pub concept: Concept,
    /// Concept whose thresholds define the groups. Wages and capital income
    /// published by AGI bracket are ranked by AGI; their thresholds are not
    /// thresholds of their own distribution.
    pub ranked_by: Concept,
    groups: Vec<IncomeGroup>,
    bottom: Option<IncomeGroup>,
    pub grand_total_count: u64,
    pub grand_total_income: i64,
    /// Potential tax units, when known.
    pub population_n: Option<u64>,
}

impl Tabulation {
    /// Builds a tabulation from rows in any order.
    ///
    /// Rows with thresholds are sorted from the highest threshold down. A
    /// single row without a threshold among thresholded rows is the bottom
    /// row. When no row has a threshold the given order is taken as
    /// descending. Grand totals default to the column sums.
    pub fn new(year: i32, concept: Concept, rows: Vec<IncomeGroup>) -> Result<Self> {
        let (groups, bottom) = normalize_rows(rows)?;
        let mut t = Tabulation {
            year,
            concept,
            ranked_by: concept,
            groups,
            bottom,
            grand_total_count: 0,
            grand_total_income: 0,
            population_n: None,
        };
        let (count, income) = t.column_sums();
        t.grand_total_count = u64::try_from(count).map_err(|_| Error::Overflow("counts"))?;
        t.grand_total_income = i64::try_from(income).map_err(|_| Error::Overflow("totals"))?;
        Ok(t)
    }

    pub fn with_grand_totals(mut self, count: u64, income: i64) -> Self {
        self.grand_total_count = count;
        self.grand_total_income = income;
        self
    }

    pub fn with_population(mut self, n: Option<u64>) -> Self {
        self.population_n = n;
        self
    }

    pub fn with_ranked_by(mut self, concept: Concept) -> Self {
        self.ranked_by = concept;
        self
    }

    /// Income groups, richest first. Excludes the bottom row.
    pub fn groups(&self) -> &[IncomeGroup] {
        &self.groups
    }

    /// Residual row below the lowest threshold, if any.
    pub fn bottom(&self) -> Option<&IncomeGroup> {
        self.bottom.as_ref()
    }

    /// Number of income groups `K` (the bottom row is not counted).
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    /// All rows in canonical order: groups descending, then the bottom row.
    pub fn rows(&self) -> impl Iterator<Item = &IncomeGroup> {
        self.groups.iter().chain(self.bottom.iter())
    }

    pub fn thresholds(&self) -> Option<Vec<f64>> {
        self.groups.iter().map(|g| g.lower_threshold).collect()
    }

    /// True when every group has a threshold of this tabulation's own concept,
    /// which is what the threshold-based estimators need.
    pub fn has_own_thresholds(&self) -> bool {
        self.ranked_by == self.concept
            && !self.groups.is_empty()
            && self.groups.iter().all(|g| g.lower_threshold.is_some())
    }

    /// Exact column sums over all rows, bottom included.
    pub fn column_sums(&self) -> (i128, i128) {
        self.rows().fold((0i128, 0i128), |(c, s), g| (c + i128::from(g.count), s + i128::from(g.total)))
    }

    /// Compares column sums with the published grand totals.
    pub fn validate_totals(&self) -> ValidationReport {
        let (count_sum, income_sum) = self.column_sums();
        let count_delta = count_sum - i128::from(self.grand_total_count);
        let income_delta = income_sum - i128::from(self.grand_total_income);
        let mut failures = Vec::new();
        if count_delta.abs() > ROUNDING_TOLERANCE {
            failures.push(Column::Count);
        }
        if income_delta.abs() > ROUNDING_TOLERANCE {
            failures.push(Column::Total);
        }
        ValidationReport { count_delta, income_delta, failures }
    }

    /// Folds every zero-count group into the next nonzero group below it.
    ///
    /// A run of zero-count groups at the bottom of the list has no lower
    /// neighbour and is folded into the nearest nonzero group above instead.
    /// The merged group spans both brackets, so its lower threshold is the
    /// lower of the two. The bottom row is left alone.
    pub fn merge_zero_count_groups(&self) -> Result<Tabulation> {
        if self.groups.iter().all(|g| g.count == 0) {
            return Err(Error::AllGroupsEmpty);
        }
        let mut merged: Vec<IncomeGroup> = Vec::with_capacity(self.groups.len());
        let mut pending: Option<IncomeGroup> = None;
        for g in &self.groups {
            if g.count == 0 {
                pending = Some(match pending {
                    Some(p) => IncomeGroup::new(g.lower_threshold, 0, p.total + g.total),
                    None => *g,
                });
            } else if let Some(p) = pending.take() {
                merged.push(IncomeGroup::new(g.lower_threshold, g.count, g.total + p.total));
            } else {
                merged.push(*g);
            }
        }
        if let Some(p) = pending {
            // nonempty: at least one group has a nonzero count
            let last = merged.last_mut().expect("a nonzero group exists");
            last.total += p.total;
            last.lower_threshold = p.lower_threshold;
        }
        Ok(Tabulation { groups: merged, ..self.clone() })
    }

    /// Cumulative counts and totals from the top.
    ///
    /// With `drop_nonpositive`, accumulation stops before the first group
    /// whose total is not positive, and the bottom row is never included.
    /// Without it every group and the bottom row are accumulated.
    pub fn cumulate(&self, drop_nonpositive: bool) -> CumulativeView {
        let mut view = CumulativeView::default();
        let rows: alloc::boxed::Box<dyn Iterator<Item = &IncomeGroup>> = if drop_nonpositive {
            alloc::boxed::Box::new(self.groups.iter().take_while(|g| g.total > 0))
        } else {
            alloc::boxed::Box::new(self.rows())
        };
        let (mut n, mut s) = (0u64, 0i64);
        for g in rows {
            n += g.count;
            s += g.total;
            view.cum_counts.push(n);
            view.cum_totals.push(s);
            view.thresholds.push(g.lower_threshold);
        }
        view
    }
}

/// Columns with a rounding tolerance of this many units in the last
/// published digit pass [`Tabulation::validate_totals`].
pub const ROUNDING_TOLERANCE: i128 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Count,
    Total,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::Count => "count",
            Column::Total => "total",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Sum of group counts minus the grand total count.
    pub count_delta: i128,
    /// Sum of group totals minus the grand total income.
    pub income_delta: i128,
    pub failures: Vec<Column>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "totals ok (count delta {}, total delta {})", self.count_delta, self.income_delta)
        } else {
            let cols: Vec<String> = self.failures.iter().map(|c| c.to_string()).collect();
            write!(
                f,
                "totals mismatch in {} (count delta {}, total delta {})",
                cols.join(", "),
                self.count_delta,
                self.income_delta
            )
        }
    }
}

/// Cumulative view of a tabulation: `n_k` returns and `S_k` income in the
/// top `k` groups. Vectors are 0-based, so `cum_counts[0]` is `n_1`.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CumulativeView {
    pub cum_counts: Vec<u64>,
    pub cum_totals: Vec<i64>,
    pub thresholds: Vec<Option<f64>>,
}

impl CumulativeView {
    pub fn len(&self) -> usize {
        self.cum_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum_counts.is_empty()
    }

    /// Income of group `k` (1-based), `S_k - S_{k-1}`.
    pub fn group_total(&self, k: usize) -> i64 {
        let prev = if k > 1 { self.cum_totals[k - 2] } else { 0 };
        self.cum_totals[k - 1] - prev
    }

    /// Returns in group `k` (1-based).
    pub fn group_count(&self, k: usize) -> u64 {
        let prev = if k > 1 { self.cum_counts[k - 2] } else { 0 };
        self.cum_counts[k - 1] - prev
    }

    /// Top fractiles `n_k / n` for `k = 1..=m`.
    pub fn fractiles(&self, n: f64, m: usize) -> Vec<f64> {
        self.cum_counts[..m].iter().map(|&c| c as f64 / n).collect()
    }
}

/// Re-buckets two tabulations onto the thresholds they have in common.
///
/// Groups falling below the lowest common threshold move into the bottom
/// row. Counts and totals are conserved exactly.
pub fn merge_to_common_thresholds(a: &Tabulation, b: &Tabulation) -> Result<(Tabulation, Tabulation)> {
    let ta = a.thresholds().filter(|t| !t.is_empty());
    let tb = b.thresholds().filter(|t| !t.is_empty());
    let (Some(ta), Some(tb)) = (ta, tb) else {
        return Err(Error::Mismatch("both tabulations need thresholds".into()));
    };
    let common: Vec<f64> = ta.iter().copied().filter(|t| tb.contains(t)).collect();
    if common.len() < 2 {
        return Err(Error::EmptyIntersection { groups: common.len() });
    }
    Ok((rebucket(a, &common), rebucket(b, &common)))
}

fn rebucket(t: &Tabulation, common: &[f64]) -> Tabulation {
    let mut groups: Vec<IncomeGroup> = common.iter().map(|&c| IncomeGroup::new(Some(c), 0, 0)).collect();
    let mut bottom = t.bottom;
    for g in &t.groups {
        let lower = g.lower_threshold.expect("checked by caller");
        // common is descending; the first common threshold at or below `lower`
        match common.iter().position(|&c| c <= lower) {
            Some(j) => {
                groups[j].count += g.count;
                groups[j].total += g.total;
            }
            None => {
                let b = bottom.get_or_insert(IncomeGroup::new(None, 0, 0));
                b.count += g.count;
                b.total += g.total;
            }
        }
    }
    Tabulation { groups, bottom, ..t.clone() }
}

/// Capital income defined as AGI minus salaries and wages, with AGI counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CapitalIncome {
    pub tabulation: Tabulation,
    /// 1-based indices of groups whose capital total is negative.
    pub negative_groups: Vec<usize>,
}

pub fn derive_capital(agi: &Tabulation, wages: &Tabulation) -> Result<CapitalIncome> {
    if agi.year != wages.year {
        return Err(Error::Mismatch(alloc::format!("years {} and {}", agi.year, wages.year)));
    }
    if agi.k() != wages.k() {
        return Err(Error::Mismatch(alloc::format!("{} AGI groups against {} wage groups", agi.k(), wages.k())));
    }
    let mut groups = Vec::with_capacity(agi.k());
    let mut negative_groups = Vec::new();
    for (k, (a, w)) in agi.groups.iter().zip(&wages.groups).enumerate() {
        if let (Some(ta), Some(tw)) = (a.lower_threshold, w.lower_threshold) {
            if ta != tw {
                return Err(Error::Mismatch(alloc::format!("group {} thresholds {ta} and {tw}", k + 1)));
            }
        }
        let total = a.total - w.total;
        if total < 0 {
            negative_groups.push(k + 1);
        }
        groups.push(IncomeGroup::new(a.lower_threshold, a.count, total));
    }
    let bottom = agi.bottom.map(|b| {
        let w = wages.bottom.map_or(0, |w| w.total);
        IncomeGroup::new(None, b.count, b.total - w)
    });
    let tabulation = Tabulation {
        year: agi.year,
        concept: Concept::Capital,
        ranked_by: agi.ranked_by,
        groups,
        bottom,
        grand_total_count: agi.grand_total_count,
        grand_total_income: agi.grand_total_income - wages.grand_total_income,
        population_n: agi.population_n,
    };
    Ok(CapitalIncome { tabulation, negative_groups })
}

/// Replaces the counts of `t` with those of the tabulation that ranks it.
///
/// Income published by AGI bracket has its top fractiles defined by AGI
/// returns, not by the returns reporting that income.
pub fn with_ranking_counts(ranking: &Tabulation, t: &Tabulation) -> Result<Tabulation> {
    if ranking.year != t.year || ranking.k() != t.k() {
        return Err(Error::Mismatch(alloc::format!(
            "{} groups in {} against {} groups in {}",
            ranking.k(),
            ranking.year,
            t.k(),
            t.year
        )));
    }
    let mut groups = Vec::with_capacity(t.k());
    for (k, (r, g)) in ranking.groups.iter().zip(&t.groups).enumerate() {
        if r.lower_threshold != g.lower_threshold {
            return Err(Error::Mismatch(alloc::format!("group {} thresholds differ", k + 1)));
        }
        groups.push(IncomeGroup { count: r.count, ..*g });
    }
    let bottom = t.bottom.map(|b| IncomeGroup { count: ranking.bottom.map_or(0, |r| r.count), ..b });
    Ok(Tabulation {
        ranked_by: ranking.concept,
        groups,
        bottom,
        grand_total_count: ranking.grand_total_count,
        ..t.clone()
    })
}

fn normalize_rows(rows: Vec<IncomeGroup>) -> Result<(Vec<IncomeGroup>, Option<IncomeGroup>)> {
    for g in &rows {
        if let Some(t) = g.lower_threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(crate::error::domain(alloc::format!("threshold {t} is not a positive number")));
            }
        }
    }
    let (mut with, mut without): (Vec<IncomeGroup>, Vec<IncomeGroup>) =
        rows.into_iter().partition(|g| g.lower_threshold.is_some());
    if with.is_empty() {
        return Ok((without, None));
    }
    if without.len() > 1 {
        return Err(Error::Mismatch("more than one row without a threshold".into()));
    }
    with.sort_by(|x, y| {
        let (x, y) = (x.lower_threshold.unwrap_or(0.0), y.lower_threshold.unwrap_or(0.0));
        y.total_cmp(&x)
    });
    for (i, w) in with.windows(2).enumerate() {
        if w[1].lower_threshold >= w[0].lower_threshold {
            return Err(Error::NonMonotoneThresholds { index: i + 2 });
        }
    }
    Ok((with, without.pop()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn g(t: f64, count: u64, total: i64) -> IncomeGroup {
        IncomeGroup::new(Some(t), count, total)
    }

    #[test]
    fn rows_are_sorted_and_bottom_split_off() {
        let rows = vec![g(1.0, 10, 5), IncomeGroup::new(None, 3, -2), g(10.0, 1, 50), g(5.0, 4, 20)];
        let t = Tabulation::new(2000, Concept::Agi, rows).unwrap();
        let th: Vec<f64> = t.thresholds().unwrap();
        assert_eq!(th, vec![10.0, 5.0, 1.0]);
        assert_eq!(t.bottom().unwrap().total, -2);
        assert_eq!(t.grand_total_count, 18);
        assert_eq!(t.grand_total_income, 73);
    }

    #[test]
    fn duplicate_thresholds_rejected() {
        let err = Tabulation::new(2000, Concept::Agi, vec![g(5.0, 1, 1), g(5.0, 2, 2)]).unwrap_err();
        assert_eq!(err, Error::NonMonotoneThresholds { index: 2 });
    }

    #[test]
    fn two_unthresholded_rows_among_thresholded_rejected() {
        let rows = vec![g(5.0, 1, 1), IncomeGroup::new(None, 1, 1), IncomeGroup::new(None, 1, 1)];
        assert!(Tabulation::new(2000, Concept::Agi, rows).is_err());
    }

    #[test]
    fn validate_exact_and_perturbed() {
        let t = Tabulation::new(2000, Concept::Agi, vec![g(5.0, 100, 1000), g(1.0, 200, 900)]).unwrap();
        assert!(t.validate_totals().passed());
        let within = t.clone().with_grand_totals(305, 1895);
        assert!(within.validate_totals().passed());
        let off = t.with_grand_totals(300 + 1000, 1900);
        let report = off.validate_totals();
        assert!(!report.passed());
        assert_eq!(report.failures, vec![Column::Count]);
        assert_eq!(report.count_delta, -1000);
    }

    #[test]
    fn zero_group_absorbed_downward() {
        let t = Tabulation::new(0, Concept::Agi, vec![g(10.0, 5, 50), g(5.0, 0, 7), g(1.0, 3, 9)]).unwrap();
        let m = t.merge_zero_count_groups().unwrap();
        let counts: Vec<u64> = m.groups().iter().map(|g| g.count).collect();
        assert_eq!(counts, vec![5, 3]);
        assert_eq!(m.groups()[1], g(1.0, 3, 16));
    }

    #[test]
    fn no_zero_groups_is_identity() {
        let t = Tabulation::new(0, Concept::Agi, vec![g(10.0, 5, 50), g(1.0, 3, 9)]).unwrap();
        assert_eq!(t.merge_zero_count_groups().unwrap(), t);
    }

    #[test]
    fn trailing_zero_groups_merge_upward() {
        // hand-merged: the two empty brackets [1,2) and [2,5) join [5,10)
        let t =
            Tabulation::new(0, Concept::Agi, vec![g(10.0, 5, 50), g(5.0, 4, 30), g(2.0, 0, 3), g(1.0, 0, -1)]).unwrap();
        let m = t.merge_zero_count_groups().unwrap();
        assert_eq!(m.groups(), &[g(10.0, 5, 50), g(1.0, 4, 32)]);
        assert_eq!(m.column_sums(), t.column_sums());
    }

    #[test]
    fn all_zero_groups_is_an_error() {
        let t = Tabulation::new(0, Concept::Agi, vec![g(10.0, 0, 0), g(1.0, 0, 0)]).unwrap();
        assert_eq!(t.merge_zero_count_groups().unwrap_err(), Error::AllGroupsEmpty);
    }

    #[test]
    fn common_thresholds() {
        let a = Tabulation::new(0, Concept::Agi, vec![g(10.0, 1, 100), g(5.0, 2, 60), g(1.0, 7, 30)]).unwrap();
        let b = Tabulation::new(0, Concept::Agi, vec![g(10.0, 2, 90), g(1.0, 8, 80)]).unwrap();
        let (ma, mb) = merge_to_common_thresholds(&a, &b).unwrap();
        assert_eq!(ma.groups(), &[g(10.0, 1, 100), g(1.0, 9, 90)]);
        assert_eq!(mb, b);
        let (ia, ib) = merge_to_common_thresholds(&a, &a).unwrap();
        assert_eq!((ia, ib), (a.clone(), a));
    }

    #[test]
    fn disjoint_interiors_collapse_and_fail() {
        let a = Tabulation::new(0, Concept::Agi, vec![g(7.0, 1, 10), g(1.0, 2, 3)]).unwrap();
        let b = Tabulation::new(0, Concept::Agi, vec![g(4.0, 1, 10), g(1.0, 2, 3)]).unwrap();
        assert_eq!(merge_to_common_thresholds(&a, &b).unwrap_err(), Error::EmptyIntersection { groups: 1 });
    }

    #[test]
    fn groups_below_common_range_go_to_bottom() {
        let a = Tabulation::new(0, Concept::Agi, vec![g(10.0, 1, 10), g(5.0, 1, 5), g(0.5, 4, 2)]).unwrap();
        let b = Tabulation::new(0, Concept::Agi, vec![g(10.0, 1, 10), g(5.0, 2, 6)]).unwrap();
        let (ma, _) = merge_to_common_thresholds(&a, &b).unwrap();
        assert_eq!(ma.k(), 2);
        assert_eq!(ma.bottom().unwrap().count, 4);
        assert_eq!(ma.column_sums(), a.column_sums());
    }

    #[test]
    fn capital_with_zero_wages_is_agi() {
        let agi = Tabulation::new(2019, Concept::Agi, vec![g(10.0, 2, 100), g(1.0, 5, 40)]).unwrap();
        let wages = Tabulation::new(2019, Concept::Wages, vec![g(10.0, 1, 0), g(1.0, 4, 0)]).unwrap();
        let cap = derive_capital(&agi, &wages).unwrap();
        assert_eq!(cap.tabulation.groups(), agi.groups());
        assert_eq!(cap.tabulation.concept, Concept::Capital);
        assert!(cap.negative_groups.is_empty());
    }

    #[test]
    fn capital_flags_negative_groups() {
        let agi = Tabulation::new(2019, Concept::Agi, vec![g(10.0, 2, 100), g(1.0, 5, 40)]).unwrap();
        let wages = Tabulation::new(2019, Concept::Wages, vec![g(10.0, 1, 30), g(1.0, 4, 45)]).unwrap();
        let cap = derive_capital(&agi, &wages).unwrap();
        assert_eq!(cap.negative_groups, vec![2]);
        assert_eq!(cap.tabulation.groups()[1].total, -5);
    }

    #[test]
    fn capital_rejects_mismatched_structure() {
        let agi = Tabulation::new(2019, Concept::Agi, vec![g(10.0, 2, 100), g(1.0, 5, 40)]).unwrap();
        let wages = Tabulation::new(2019, Concept::Wages, vec![g(1.0, 4, 45)]).unwrap();
        assert!(matches!(derive_capital(&agi, &wages), Err(Error::Mismatch(_))));
        let other_year = Tabulation::new(2018, Concept::Wages, vec![g(10.0, 1, 1), g(1.0, 1, 1)]).unwrap();
        assert!(matches!(derive_capital(&agi, &other_year), Err(Error::Mismatch(_))));
    }

    #[test]
    fn ranking_counts_replace_own_counts() {
        let agi = Tabulation::new(2019, Concept::Agi, vec![g(10.0, 2, 100), g(1.0, 5, 40)]).unwrap();
        let wages = Tabulation::new(2019, Concept::Wages, vec![g(10.0, 1, 30), g(1.0, 4, 35)])
            .unwrap()
            .with_ranked_by(Concept::Agi);
        let ranked = with_ranking_counts(&agi, &wages).unwrap();
        assert_eq!(ranked.groups(), &[g(10.0, 2, 30), g(1.0, 5, 35)]);
        assert_eq!(ranked.concept, Concept::Wages);
        assert_eq!(ranked.grand_total_count, 7);
        let shifted = Tabulation::new(2019, Concept::Wages, vec![g(9.0, 1, 30), g(1.0, 4, 35)]).unwrap();
        assert!(with_ranking_counts(&agi, &shifted).is_err());
    }

    #[test]
    fn cumulate_single_group() {
        let t = Tabulation::new(0, Concept::Agi, vec![g(1.0, 42, 420)]).unwrap();
        let cv = t.cumulate(true);
        assert_eq!(cv.cum_counts, vec![42]);
        assert_eq!(cv.cum_totals, vec![420]);
    }

    #[test]
    fn cumulate_drops_bottom_deficit() {
        let rows = vec![g(10.0, 1, 100), g(1.0, 5, 40), IncomeGroup::new(None, 3, -20)];
        let t = Tabulation::new(0, Concept::Agi, rows).unwrap();
        assert_eq!(t.cumulate(true).cum_totals, vec![100, 140]);
        assert_eq!(t.cumulate(false).cum_totals, vec![100, 140, 120]);
        assert_eq!(t.cumulate(false).cum_counts, vec![1, 6, 9]);
    }
}
