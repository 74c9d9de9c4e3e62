//! Seeded Pareto samples, their tabulation, and Monte Carlo calibration of
//! the estimators.
//!
//! Replication `r` of seed `s` draws from a ChaCha8 stream keyed by `(s, r)`,
//! so results do not depend on how replications are scheduled.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::estimators::{ml_grouped, tw_estimate_groups, EstimateResult, TwConfig};
use crate::math::{pow, round, sqrt};
use crate::tabulation::{Concept, IncomeGroup, Tabulation};

/// Integer units per cutoff `c` when totals are integerized.
pub const DEFAULT_RESOLUTION: f64 = 1000.0;

/// Largest failure share a study tolerates.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

const Z_95: f64 = 1.959_963_984_540_054;

/// How a sample is cut into groups.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Boundaries {
    /// Top fractiles `p_1 < ... < p_{L+1}`; group `k` holds ranks
    /// `n p_{k-1} + 1 ..= n p_k`.
    Fractiles(Vec<f64>),
    /// Income thresholds in any order.
    Thresholds(Vec<f64>),
}

impl Boundaries {
    /// `p_k = top * 2^(k - groups)` for `k = 1..=groups`.
    pub fn geometric_fractiles(top: f64, groups: usize) -> Self {
        Boundaries::Fractiles((1..=groups).map(|k| top * pow(2.0, k as f64 - groups as f64)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Boundaries::Fractiles(v) | Boundaries::Thresholds(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum McMethod {
    Tw(TwConfig),
    Ml,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub alpha_true: f64,
    pub cutoff_c: f64,
    pub n_draws: usize,
    pub boundaries: Boundaries,
    pub replications: usize,
    pub seed: u64,
    /// Integer units per `cutoff_c` used for group totals.
    pub resolution: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            alpha_true: 1.5,
            cutoff_c: 1.0,
            n_draws: 1_000_000,
            boundaries: Boundaries::geometric_fractiles(0.01, 6),
            replications: 200,
            seed: 42,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_true > 1.0 && self.alpha_true.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha_true = {} must exceed 1", self.alpha_true)));
        }
        if !(self.cutoff_c > 0.0 && self.cutoff_c.is_finite()) {
            return Err(Error::InvalidConfig("cutoff must be positive".into()));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidConfig("resolution must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("need at least one replication".into()));
        }
        if self.boundaries.is_empty() {
            return Err(Error::InvalidConfig("no group boundaries".into()));
        }
        if self.n_draws < 10 * self.boundaries.len() {
            return Err(Error::InvalidConfig(format!(
                "{} draws is too few for {} groups",
                self.n_draws,
                self.boundaries.len()
            )));
        }
        Ok(())
    }
}

/// `c (1 - u)^(-1/alpha)`.
pub fn pareto_quantile(u: f64, alpha: f64, c: f64) -> f64 {
    c * pow(1.0 - u, -1.0 / alpha)
}

/// Draws replication `replication` of the configured sample.
pub fn sample_pareto(cfg: &SimConfig, replication: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(replication as u64);
    (0..cfg.n_draws).map(|_| pareto_quantile(rng.random::<f64>(), cfg.alpha_true, cfg.cutoff_c)).collect()
}

fn integerize(y: f64, resolution: f64) -> Result<i64> {
    let v = round(y * resolution);
    if !(v.is_finite() && v < 9.0e18) {
        return Err(Error::Overflow("sample value"));
    }
    Ok(v as i64)
}

fn sum_units(values: &[f64], resolution: f64) -> Result<i64> {
    values
        .iter()
        .try_fold(0i64, |acc, &y| acc.checked_add(integerize(y, resolution)?).ok_or(Error::Overflow("group total")))
}

/// Tabulates a sample. Each value is integerized to `round(y * resolution)`
/// units before summing, so group totals add up exactly. Values below every
/// group form the bottom row.
pub fn tabulate_sample(sample: &[f64], boundaries: &Boundaries, resolution: f64) -> Result<Tabulation> {
    if sample.is_empty() {
        return Err(domain("empty sample"));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sample value"));
    }
    let (groups, rest) = match boundaries {
        Boundaries::Thresholds(t) => threshold_groups(sample, t, resolution)?,
        Boundaries::Fractiles(p) => fractile_groups(sample, p, resolution)?,
    };
    let mut rows = groups;
    if rest.0 > 0 {
        rows.push(IncomeGroup::new(None, rest.0, rest.1));
    }
    Tabulation::new(0, Concept::Other, rows)
}

type Split = (Vec<IncomeGroup>, (u64, i64));

fn threshold_groups(sample: &[f64], thresholds: &[f64], resolution: f64) -> Result<Split> {
    let mut t = thresholds.to_vec();
    if t.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(domain("thresholds must be positive"));
    }
    t.sort_unstable_by(|a, b| b.total_cmp(a));
    if let Some(i) = t.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::NonMonotoneThresholds { index: i + 2 });
    }
    let mut counts = alloc::vec![0u64; t.len() + 1];
    let mut totals = alloc::vec![0i64; t.len() + 1];
    for &y in sample {
        // first threshold not above y, or the bottom slot
        let k = t.partition_point(|&th| th > y);
        counts[k] += 1;
        totals[k] = totals[k].checked_add(integerize(y, resolution)?).ok_or(Error::Overflow("group total"))?;
    }
    let groups = t.iter().enumerate().map(|(k, &th)| IncomeGroup::new(Some(th), counts[k], totals[k])).collect();
    Ok((groups, (counts[t.len()], totals[t.len()])))
}

fn fractile_groups(sample: &[f64], fractiles: &[f64], resolution: f64) -> Result<Split> {
    let n = sample.len();
    if fractiles.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(domain("fractiles must lie in (0, 1]"));
    }
    let ranks: Vec<usize> = fractiles.iter().map(|&p| round(p * n as f64) as usize).collect();
    if ranks[0] == 0 || ranks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("fractile grid is too fine for the sample size"));
    }
    let m = *ranks.last().expect("non-empty");
    let mut v = sample.to_vec();
    if m < n {
        v.select_nth_unstable_by(n - m, |a, b| a.total_cmp(b));
    }
    let (rest, top) = v.split_at_mut(n - m);
    top.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut groups = Vec::with_capacity(ranks.len());
    let mut start = 0;
    for &end in &ranks {
        let slice = &top[start..end];
        groups.push(IncomeGroup::new(Some(slice[slice.len() - 1]), slice.len() as u64, sum_units(slice, resolution)?));
        start = end;
    }
    Ok((groups, (rest.len() as u64, sum_units(rest, resolution)?)))
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicationRecord {
    pub replication: usize,
    pub alpha_hat: Option<f64>,
    pub se: Option<f64>,
    /// Whether the 95% interval covers the true exponent.
    pub covered: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McReport {
    pub alpha_true: f64,
    pub n_draws: usize,
    pub replications: usize,
    pub failures: usize,
    pub mean_alpha_hat: f64,
    pub bias: f64,
    /// Needs at least two successful replications.
    pub sd_alpha_hat: Option<f64>,
    pub mean_se: Option<f64>,
    /// `mean_se / sd_alpha_hat`.
    pub se_ratio: Option<f64>,
    pub ci_coverage_95: f64,
    pub records: Vec<ReplicationRecord>,
}

fn estimate_once(cfg: &SimConfig, method: &McMethod, replication: usize) -> Result<EstimateResult> {
    let sample = sample_pareto(cfg, replication);
    let tab = tabulate_sample(&sample, &cfg.boundaries, cfg.resolution / cfg.cutoff_c)?;
    let cv = tab.cumulate(true);
    match method {
        McMethod::Tw(tw) => {
            if cv.len() < 3 {
                return Err(Error::InsufficientGroups { needed: 3, found: cv.len() });
            }
            tw_estimate_groups(&cv, cfg.n_draws as f64, cv.len() - 1, tw)
        }
        McMethod::Ml => {
            let thresholds: Vec<f64> = tab.groups().iter().filter_map(|g| g.lower_threshold).collect();
            let counts: Vec<u64> = tab.groups().iter().map(|g| g.count).collect();
            ml_grouped(&thresholds, &counts, counts.len())
        }
    }
}

/// Runs one replication, keeping its error instead of propagating it.
pub fn run_replication(cfg: &SimConfig, method: &McMethod, replication: usize) -> ReplicationRecord {
    match estimate_once(cfg, method, replication) {
        Ok(est) => ReplicationRecord {
            replication,
            alpha_hat: Some(est.alpha_hat),
            se: est.se,
            covered: est.se.map(|se| (est.alpha_hat - cfg.alpha_true).abs() <= Z_95 * se),
            error: None,
        },
        Err(e) => {
            ReplicationRecord { replication, alpha_hat: None, se: None, covered: None, error: Some(e.to_string()) }
        }
    }
}

/// Monte Carlo study. Fails when more than 10% of replications fail.
pub fn mc_study(cfg: &SimConfig, method: &McMethod) -> Result<McReport> {
    cfg.validate()?;
    if let McMethod::Tw(tw) = method {
        tw.validate()?;
    }
    #[cfg(feature = "parallel")]
    let records: Vec<ReplicationRecord> = {
        use rayon::prelude::*;
        (0..cfg.replications).into_par_iter().map(|r| run_replication(cfg, method, r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<ReplicationRecord> = (0..cfg.replications).map(|r| run_replication(cfg, method, r)).collect();

    let failures = records.iter().filter(|r| r.alpha_hat.is_none()).count();
    if failures as f64 > MAX_FAILURE_SHARE * cfg.replications as f64 {
        return Err(Error::TooManyFailures { failed: failures, total: cfg.replications });
    }
    let alphas: Vec<f64> = records.iter().filter_map(|r| r.alpha_hat).collect();
    let k = alphas.len() as f64;
    let mean = alphas.iter().sum::<f64>() / k;
    let sd = (alphas.len() > 1).then(|| sqrt(alphas.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (k - 1.0)));
    let ses: Vec<f64> = records.iter().filter_map(|r| r.se).collect();
    let mean_se = (!ses.is_empty()).then(|| ses.iter().sum::<f64>() / ses.len() as f64);
    let covered = records.iter().filter(|r| r.covered == Some(true)).count();
    let with_interval = records.iter().filter(|r| r.covered.is_some()).count();
    Ok(McReport {
        alpha_true: cfg.alpha_true,
        n_draws: cfg.n_draws,
        replications: cfg.replications,
        failures,
        mean_alpha_hat: mean,
        bias: mean - cfg.alpha_true,
        sd_alpha_hat: sd,
        mean_se,
        se_ratio: match (mean_se, sd) {
            (Some(se), Some(sd)) if sd > 0.0 => Some(se / sd),
            _ => None,
        },
        ci_coverage_95: if with_interval > 0 { covered as f64 / with_interval as f64 } else { 0.0 },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn quantile_example() {
        assert!((pareto_quantile(0.25, 2.0, 1.0) - 1.154_700_538_379_251_5).abs() < 1e-15);
        assert_eq!(pareto_quantile(0.0, 3.0, 2.5), 2.5);
    }

    #[test]
    fn same_seed_same_sample() {
        let cfg = SimConfig { n_draws: 1000, replications: 2, ..SimConfig::default() };
        assert_eq!(sample_pareto(&cfg, 0), sample_pareto(&cfg, 0));
        assert_ne!(sample_pareto(&cfg, 0), sample_pareto(&cfg, 1));
        assert!(sample_pareto(&cfg, 1).iter().all(|&y| y >= cfg.cutoff_c));
    }

    #[test]
    fn single_threshold_below_sample() {
        let sample = [2.0, 3.0, 10.0];
        let t = tabulate_sample(&sample, &Boundaries::Thresholds(vec![1.0]), 1.0).unwrap();
        assert_eq!(t.groups(), &[IncomeGroup::new(Some(1.0), 3, 15)]);
        assert!(t.bottom().is_none());
    }

    #[test]
    fn threshold_binning() {
        let sample = [0.5, 1.0, 1.5, 2.0, 7.0, 9.0];
        let t = tabulate_sample(&sample, &Boundaries::Thresholds(vec![1.0, 5.0]), 10.0).unwrap();
        assert_eq!(t.groups(), &[IncomeGroup::new(Some(5.0), 2, 160), IncomeGroup::new(Some(1.0), 3, 45)]);
        assert_eq!(t.bottom(), Some(&IncomeGroup::new(None, 1, 5)));
    }

    #[test]
    fn fractile_groups_by_rank() {
        let sample: Vec<f64> = (1..=100).map(f64::from).collect();
        let t = tabulate_sample(&sample, &Boundaries::Fractiles(vec![0.01, 0.03, 0.1]), 1.0).unwrap();
        let counts: Vec<u64> = t.groups().iter().map(|g| g.count).collect();
        assert_eq!(counts, vec![1, 2, 7]);
        assert_eq!(t.groups()[1], IncomeGroup::new(Some(98.0), 2, 197));
        assert_eq!(t.bottom().unwrap().count, 90);
        assert_eq!(t.column_sums().1, 5050);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig { alpha_true: 1.0, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig { n_draws: 5, ..SimConfig::default() }.validate().is_err());
        assert!(SimConfig::default().validate().is_ok());
    }
}
