//! Assembles the tabulation and population size for each (year, concept).

use std::collections::BTreeMap;

use paretail_core::sampleframe::{
    alt_units, fit_joint_share_regression, potential_units, potential_units_with_fit, JointShareFit,
};
use paretail_core::tabulation::{derive_capital, merge_to_common_thresholds, with_ranking_counts};
use paretail_core::{Concept, DemographicSeries, Tabulation};

use crate::csvio::{read_demographics, read_tabulation};
use crate::error::{AppError, Result};
use crate::manifest::RunManifest;

/// Input tabulations keyed by year, then concept.
#[derive(Debug, Default)]
pub struct Inputs {
    by_year: BTreeMap<i32, BTreeMap<Concept, Tabulation>>,
}

impl Inputs {
    pub fn load(manifest: &RunManifest) -> Result<Self> {
        if manifest.inputs.is_empty() {
            return Err(AppError::Usage("no --input files".into()));
        }
        let mut inputs = Inputs::default();
        for path in &manifest.inputs {
            let t = read_tabulation(path)?;
            let slot = inputs.by_year.entry(t.year).or_default();
            if slot.contains_key(&t.concept) {
                return Err(AppError::Usage(format!("two {} tabulations for {}", t.concept, t.year)));
            }
            slot.insert(t.concept, t);
        }
        Ok(inputs)
    }

    /// Years present in the inputs and selected by the manifest.
    pub fn years(&self, manifest: &RunManifest) -> Vec<i32> {
        self.by_year.keys().copied().filter(|&y| manifest.years.as_ref().is_none_or(|s| s.contains(y))).collect()
    }

    /// Cleaned tabulation for estimation, with notes on how it was formed.
    pub fn tabulation(&self, year: i32, concept: Concept) -> std::result::Result<(Tabulation, Vec<String>), String> {
        let tabs = self.by_year.get(&year).ok_or_else(|| format!("no tabulations for {year}"))?;
        let mut notes = Vec::new();
        let t = match (concept, tabs.get(&concept)) {
            (Concept::Capital, None) => {
                let (Some(agi), Some(wages)) = (tabs.get(&Concept::Agi), tabs.get(&Concept::Wages)) else {
                    return Err(format!("capital income for {year} needs AGI and wage tabulations"));
                };
                let (agi, wages) = common_structure(agi, wages)?;
                let cap = derive_capital(&agi, &wages).map_err(|e| e.to_string())?;
                if !cap.negative_groups.is_empty() {
                    notes.push(format!("negative capital income in groups {:?}", cap.negative_groups));
                }
                cap.tabulation
            }
            (_, None) => return Err(format!("no {concept} tabulation for {year}")),
            (_, Some(t)) if t.ranked_by != t.concept => match tabs.get(&t.ranked_by) {
                Some(ranking) => {
                    let (ranking, own) = common_structure(ranking, t)?;
                    notes.push(format!("ranks taken from {} counts", ranking.concept));
                    with_ranking_counts(&ranking, &own).map_err(|e| e.to_string())?
                }
                None => {
                    notes.push(format!("no {} tabulation; ranks use {concept} counts", t.ranked_by));
                    t.clone()
                }
            },
            (_, Some(t)) => t.clone(),
        };
        let merged = t.merge_zero_count_groups().map_err(|e| e.to_string())?;
        if merged.k() != t.k() {
            notes.push(format!("merged {} zero-count groups", t.k() - merged.k()));
        }
        Ok((merged, notes))
    }
}

fn common_structure(a: &Tabulation, b: &Tabulation) -> std::result::Result<(Tabulation, Tabulation), String> {
    if a.thresholds() == b.thresholds() {
        Ok((a.clone(), b.clone()))
    } else {
        merge_to_common_thresholds(a, b).map_err(|e| e.to_string())
    }
}

/// Source of the population of potential tax units.
#[derive(Debug)]
pub struct Population {
    fixed: Option<f64>,
    series: Option<(DemographicSeries, Option<JointShareFit>)>,
    alt: bool,
    cutover: i32,
}

impl Population {
    pub fn load(manifest: &RunManifest) -> Result<Self> {
        let series = match &manifest.population_csv {
            Some(path) => {
                let s = read_demographics(path)?;
                // the regression is only needed before the cutover
                let fit = fit_joint_share_regression(&s, manifest.cutover).ok();
                Some((s, fit))
            }
            None => None,
        };
        Ok(Population { fixed: manifest.population_n, series, alt: manifest.alt_population, cutover: manifest.cutover })
    }

    /// `n` for a year: an explicit value, then the tabulation's own, then
    /// the demographic series.
    pub fn n_for(&self, year: i32, t: &Tabulation) -> std::result::Result<f64, String> {
        if let Some(n) = self.fixed {
            return Ok(n);
        }
        if let Some(n) = t.population_n {
            return Ok(n as f64);
        }
        let Some((series, fit)) = &self.series else {
            return Err(format!(
                "no population size for {year}: give --population-n, --population-csv or population_n"
            ));
        };
        if self.alt {
            return alt_units(series, year).map_err(|e| e.to_string());
        }
        if year >= self.cutover {
            return potential_units(series, year, self.cutover).map_err(|e| e.to_string());
        }
        match fit {
            Some(fit) => potential_units_with_fit(series, year, self.cutover, fit).map_err(|e| e.to_string()),
            None => Err(format!("no joint-return regression available for {year}")),
        }
    }
}
