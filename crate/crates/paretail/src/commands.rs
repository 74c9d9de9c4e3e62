//! The six commands. Each writes its files into the manifest's output
//! directory and reports whether every unit of work succeeded.

use rayon::prelude::*;
use serde::Serialize;

use paretail_core::estimators::heuristic::{ap_estimate, fp_estimate};
use paretail_core::estimators::ml::ml_estimate;
use paretail_core::estimators::select::tail_scan;
use paretail_core::pareto::{implied_share, interpolate_share, share_curve_from_tabulation};
use paretail_core::sampleframe::{alt_units, fit_joint_share_regression, potential_units_with_fit};
use paretail_core::simulate::{mc_study, ReplicationRecord};
use paretail_core::{Concept, DemographicField, EstimateResult, Method, Tabulation, TwConfig};

use crate::csvio::{meta_path, read_demographics, read_tabulation, tabulation_csv, tabulation_meta};
use crate::data::{Inputs, Population};
use crate::error::{AppError, Result};
use crate::manifest::{Format, RunManifest};
use crate::output::{num, opt_num, OutputDir};
use crate::svg::{LineChart, Series};

/// Fractiles used by the share-based heuristic and the implied-share series.
pub const AP_FRACTILES: (f64, f64) = (0.001, 0.01);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Some units failed; their errors are recorded in the outputs.
    Partial,
    /// Every unit failed.
    Failed,
}

impl Status {
    fn from_counts(ok: usize, failed: usize) -> Self {
        match (ok, failed) {
            (_, 0) => Status::Complete,
            (0, _) => Status::Failed,
            _ => Status::Partial,
        }
    }
}

fn jobs(inputs: &Inputs, manifest: &RunManifest) -> Vec<(i32, Concept)> {
    inputs.years(manifest).into_iter().flat_map(|y| manifest.concepts.iter().map(move |&c| (y, c))).collect()
}

fn join_notes(notes: &[String]) -> String {
    notes.join("; ")
}

fn report_errors<'a>(errors: impl Iterator<Item = (String, &'a str)>) {
    for (what, e) in errors {
        eprintln!("paretail: {what}: {e}");
    }
}

// ---------------------------------------------------------------- ingest

pub fn ingest(manifest: &RunManifest) -> Result<Status> {
    if manifest.inputs.is_empty() {
        return Err(AppError::Usage("no --input files".into()));
    }
    let mut out = OutputDir::create(manifest)?;
    let mut rows = Vec::new();
    let mut failed = 0;
    let mut tabs: Vec<Tabulation> = Vec::new();
    for path in &manifest.inputs {
        let t = read_tabulation(path)?;
        if tabs.iter().any(|o| o.year == t.year && o.concept == t.concept) {
            return Err(AppError::Usage(format!("two {} tabulations for {}", t.concept, t.year)));
        }
        let report = t.validate_totals();
        if !report.passed() {
            failed += 1;
            eprintln!("paretail: {}: {report}", path.display());
        }
        let zero = t.groups().iter().filter(|g| g.count == 0).count();
        rows.push(vec![
            t.year.to_string(),
            t.concept.to_string(),
            t.ranked_by.to_string(),
            path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            t.k().to_string(),
            zero.to_string(),
            t.grand_total_count.to_string(),
            t.grand_total_income.to_string(),
            report.count_delta.to_string(),
            report.income_delta.to_string(),
            report.passed().to_string(),
        ]);
        tabs.push(t);
    }
    let order = |t: &Tabulation| (t.year, t.concept);
    tabs.sort_by_key(order);
    rows.sort_by(|a, b| (&a[0], &a[1]).cmp(&(&b[0], &b[1])));
    for t in &tabs {
        let name = format!("{}_{}.csv", t.concept, t.year);
        out.text(&name, &tabulation_csv(t))?;
        let meta = meta_path(std::path::Path::new(&name));
        out.text(&meta.to_string_lossy(), &tabulation_meta(t))?;
    }
    out.csv(
        "ingest_report.csv",
        &[
            "year",
            "concept",
            "ranked_by",
            "source",
            "groups",
            "zero_count_groups",
            "grand_total_count",
            "grand_total_income",
            "count_delta",
            "income_delta",
            "totals_ok",
        ],
        &rows,
    )?;
    println!("ingested {} tabulations into {}", tabs.len(), out.path().display());
    Ok(Status::from_counts(tabs.len() - failed, failed))
}

// -------------------------------------------------------------- estimate

#[derive(Debug, Clone, Serialize)]
pub struct EstimateRow {
    pub year: i32,
    pub concept: Concept,
    pub method: Method,
    pub n: Option<f64>,
    pub alpha_hat: Option<f64>,
    pub se: Option<f64>,
    pub l_used: Option<usize>,
    pub iterations: Option<usize>,
    pub objective: Option<f64>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

pub const ESTIMATE_COLUMNS: [&str; 11] =
    ["year", "concept", "method", "n", "alpha_hat", "se", "l_used", "iterations", "objective", "notes", "error"];

impl EstimateRow {
    fn csv(&self) -> Vec<String> {
        vec![
            self.year.to_string(),
            self.concept.to_string(),
            self.method.to_string(),
            opt_num(self.n),
            opt_num(self.alpha_hat),
            opt_num(self.se),
            self.l_used.map(|v| v.to_string()).unwrap_or_default(),
            self.iterations.map(|v| v.to_string()).unwrap_or_default(),
            opt_num(self.objective),
            join_notes(&self.notes),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Runs one estimator on a cleaned tabulation.
pub fn run_method(
    method: Method,
    t: &Tabulation,
    n: f64,
    tw: &TwConfig,
) -> std::result::Result<EstimateResult, String> {
    if method.needs_thresholds() && !t.has_own_thresholds() {
        return Err(format!(
            "{method} needs {}-ranked thresholds; these groups are ranked by {}",
            t.concept, t.ranked_by
        ));
    }
    let r = match method {
        Method::Tw => paretail_core::estimators::tw_estimate(t, n, tw),
        Method::Ml => ml_estimate(t, n, tw.top_fraction),
        Method::Fp => fp_estimate(&t.cumulate(true), n),
        Method::Ap => share_curve_from_tabulation(t, n).and_then(|c| ap_estimate(&c, AP_FRACTILES.0, AP_FRACTILES.1)),
    };
    r.map_err(|e| e.to_string())
}

fn estimate_job(inputs: &Inputs, pop: &Population, m: &RunManifest, year: i32, concept: Concept) -> Vec<EstimateRow> {
    let blank = |notes: Vec<String>, n: Option<f64>, method: Method, error: Option<String>| EstimateRow {
        year,
        concept,
        method,
        n,
        alpha_hat: None,
        se: None,
        l_used: None,
        iterations: None,
        objective: None,
        notes,
        error,
    };
    let prepared = inputs.tabulation(year, concept).and_then(|(t, notes)| {
        let n = pop.n_for(year, &t)?;
        Ok((t, notes, n))
    });
    let (t, notes, n) = match prepared {
        Ok(p) => p,
        Err(e) => return m.methods.iter().map(|&method| blank(Vec::new(), None, method, Some(e.clone()))).collect(),
    };
    m.methods
        .iter()
        .map(|&method| match run_method(method, &t, n, &m.tw) {
            Ok(r) => {
                let mut all = notes.clone();
                all.extend(r.warnings);
                EstimateRow {
                    alpha_hat: Some(r.alpha_hat),
                    se: r.se,
                    l_used: Some(r.l_used),
                    iterations: Some(r.iterations),
                    objective: Some(r.objective_value),
                    ..blank(all, Some(n), method, None)
                }
            }
            Err(e) => blank(notes.clone(), Some(n), method, Some(e)),
        })
        .collect()
}

/// Estimate rows ordered by year, concept and method.
pub fn estimate_rows(manifest: &RunManifest) -> Result<Vec<EstimateRow>> {
    let inputs = Inputs::load(manifest)?;
    let pop = Population::load(manifest)?;
    let jobs = jobs(&inputs, manifest);
    if jobs.is_empty() {
        return Err(AppError::Usage("no input tabulation matches --years".into()));
    }
    let per_job: Vec<Vec<EstimateRow>> =
        jobs.par_iter().map(|&(y, c)| estimate_job(&inputs, &pop, manifest, y, c)).collect();
    Ok(per_job.into_iter().flatten().collect())
}

#[derive(Serialize)]
struct EstimatesJson<'a> {
    rows: &'a [EstimateRow],
}

pub fn estimate(manifest: &RunManifest) -> Result<Status> {
    let rows = estimate_rows(manifest)?;
    let mut out = OutputDir::create(manifest)?;
    if manifest.wants(Format::Csv) {
        out.csv("estimates.csv", &ESTIMATE_COLUMNS, &rows.iter().map(EstimateRow::csv).collect::<Vec<_>>())?;
    }
    if manifest.wants(Format::Json) {
        out.json("estimates.json", &EstimatesJson { rows: &rows })?;
    }
    report_errors(
        rows.iter().filter_map(|r| r.error.as_deref().map(|e| (format!("{} {} {}", r.year, r.concept, r.method), e))),
    );
    for r in rows.iter().filter(|r| r.error.is_none()) {
        println!(
            "{} {} {}: alpha = {}{}",
            r.year,
            r.concept,
            r.method,
            fmt4(r.alpha_hat),
            r.se.map(|s| format!(" (se {s:.2e})")).unwrap_or_default()
        );
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(Status::from_counts(rows.len() - failed, failed))
}

fn fmt4(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

// ------------------------------------------------------------------ scan

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub year: i32,
    pub concept: Concept,
    pub l: usize,
    pub threshold: Option<f64>,
    pub fractile: f64,
    pub alpha_hat: Option<f64>,
    pub se: Option<f64>,
    pub error: Option<String>,
}

pub const SCAN_COLUMNS: [&str; 10] =
    ["year", "concept", "l", "threshold", "fractile", "alpha_hat", "se", "lower_2se", "upper_2se", "error"];

impl ScanRow {
    fn band(&self, sign: f64) -> Option<f64> {
        Some(self.alpha_hat? + sign * 2.0 * self.se?)
    }

    fn csv(&self) -> Vec<String> {
        vec![
            self.year.to_string(),
            self.concept.to_string(),
            self.l.to_string(),
            opt_num(self.threshold),
            num(self.fractile),
            opt_num(self.alpha_hat),
            opt_num(self.se),
            opt_num(self.band(-1.0)),
            opt_num(self.band(1.0)),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

fn scan_job(
    inputs: &Inputs,
    pop: &Population,
    tw: &TwConfig,
    year: i32,
    concept: Concept,
) -> std::result::Result<Vec<ScanRow>, String> {
    let (t, _) = inputs.tabulation(year, concept)?;
    let n = pop.n_for(year, &t)?;
    let points = tail_scan(&t, n, tw).map_err(|e| e.to_string())?;
    Ok(points
        .into_iter()
        .map(|p| {
            let (alpha_hat, se, error) = match p.estimate {
                Ok(r) => (Some(r.alpha_hat), r.se, None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            ScanRow { year, concept, l: p.l, threshold: p.threshold, fractile: p.fractile, alpha_hat, se, error }
        })
        .collect())
}

pub fn scan(manifest: &RunManifest) -> Result<Status> {
    let inputs = Inputs::load(manifest)?;
    let pop = Population::load(manifest)?;
    let jobs = jobs(&inputs, manifest);
    if jobs.is_empty() {
        return Err(AppError::Usage("no input tabulation matches --years".into()));
    }
    let results: Vec<_> = jobs.par_iter().map(|&(y, c)| scan_job(&inputs, &pop, &manifest.tw, y, c)).collect();
    let mut out = OutputDir::create(manifest)?;
    let (mut ok, mut failed) = (0, 0);
    let mut rows = Vec::new();
    let mut chart = LineChart {
        title: "Minimum distance estimate by number of top groups".into(),
        x_label: "top fractile of the lowest group used".into(),
        y_label: "alpha".into(),
        log_x: true,
        ..Default::default()
    };
    for (&(year, concept), result) in jobs.iter().zip(results) {
        match result {
            Ok(r) => {
                let good: Vec<&ScanRow> = r.iter().filter(|p| p.alpha_hat.is_some()).collect();
                if good.is_empty() {
                    failed += 1;
                } else {
                    ok += 1;
                }
                let series = |name: String, f: &dyn Fn(&ScanRow) -> Option<f64>, dashed| Series {
                    name,
                    points: good.iter().filter_map(|p| Some((p.fractile, f(p)?))).collect(),
                    dashed,
                };
                chart.series.push(series(format!("{concept} {year}"), &|p| p.alpha_hat, false));
                chart.series.push(series(format!("{concept} {year} -2 se"), &|p| p.band(-1.0), true));
                chart.series.push(series(format!("{concept} {year} +2 se"), &|p| p.band(1.0), true));
                rows.extend(r);
            }
            Err(e) => {
                failed += 1;
                eprintln!("paretail: {year} {concept}: {e}");
            }
        }
    }
    if manifest.wants(Format::Csv) {
        out.csv("scan.csv", &SCAN_COLUMNS, &rows.iter().map(ScanRow::csv).collect::<Vec<_>>())?;
    }
    if manifest.wants(Format::Json) {
        #[derive(Serialize)]
        struct ScanJson<'a> {
            rows: &'a [ScanRow],
        }
        out.json("scan.json", &ScanJson { rows: &rows })?;
    }
    if manifest.wants(Format::Svg) {
        out.svg("scan.svg", &chart.to_svg())?;
    }
    println!("scanned {} tabulations into {}", ok, out.path().display());
    Ok(Status::from_counts(ok, failed))
}

// ---------------------------------------------------------------- shares

#[derive(Debug, Clone, Serialize)]
pub struct ImpliedRow {
    pub year: i32,
    pub concept: Concept,
    pub alpha_hat: Option<f64>,
    pub share_top_1: Option<f64>,
    pub implied_share_top_01: Option<f64>,
    pub observed_share_top_01: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharesJob {
    pub year: i32,
    pub concept: Concept,
    pub n: f64,
    pub curve: Vec<(f64, f64)>,
    pub implied: ImpliedRow,
}

pub const SHARE_COLUMNS: [&str; 4] = ["year", "concept", "fractile", "share"];
pub const IMPLIED_COLUMNS: [&str; 7] =
    ["year", "concept", "alpha_hat", "share_top_1", "implied_share_top_01", "observed_share_top_01", "error"];

fn shares_job(
    inputs: &Inputs,
    pop: &Population,
    tw: &TwConfig,
    year: i32,
    concept: Concept,
) -> std::result::Result<SharesJob, String> {
    let (t, _) = inputs.tabulation(year, concept)?;
    let n = pop.n_for(year, &t)?;
    let curve = share_curve_from_tabulation(&t, n).map_err(|e| e.to_string())?;
    let (p, q) = AP_FRACTILES;
    let mut implied = ImpliedRow {
        year,
        concept,
        alpha_hat: None,
        share_top_1: None,
        implied_share_top_01: None,
        observed_share_top_01: interpolate_share(&curve, p).ok(),
        error: None,
    };
    let mut step = || -> std::result::Result<(), String> {
        let alpha = run_method(Method::Tw, &t, n, tw)?.alpha_hat;
        implied.alpha_hat = Some(alpha);
        let s_q = interpolate_share(&curve, q).map_err(|e| e.to_string())?;
        implied.share_top_1 = Some(s_q);
        implied.implied_share_top_01 = Some(implied_share(s_q, q, p, alpha).map_err(|e| e.to_string())?);
        Ok(())
    };
    if let Err(e) = step() {
        implied.error = Some(e);
    }
    Ok(SharesJob { year, concept, n, curve: curve.points().to_vec(), implied })
}

pub fn shares(manifest: &RunManifest) -> Result<Status> {
    let inputs = Inputs::load(manifest)?;
    let pop = Population::load(manifest)?;
    let jobs = jobs(&inputs, manifest);
    if jobs.is_empty() {
        return Err(AppError::Usage("no input tabulation matches --years".into()));
    }
    let results: Vec<_> = jobs.par_iter().map(|&(y, c)| shares_job(&inputs, &pop, &manifest.tw, y, c)).collect();
    let (mut done, mut errors) = (Vec::new(), Vec::new());
    for (&(year, concept), r) in jobs.iter().zip(results) {
        match r {
            Ok(j) => done.push(j),
            Err(e) => errors.push((format!("{year} {concept}"), e)),
        }
    }
    report_errors(errors.iter().map(|(w, e)| (w.clone(), e.as_str())));
    if done.is_empty() {
        return Ok(Status::Failed);
    }
    report_errors(
        done.iter().filter_map(|j| j.implied.error.as_deref().map(|e| (format!("{} {}", j.year, j.concept), e))),
    );

    let mut out = OutputDir::create(manifest)?;
    if manifest.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = done
            .iter()
            .flat_map(|j| j.curve.iter().map(|&(p, s)| vec![j.year.to_string(), j.concept.to_string(), num(p), num(s)]))
            .collect();
        out.csv("shares.csv", &SHARE_COLUMNS, &rows)?;
        let implied: Vec<Vec<String>> = done
            .iter()
            .map(|j| {
                let i = &j.implied;
                vec![
                    i.year.to_string(),
                    i.concept.to_string(),
                    opt_num(i.alpha_hat),
                    opt_num(i.share_top_1),
                    opt_num(i.implied_share_top_01),
                    opt_num(i.observed_share_top_01),
                    i.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        out.csv("implied.csv", &IMPLIED_COLUMNS, &implied)?;
    }
    if manifest.wants(Format::Json) {
        #[derive(Serialize)]
        struct SharesJson<'a> {
            series: &'a [SharesJob],
        }
        out.json("shares.json", &SharesJson { series: &done })?;
    }
    if manifest.wants(Format::Svg) {
        let mut chart = LineChart {
            title: "Top income shares".into(),
            x_label: "top fractile".into(),
            y_label: "share of income".into(),
            log_x: true,
            log_y: true,
            ..Default::default()
        };
        for j in &done {
            chart.series.push(Series {
                name: format!("{} {}", j.concept, j.year),
                points: j.curve.clone(),
                dashed: false,
            });
            if let (Some(alpha), Some(s_q)) = (j.implied.alpha_hat, j.implied.share_top_1) {
                let (lo, q) = (j.curve.first().map_or(AP_FRACTILES.0, |c| c.0).min(AP_FRACTILES.0), AP_FRACTILES.1);
                let points = (0..=20)
                    .map(|i| lo * (q / lo).powf(f64::from(i) / 20.0))
                    .filter_map(|p| Some((p, implied_share(s_q, q, p.min(q), alpha).ok()?)))
                    .collect();
                chart.series.push(Series { name: format!("{} {} implied", j.concept, j.year), points, dashed: true });
            }
        }
        out.svg("shares.svg", &chart.to_svg())?;
    }
    let failed = errors.len() + done.iter().filter(|j| j.implied.error.is_some()).count();
    let ok = done.iter().filter(|j| j.implied.error.is_none()).count();
    println!("wrote share curves for {} tabulations into {}", done.len(), out.path().display());
    Ok(Status::from_counts(ok, failed))
}

// ----------------------------------------------------------- sampleframe

#[derive(Debug, Clone, Serialize)]
pub struct FrameRow {
    pub year: i32,
    pub adults: Option<f64>,
    pub joint_returns: Option<f64>,
    pub married_couples: Option<f64>,
    pub n: Option<f64>,
    pub rule: &'static str,
    pub error: Option<String>,
}

pub const FRAME_COLUMNS: [&str; 7] = ["year", "A", "J", "M", "n", "rule", "error"];

pub fn sampleframe(manifest: &RunManifest) -> Result<Status> {
    let Some(path) = &manifest.population_csv else {
        return Err(AppError::Usage("sampleframe needs --population-csv".into()));
    };
    let series = read_demographics(path)?;
    let fit = fit_joint_share_regression(&series, manifest.cutover);
    let years = match &manifest.years {
        Some(set) => set.years(),
        None => {
            let (a, b) = series.year_range().expect("series has rows");
            (a..=b).collect()
        }
    };
    let rows: Vec<FrameRow> = years
        .iter()
        .map(|&year| {
            let rec = series.get(year);
            let (rule, n) = if manifest.alt_population {
                ("A-M", alt_units(&series, year).map_err(|e| e.to_string()))
            } else if year >= manifest.cutover {
                let n = series
                    .value(DemographicField::Adults, year)
                    .and_then(|a| Ok(a - series.value(DemographicField::JointReturns, year)?));
                ("A-J", n.map_err(|e| e.to_string()))
            } else {
                let n = match &fit {
                    Ok(fit) => {
                        potential_units_with_fit(&series, year, manifest.cutover, fit).map_err(|e| e.to_string())
                    }
                    Err(e) => Err(format!("joint-return regression unavailable: {e}")),
                };
                ("A-Jhat", n)
            };
            FrameRow {
                year,
                adults: rec.and_then(|r| r.adults),
                joint_returns: rec.and_then(|r| r.joint_returns),
                married_couples: rec.and_then(|r| r.married_couples),
                n: n.as_ref().ok().copied(),
                rule,
                error: n.err(),
            }
        })
        .collect();

    let mut out = OutputDir::create(manifest)?;
    if manifest.wants(Format::Csv) {
        let csv: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.year.to_string(),
                    opt_num(r.adults),
                    opt_num(r.joint_returns),
                    opt_num(r.married_couples),
                    opt_num(r.n),
                    r.rule.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        out.csv("sampleframe.csv", &FRAME_COLUMNS, &csv)?;
        match &fit {
            Ok(f) => {
                out.csv(
                    "sampleframe_fit.csv",
                    &["intercept", "slope", "r_squared", "observations", "first_year", "last_year", "warnings"],
                    &[vec![
                        num(f.intercept),
                        num(f.slope),
                        num(f.r_squared),
                        f.observations.to_string(),
                        f.years.first().map(i32::to_string).unwrap_or_default(),
                        f.years.last().map(i32::to_string).unwrap_or_default(),
                        join_notes(&f.warnings),
                    ]],
                )?;
                let resid: Vec<Vec<String>> =
                    f.years.iter().zip(f.residuals(&series)).map(|(y, e)| vec![y.to_string(), num(e)]).collect();
                out.csv("sampleframe_residuals.csv", &["year", "residual"], &resid)?;
            }
            Err(e) => eprintln!("paretail: joint-return regression: {e}"),
        }
    }
    if manifest.wants(Format::Json) {
        #[derive(Serialize)]
        struct FitJson {
            intercept: f64,
            slope: f64,
            r_squared: f64,
            observations: usize,
            years: Vec<i32>,
            warnings: Vec<String>,
        }
        #[derive(Serialize)]
        struct FrameJson<'a> {
            fit: Option<FitJson>,
            rows: &'a [FrameRow],
        }
        let fit_json = fit.as_ref().ok().map(|f| FitJson {
            intercept: f.intercept,
            slope: f.slope,
            r_squared: f.r_squared,
            observations: f.observations,
            years: f.years.clone(),
            warnings: f.warnings.clone(),
        });
        out.json("sampleframe.json", &FrameJson { fit: fit_json, rows: &rows })?;
    }
    if manifest.wants(Format::Svg) {
        let chart = LineChart {
            title: "Potential tax units".into(),
            x_label: "year".into(),
            y_label: "units".into(),
            series: vec![Series {
                name: if manifest.alt_population { "A - M" } else { "A - J" }.into(),
                points: rows.iter().filter_map(|r| Some((f64::from(r.year), r.n?))).collect(),
                dashed: false,
            }],
            ..Default::default()
        };
        out.svg("sampleframe.svg", &chart.to_svg())?;
    }
    if let Ok(f) = &fit {
        println!("log(J/A) on log(M/A): slope {:.4}, R^2 = {:.4} over {} years", f.slope, f.r_squared, f.observations);
    }
    report_errors(rows.iter().filter_map(|r| r.error.as_deref().map(|e| (r.year.to_string(), e))));
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(Status::from_counts(rows.len() - failed, failed))
}

// -------------------------------------------------------------- simulate

pub const MC_COLUMNS: [&str; 11] = [
    "method",
    "alpha_true",
    "n_draws",
    "replications",
    "failures",
    "mean_alpha_hat",
    "bias",
    "sd_alpha_hat",
    "mean_se",
    "se_ratio",
    "ci_coverage_95",
];

pub fn simulate(manifest: &RunManifest) -> Result<Status> {
    let report = mc_study(&manifest.sim, &manifest.sim_method)?;
    let method = match manifest.sim_method {
        paretail_core::simulate::McMethod::Tw(_) => Method::Tw,
        paretail_core::simulate::McMethod::Ml => Method::Ml,
    };
    let mut out = OutputDir::create(manifest)?;
    if manifest.wants(Format::Json) {
        let mut body = report.clone();
        if !manifest.records {
            body.records.clear();
        }
        out.json("mc_report.json", &body)?;
    }
    if manifest.wants(Format::Csv) {
        let row = vec![
            method.to_string(),
            num(report.alpha_true),
            report.n_draws.to_string(),
            report.replications.to_string(),
            report.failures.to_string(),
            num(report.mean_alpha_hat),
            num(report.bias),
            opt_num(report.sd_alpha_hat),
            opt_num(report.mean_se),
            opt_num(report.se_ratio),
            num(report.ci_coverage_95),
        ];
        out.csv("mc_report.csv", &MC_COLUMNS, &[row])?;
        if manifest.records {
            let rows: Vec<Vec<String>> = report.records.iter().map(record_row).collect();
            out.csv("mc_records.csv", &["replication", "alpha_hat", "se", "covered", "error"], &rows)?;
        }
    }
    println!(
        "{method} alpha {}: mean {:.5}, sd/se {}, coverage {:.3}, {} of {} failed",
        report.alpha_true,
        report.mean_alpha_hat,
        report.se_ratio.map(|r| format!("{:.3}", 1.0 / r)).unwrap_or_else(|| "n/a".into()),
        report.ci_coverage_95,
        report.failures,
        report.replications
    );
    // mc_study already rejects studies with too many failed replications
    Ok(Status::Complete)
}

fn record_row(r: &ReplicationRecord) -> Vec<String> {
    vec![
        r.replication.to_string(),
        opt_num(r.alpha_hat),
        opt_num(r.se),
        r.covered.map(|c| c.to_string()).unwrap_or_default(),
        r.error.clone().unwrap_or_default(),
    ]
}
