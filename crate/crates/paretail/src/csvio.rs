//! Tabulation and demographic CSV files.
//!
//! A tabulation is `threshold,count,total_thousands` with an empty threshold
//! on the bottom row, plus a `key=value` sidecar with the same stem and a
//! `.meta` extension. Lines starting with `#` are comments in both files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use paretail_core::{Concept, DemographicRecord, DemographicSeries, IncomeGroup, Tabulation};

use crate::error::{AppError, Result};

pub const TABULATION_COLUMNS: [&str; 3] = ["threshold", "count", "total_thousands"];
pub const DEMOGRAPHIC_COLUMNS: [&str; 5] = ["year", "A", "J", "M", "T"];

/// Sidecar fields of a tabulation file.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub year: i32,
    pub concept: Concept,
    pub ranked_by: Option<Concept>,
    pub grand_total_count: Option<u64>,
    pub grand_total_income: Option<i64>,
    pub population_n: Option<u64>,
}

pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

/// `key=value` pairs with their line numbers. Blank and `#` lines are skipped.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(String, String, u64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(AppError::parse(path, i as u64 + 1, format!("expected key=value, found `{line}`")));
        };
        out.push((k.trim().to_string(), v.trim().to_string(), i as u64 + 1));
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(value: &str, key: &str, path: &Path, line: u64) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| AppError::parse(path, line, format!("{key}: {e}")))
}

pub fn parse_metadata(text: &str, path: &Path) -> Result<Metadata> {
    let (mut year, mut concept) = (None, None);
    let mut meta = Metadata {
        year: 0,
        concept: Concept::Agi,
        ranked_by: None,
        grand_total_count: None,
        grand_total_income: None,
        population_n: None,
    };
    for (key, value, line) in parse_key_values(text, path)? {
        match key.as_str() {
            "year" => year = Some(parse_field(&value, &key, path, line)?),
            "concept" => concept = Some(parse_field(&value, &key, path, line)?),
            "ranked_by" => meta.ranked_by = Some(parse_field(&value, &key, path, line)?),
            "grand_total_count" => meta.grand_total_count = Some(parse_field(&value, &key, path, line)?),
            "grand_total_income" => meta.grand_total_income = Some(parse_field(&value, &key, path, line)?),
            "population_n" if value.is_empty() => {}
            "population_n" => meta.population_n = Some(parse_field(&value, &key, path, line)?),
            other => return Err(AppError::parse(path, line, format!("unknown key `{other}`"))),
        }
    }
    meta.year = year.ok_or_else(|| AppError::parse(path, 0, "missing `year`"))?;
    meta.concept = concept.ok_or_else(|| AppError::parse(path, 0, "missing `concept`"))?;
    Ok(meta)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes())
}

fn column_indices(reader: &mut csv::Reader<&[u8]>, expected: &[&str], path: &Path) -> Result<Vec<usize>> {
    let headers = reader.headers().map_err(|e| AppError::parse(path, 1, e.to_string()))?.clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(AppError::parse(path, 1, "empty file"));
    }
    let line = headers.position().map_or(1, |p| p.line());
    expected
        .iter()
        .map(|col| {
            headers
                .iter()
                .position(|h| h == *col)
                .ok_or_else(|| AppError::parse(path, line, format!("missing column `{col}`")))
        })
        .collect()
}

pub fn parse_tabulation_rows(text: &str, path: &Path) -> Result<Vec<IncomeGroup>> {
    let mut reader = csv_reader(text);
    let idx = column_indices(&mut reader, &TABULATION_COLUMNS, path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            AppError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(idx[i]).unwrap_or("");
        let threshold = match cell(0) {
            "" => None,
            s => Some(parse_field::<f64>(s, "threshold", path, line)?),
        };
        let count = parse_field::<u64>(cell(1), "count", path, line)?;
        let total = parse_field::<i64>(cell(2), "total_thousands", path, line)?;
        rows.push(IncomeGroup::new(threshold, count, total));
    }
    if rows.is_empty() {
        return Err(AppError::parse(path, 2, "no data rows"));
    }
    Ok(rows)
}

pub fn build_tabulation(rows: Vec<IncomeGroup>, meta: &Metadata) -> Result<Tabulation> {
    let mut t = Tabulation::new(meta.year, meta.concept, rows)?
        .with_ranked_by(meta.ranked_by.unwrap_or(meta.concept))
        .with_population(meta.population_n);
    if meta.grand_total_count.is_some() || meta.grand_total_income.is_some() {
        let count = meta.grand_total_count.unwrap_or(t.grand_total_count);
        let income = meta.grand_total_income.unwrap_or(t.grand_total_income);
        t = t.with_grand_totals(count, income);
    }
    Ok(t)
}

/// Reads a tabulation CSV and its sidecar.
pub fn read_tabulation(path: &Path) -> Result<Tabulation> {
    let rows = parse_tabulation_rows(&read_text(path)?, path)?;
    let mp = meta_path(path);
    let meta = parse_metadata(&read_text(&mp)?, &mp)?;
    build_tabulation(rows, &meta)
}

/// Canonical CSV body, highest threshold first and the bottom row last.
pub fn tabulation_csv(t: &Tabulation) -> String {
    let mut s = TABULATION_COLUMNS.join(",");
    s.push('\n');
    for g in t.rows() {
        let th = g.lower_threshold.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{th},{},{}", g.count, g.total);
    }
    s
}

pub fn tabulation_meta(t: &Tabulation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "year={}", t.year);
    let _ = writeln!(s, "concept={}", t.concept);
    let _ = writeln!(s, "ranked_by={}", t.ranked_by);
    let _ = writeln!(s, "grand_total_count={}", t.grand_total_count);
    let _ = writeln!(s, "grand_total_income={}", t.grand_total_income);
    if let Some(n) = t.population_n {
        let _ = writeln!(s, "population_n={n}");
    }
    s
}

pub fn read_demographics(path: &Path) -> Result<DemographicSeries> {
    parse_demographics(&read_text(path)?, path)
}

pub fn parse_demographics(text: &str, path: &Path) -> Result<DemographicSeries> {
    let mut reader = csv_reader(text);
    let idx = column_indices(&mut reader, &DEMOGRAPHIC_COLUMNS, path)?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| AppError::parse(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let opt = |i: usize| -> Result<Option<f64>> {
            match record.get(idx[i]).unwrap_or("") {
                "" => Ok(None),
                s => parse_field::<f64>(s, DEMOGRAPHIC_COLUMNS[i], path, line).map(Some),
            }
        };
        records.push(DemographicRecord {
            year: parse_field(record.get(idx[0]).unwrap_or(""), "year", path, line)?,
            adults: opt(1)?,
            joint_returns: opt(2)?,
            married_couples: opt(3)?,
            total_returns: opt(4)?,
        });
    }
    if records.is_empty() {
        return Err(AppError::parse(path, 2, "no data rows"));
    }
    Ok(DemographicSeries::new(records)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const META: &str = "year=2019\nconcept=agi\n";

    #[test]
    fn malformed_row_reports_line() {
        let text = "threshold,count,total_thousands\n10,1,5\n5,x,3\n";
        let err = parse_tabulation_rows(text, Path::new("t.csv")).unwrap_err();
        assert!(matches!(err, AppError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(parse_tabulation_rows("", Path::new("t.csv")).is_err());
        assert!(parse_tabulation_rows("threshold,count,total_thousands\n", Path::new("t.csv")).is_err());
    }

    #[test]
    fn shuffled_rows_give_the_same_tabulation() {
        let meta = parse_metadata(META, Path::new("t.meta")).unwrap();
        let a = "threshold,count,total_thousands\n10,1,50\n5,2,30\n1,4,10\n,1,-3\n";
        let b = "threshold,count,total_thousands\n,1,-3\n5,2,30\n1,4,10\n10,1,50\n";
        let ta = build_tabulation(parse_tabulation_rows(a, Path::new("a")).unwrap(), &meta).unwrap();
        let tb = build_tabulation(parse_tabulation_rows(b, Path::new("b")).unwrap(), &meta).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(tabulation_csv(&ta), a);
    }

    #[test]
    fn metadata_keys() {
        let m =
            parse_metadata("# c\nyear=1990\nconcept=wages\nranked_by=agi\npopulation_n=5\n", Path::new("m")).unwrap();
        assert_eq!(m.ranked_by, Some(Concept::Agi));
        assert_eq!(m.population_n, Some(5));
        assert!(parse_metadata("concept=agi\n", Path::new("m")).is_err());
        assert!(parse_metadata("year=1\nconcept=agi\ncolour=red\n", Path::new("m")).is_err());
    }

    #[test]
    fn demographics_with_blanks() {
        let s = parse_demographics("year,A,J,M,T\n1940,10,,4,\n1950,12,3,5,6\n", Path::new("d")).unwrap();
        assert_eq!(s.records()[0].joint_returns, None);
        assert_eq!(s.records()[1].total_returns, Some(6.0));
    }
}
