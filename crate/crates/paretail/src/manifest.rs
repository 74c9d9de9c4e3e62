//! Run manifests: every setting a command depends on, resolved from a flat
//! `key=value` config file overridden by command-line flags.
//!
//! The manifest hash covers the canonical settings and the contents of every
//! input file. It ignores the output directory and input file locations, so
//! the same data and settings hash identically wherever they live.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use paretail_core::simulate::McMethod;
use paretail_core::{Boundaries, Concept, Method, SimConfig, TwConfig};
use sha2::{Digest, Sha256};

use crate::csvio::{parse_key_values, read_text};
use crate::error::{AppError, Result};

pub const TOOL: &str = "paretail";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every key a config file may set. Command-line flags use the same names.
pub const KEYS: &[&str] = &[
    "input",
    "concept",
    "years",
    "method",
    "top-fraction",
    "alpha-init",
    "search-interval",
    "iteration-tol",
    "max-iterations",
    "objective-tol",
    "population-csv",
    "alt-population",
    "population-n",
    "cutover",
    "seed",
    "out",
    "format",
    "alpha",
    "cutoff",
    "n-draws",
    "replications",
    "sim-method",
    "fractiles",
    "thresholds",
    "records",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(AppError::Usage(format!("unknown format `{other}`"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Inclusive year ranges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct YearSet(Vec<(i32, i32)>);

impl YearSet {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || AppError::Usage(format!("invalid year list `{s}`"));
        let mut ranges = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = match part.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, part),
            };
            let (a, b): (i32, i32) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            ranges.push((a, b));
        }
        if ranges.is_empty() {
            return Err(bad());
        }
        ranges.sort_unstable();
        Ok(YearSet(ranges))
    }

    pub fn contains(&self, year: i32) -> bool {
        self.0.iter().any(|&(a, b)| a <= year && year <= b)
    }

    /// Every year covered, ascending.
    pub fn years(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.0.iter().flat_map(|&(a, b)| a..=b).collect();
        v.dedup();
        v
    }

    fn canonical(&self) -> String {
        self.0
            .iter()
            .map(|(a, b)| if a == b { a.to_string() } else { format!("{a}-{b}") })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub concepts: Vec<Concept>,
    pub years: Option<YearSet>,
    pub methods: Vec<Method>,
    pub tw: TwConfig,
    pub population_csv: Option<PathBuf>,
    pub alt_population: bool,
    pub population_n: Option<f64>,
    pub cutover: i32,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub sim: SimConfig,
    pub sim_method: McMethod,
    pub records: bool,
    /// Hex SHA-256 over the canonical settings and input contents.
    pub hash: String,
}

fn usage<E: std::fmt::Display>(key: &str) -> impl Fn(E) -> AppError + '_ {
    move |e| AppError::Usage(format!("--{key}: {e}"))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| s.parse().map_err(usage(key))).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "" | "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(AppError::Usage(format!("--{key}: expected true or false, found `{other}`"))),
    }
}

/// Settings from a config file. Relative paths resolve against its directory.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut map = BTreeMap::new();
    for (key, value, line) in parse_key_values(&text, path)? {
        if !KEYS.contains(&key.as_str()) {
            return Err(AppError::parse(path, line, format!("unknown key `{key}`")));
        }
        let value = match key.as_str() {
            "input" => {
                value.split(',').map(|p| resolve(base, p.trim()).display().to_string()).collect::<Vec<_>>().join(",")
            }
            "population-csv" | "out" => resolve(base, &value).display().to_string(),
            _ => value,
        };
        map.insert(key, value);
    }
    Ok(map)
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl RunManifest {
    /// Builds a manifest from settings, later entries overriding earlier.
    pub fn resolve(command: &str, settings: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| settings.get(k).map(String::as_str);
        let mut tw = TwConfig::default();
        if let Some(v) = get("top-fraction") {
            tw.top_fraction = v.parse().map_err(usage("top-fraction"))?;
        }
        if let Some(v) = get("alpha-init") {
            tw.alpha_init = v.parse().map_err(usage("alpha-init"))?;
        }
        if let Some(v) = get("search-interval") {
            let bounds: Vec<f64> = parse_list("search-interval", v)?;
            let [lo, hi] = bounds[..] else {
                return Err(AppError::Usage("--search-interval takes LO,HI".into()));
            };
            tw.search_interval = (lo, hi);
        }
        if let Some(v) = get("iteration-tol") {
            tw.iteration_tol = v.parse().map_err(usage("iteration-tol"))?;
        }
        if let Some(v) = get("max-iterations") {
            tw.max_iterations = v.parse().map_err(usage("max-iterations"))?;
        }
        if let Some(v) = get("objective-tol") {
            tw.objective_tol = v.parse().map_err(usage("objective-tol"))?;
        }
        tw.validate().map_err(|e| AppError::Usage(e.to_string()))?;

        let methods = match get("method").unwrap_or("tw") {
            "all" => Method::ALL.to_vec(),
            v => {
                let mut m: Vec<Method> = parse_list("method", v)?;
                m.sort_unstable();
                m.dedup();
                m
            }
        };
        if methods.is_empty() {
            return Err(AppError::Usage("select at least one method".into()));
        }
        let mut concepts: Vec<Concept> = match get("concept").unwrap_or("agi") {
            "all" => vec![Concept::Agi, Concept::Wages, Concept::Capital],
            v => parse_list("concept", v)?,
        };
        concepts.sort_unstable();
        concepts.dedup();

        let formats = {
            let mut f = get("format")
                .unwrap_or("csv,json,svg")
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Format::parse)
                .collect::<Result<Vec<_>>>()?;
            f.sort_unstable();
            f.dedup();
            f
        };
        if formats.is_empty() {
            return Err(AppError::Usage("select at least one output format".into()));
        }

        let defaults = SimConfig::default();
        let sim_boundaries = match (get("fractiles"), get("thresholds")) {
            (Some(_), Some(_)) => {
                return Err(AppError::Usage("--fractiles and --thresholds are exclusive".into()));
            }
            (Some(v), None) => Boundaries::Fractiles(parse_list("fractiles", v)?),
            (None, Some(v)) => Boundaries::Thresholds(parse_list("thresholds", v)?),
            (None, None) => defaults.boundaries.clone(),
        };
        let sim = SimConfig {
            alpha_true: get("alpha")
                .map(str::parse)
                .transpose()
                .map_err(usage("alpha"))?
                .unwrap_or(defaults.alpha_true),
            cutoff_c: get("cutoff").map(str::parse).transpose().map_err(usage("cutoff"))?.unwrap_or(defaults.cutoff_c),
            n_draws: get("n-draws").map(str::parse).transpose().map_err(usage("n-draws"))?.unwrap_or(defaults.n_draws),
            boundaries: sim_boundaries,
            replications: get("replications")
                .map(str::parse)
                .transpose()
                .map_err(usage("replications"))?
                .unwrap_or(defaults.replications),
            seed: get("seed").map(str::parse).transpose().map_err(usage("seed"))?.unwrap_or(defaults.seed),
            resolution: defaults.resolution,
        };
        let sim_method = match get("sim-method").unwrap_or("tw") {
            "tw" => McMethod::Tw(tw.clone()),
            "ml" => McMethod::Ml,
            other => return Err(AppError::Usage(format!("--sim-method: unknown method `{other}`"))),
        };

        let mut m = RunManifest {
            command: command.to_string(),
            inputs: get("input")
                .map(|v| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(PathBuf::from).collect())
                .unwrap_or_default(),
            concepts,
            years: get("years").map(YearSet::parse).transpose()?,
            methods,
            tw,
            population_csv: get("population-csv").map(PathBuf::from),
            alt_population: get("alt-population")
                .map(|v| parse_bool("alt-population", v))
                .transpose()?
                .unwrap_or(false),
            population_n: get("population-n").map(str::parse).transpose().map_err(usage("population-n"))?,
            cutover: get("cutover")
                .map(str::parse)
                .transpose()
                .map_err(usage("cutover"))?
                .unwrap_or(paretail_core::sampleframe::DEFAULT_CUTOVER),
            out: PathBuf::from(get("out").unwrap_or("paretail-out")),
            formats,
            sim,
            sim_method,
            records: get("records").map(|v| parse_bool("records", v)).transpose()?.unwrap_or(false),
            hash: String::new(),
        };
        if let Some(n) = m.population_n {
            if !(n > 0.0 && n.is_finite()) {
                return Err(AppError::Usage("--population-n must be positive".into()));
            }
        }
        m.hash = m.compute_hash()?;
        Ok(m)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Settings as sorted `key=value` lines. Paths are reduced to file names;
    /// their contents enter the hash separately.
    pub fn canonical(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        let name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        kv.insert("command", self.command.clone());
        kv.insert("input", self.inputs.iter().map(|p| name(p)).collect::<Vec<_>>().join(","));
        kv.insert("concept", self.concepts.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(","));
        kv.insert("years", self.years.as_ref().map(YearSet::canonical).unwrap_or_default());
        kv.insert("method", self.methods.iter().map(|m| m.as_str().to_ascii_lowercase()).collect::<Vec<_>>().join(","));
        kv.insert("top-fraction", self.tw.top_fraction.to_string());
        kv.insert("alpha-init", self.tw.alpha_init.to_string());
        kv.insert("search-interval", format!("{},{}", self.tw.search_interval.0, self.tw.search_interval.1));
        kv.insert("iteration-tol", self.tw.iteration_tol.to_string());
        kv.insert("max-iterations", self.tw.max_iterations.to_string());
        kv.insert("objective-tol", self.tw.objective_tol.to_string());
        kv.insert("population-csv", self.population_csv.as_deref().map(name).unwrap_or_default());
        kv.insert("alt-population", self.alt_population.to_string());
        kv.insert("population-n", self.population_n.map(|n| n.to_string()).unwrap_or_default());
        kv.insert("cutover", self.cutover.to_string());
        kv.insert("format", self.formats.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(","));
        kv.insert("alpha", self.sim.alpha_true.to_string());
        kv.insert("cutoff", self.sim.cutoff_c.to_string());
        kv.insert("n-draws", self.sim.n_draws.to_string());
        kv.insert("replications", self.sim.replications.to_string());
        kv.insert("seed", self.sim.seed.to_string());
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        match &self.sim.boundaries {
            Boundaries::Fractiles(v) => kv.insert("fractiles", list(v)),
            Boundaries::Thresholds(v) => kv.insert("thresholds", list(v)),
        };
        kv.insert("sim-method", if matches!(self.sim_method, McMethod::Ml) { "ml" } else { "tw" }.into());
        kv.insert("records", self.records.to_string());
        let mut s = String::new();
        for (k, v) in kv {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    fn compute_hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        for p in self.inputs.iter().chain(self.population_csv.iter()) {
            let mut files = vec![p.clone()];
            let meta = crate::csvio::meta_path(p);
            if meta != *p && meta.exists() {
                files.push(meta);
            }
            for f in files {
                let bytes = std::fs::read(&f).map_err(|e| AppError::io(&f, e))?;
                h.update(b"\0file\0");
                h.update(Sha256::digest(&bytes));
            }
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn years_parse_ranges_and_lists() {
        let y = YearSet::parse("2019, 1950-1952").unwrap();
        assert_eq!(y.years(), vec![1950, 1951, 1952, 2019]);
        assert!(y.contains(1951) && !y.contains(1953));
        assert!(YearSet::parse("1960-1950").is_err());
        assert!(YearSet::parse("abc").is_err());
    }

    #[test]
    fn all_methods_and_unknown_method() {
        let m = RunManifest::resolve("estimate", &settings(&[("method", "all")])).unwrap();
        assert_eq!(m.methods, Method::ALL.to_vec());
        assert!(matches!(RunManifest::resolve("estimate", &settings(&[("method", "hill")])), Err(AppError::Usage(_))));
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunManifest::resolve("estimate", &settings(&[("out", "a")])).unwrap();
        let b = RunManifest::resolve("estimate", &settings(&[("out", "b")])).unwrap();
        let c = RunManifest::resolve("estimate", &settings(&[("out", "a"), ("top-fraction", "0.02")])).unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
        assert_eq!(a.hash.len(), 64);
    }

    #[test]
    fn tw_overrides_are_validated() {
        let m = RunManifest::resolve("estimate", &settings(&[("search-interval", "1.1,30")])).unwrap();
        assert_eq!(m.tw.search_interval, (1.1, 30.0));
        assert!(RunManifest::resolve("estimate", &settings(&[("search-interval", "0.5,30")])).is_err());
        assert!(RunManifest::resolve("estimate", &settings(&[("top-fraction", "2")])).is_err());
    }
}
