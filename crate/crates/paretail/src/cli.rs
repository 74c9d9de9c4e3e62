//! Argument parsing and exit codes.
//!
//! Every flag maps to a config key of the same name. Settings come from the
//! optional `--config` file first, then from flags, which override it.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Status};
use crate::error::{AppError, Result};
use crate::manifest::{read_config, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "paretail", version, about = "Pareto tail exponents from tabulated income data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate tabulations and write them in canonical form.
    Ingest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// One estimate per year, concept and method.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        tw: TwArgs,
    },
    /// Minimum distance estimates over every number of top groups.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        tw: TwArgs,
    },
    /// Top share curves and shares implied by the estimated exponent.
    Shares {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        tw: TwArgs,
    },
    /// Potential tax units per year from a demographic series.
    Sampleframe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Monte Carlo study on synthetic Pareto tabulations.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        tw: TwArgs,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat key=value settings file; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<String>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_name = "LIST")]
    pub format: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Tabulation CSV files, comma-separated or repeated.
    #[arg(long, value_name = "CSV")]
    pub input: Vec<String>,
    /// agi, wages, capital or all.
    #[arg(long, value_name = "LIST")]
    pub concept: Option<String>,
    /// Years and ranges such as 1950-1960,2019.
    #[arg(long, value_name = "LIST")]
    pub years: Option<String>,
    /// Demographic series with columns year,A,J,M,T.
    #[arg(long, value_name = "CSV")]
    pub population_csv: Option<String>,
    /// Use adults minus married couples as the population.
    #[arg(long)]
    pub alt_population: bool,
    /// Fixed population of potential tax units.
    #[arg(long, value_name = "N")]
    pub population_n: Option<String>,
    /// First year with recorded joint returns.
    #[arg(long, value_name = "YEAR")]
    pub cutover: Option<String>,
}

#[derive(Debug, Args)]
pub struct TwArgs {
    /// tw, ml, fp, ap, a comma-separated list, or all.
    #[arg(long, value_name = "LIST")]
    pub method: Option<String>,
    #[arg(long, value_name = "P")]
    pub top_fraction: Option<String>,
    #[arg(long, value_name = "ALPHA")]
    pub alpha_init: Option<String>,
    #[arg(long, value_name = "LO,HI")]
    pub search_interval: Option<String>,
    #[arg(long, value_name = "TOL")]
    pub iteration_tol: Option<String>,
    #[arg(long, value_name = "N")]
    pub max_iterations: Option<String>,
    #[arg(long, value_name = "TOL")]
    pub objective_tol: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
    #[arg(long, value_name = "N")]
    pub n_draws: Option<String>,
    #[arg(long, value_name = "N")]
    pub replications: Option<String>,
    /// tw or ml.
    #[arg(long, value_name = "METHOD")]
    pub sim_method: Option<String>,
    /// Group boundaries as top fractiles.
    #[arg(long, value_name = "LIST")]
    pub fractiles: Option<String>,
    /// Group boundaries as income thresholds.
    #[arg(long, value_name = "LIST")]
    pub thresholds: Option<String>,
    /// Also write per-replication records.
    #[arg(long)]
    pub records: bool,
}

type Pairs = Vec<(&'static str, String)>;

fn push(pairs: &mut Pairs, key: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        pairs.push((key, v.clone()));
    }
}

impl Common {
    fn pairs(&self, pairs: &mut Pairs) {
        push(pairs, "out", &self.out);
        push(pairs, "format", &self.format);
        push(pairs, "seed", &self.seed);
    }
}

impl DataArgs {
    fn pairs(&self, pairs: &mut Pairs) {
        if !self.input.is_empty() {
            pairs.push(("input", self.input.join(",")));
        }
        push(pairs, "concept", &self.concept);
        push(pairs, "years", &self.years);
        push(pairs, "population-csv", &self.population_csv);
        if self.alt_population {
            pairs.push(("alt-population", "true".into()));
        }
        push(pairs, "population-n", &self.population_n);
        push(pairs, "cutover", &self.cutover);
    }
}

impl TwArgs {
    fn pairs(&self, pairs: &mut Pairs) {
        push(pairs, "method", &self.method);
        push(pairs, "top-fraction", &self.top_fraction);
        push(pairs, "alpha-init", &self.alpha_init);
        push(pairs, "search-interval", &self.search_interval);
        push(pairs, "iteration-tol", &self.iteration_tol);
        push(pairs, "max-iterations", &self.max_iterations);
        push(pairs, "objective-tol", &self.objective_tol);
    }
}

impl SimArgs {
    fn pairs(&self, pairs: &mut Pairs) {
        push(pairs, "alpha", &self.alpha);
        push(pairs, "cutoff", &self.cutoff);
        push(pairs, "n-draws", &self.n_draws);
        push(pairs, "replications", &self.replications);
        push(pairs, "sim-method", &self.sim_method);
        push(pairs, "fractiles", &self.fractiles);
        push(pairs, "thresholds", &self.thresholds);
        if self.records {
            pairs.push(("records", "true".into()));
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::Estimate { .. } => "estimate",
            Command::Scan { .. } => "scan",
            Command::Shares { .. } => "shares",
            Command::Sampleframe { .. } => "sampleframe",
            Command::Simulate { .. } => "simulate",
        }
    }

    fn settings(&self) -> (Option<&PathBuf>, Pairs) {
        let mut pairs = Pairs::new();
        let common = match self {
            Command::Ingest { common, data } | Command::Sampleframe { common, data } => {
                data.pairs(&mut pairs);
                common
            }
            Command::Estimate { common, data, tw }
            | Command::Scan { common, data, tw }
            | Command::Shares { common, data, tw } => {
                data.pairs(&mut pairs);
                tw.pairs(&mut pairs);
                common
            }
            Command::Simulate { common, sim, tw } => {
                sim.pairs(&mut pairs);
                tw.pairs(&mut pairs);
                common
            }
        };
        common.pairs(&mut pairs);
        (common.config.as_ref(), pairs)
    }

    /// Config file settings overridden by flags.
    pub fn manifest(&self) -> Result<RunManifest> {
        let (config, pairs) = self.settings();
        let mut settings: BTreeMap<String, String> = match config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        for (k, v) in pairs {
            settings.insert(k.to_string(), v);
        }
        RunManifest::resolve(self.name(), &settings)
    }
}

pub fn execute(command: &Command) -> Result<Status> {
    let manifest = command.manifest()?;
    match command {
        Command::Ingest { .. } => commands::ingest(&manifest),
        Command::Estimate { .. } => commands::estimate(&manifest),
        Command::Scan { .. } => commands::scan(&manifest),
        Command::Shares { .. } => commands::shares(&manifest),
        Command::Sampleframe { .. } => commands::sampleframe(&manifest),
        Command::Simulate { .. } => commands::simulate(&manifest),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(Status::Complete) => EXIT_OK,
        Ok(Status::Partial) => EXIT_PARTIAL,
        Ok(Status::Failed) => EXIT_FATAL,
        Err(e) => {
            eprintln!("paretail: {e}");
            match e {
                AppError::Usage(_) => EXIT_USAGE,
                _ => EXIT_FATAL,
            }
        }
    }
}
