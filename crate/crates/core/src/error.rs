use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {needed} income groups, found {found}")]
    InsufficientGroups { needed: usize, found: usize },

    #[error("thresholds must strictly decrease with group index (violation at group {index})")]
    NonMonotoneThresholds { index: usize },

    #[error("every income group has a zero count")]
    AllGroupsEmpty,

    #[error("tabulations share no thresholds beyond the bottom; {groups} group(s) would remain")]
    EmptyIntersection { groups: usize },

    #[error("tabulations do not line up: {0}")]
    Mismatch(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("minimizer hit the search boundary at alpha = {alpha}; the tail may have alpha <= 1 or the model misfits")]
    BoundaryHit { alpha: f64 },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fractile {p} lies outside the curve range [{min}, {max}]; extrapolation is not supported")]
    Extrapolation { p: f64, min: f64, max: f64 },

    #[error("no pair of thresholds brackets the top {target} tail fraction")]
    NoBracket { target: f64 },

    #[error("share ratio implies alpha <= 1 (S(q)/S(p) = {ratio}, q/p = {fractile_ratio})")]
    AlphaAtMostOne { ratio: f64, fractile_ratio: f64 },

    #[error("missing {field} for year {year}")]
    MissingField { field: &'static str, year: i32 },

    #[error("population {n} is smaller than the {required} returns tabulated")]
    PopulationTooSmall { n: f64, required: u64 },

    #[error("top {fraction} holds only {groups} income group(s); need at least 3, use a larger fraction")]
    TooFewTopGroups { fraction: f64, groups: usize },

    #[error("regressor has zero variance")]
    DegenerateRegressor,

    #[error("{failed} of {total} replications failed")]
    TooManyFailures { failed: usize, total: usize },

    #[error("integer overflow while accumulating {0}")]
    Overflow(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
