use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bracket ({lo}, {mid}, {hi}): {reason}")]
    BracketInvalid {
        lo: f64,
        mid: f64,
        hi: f64,
        reason: &'static str,
    },
    #[error("no convergence after {iterations} iterations (interval width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },
    #[error("no bracket found starting at {start}: objective unbounded or monotone over the search span")]
    NoBracketFound { start: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),

    #[error("potential evaluated outside its domain at r = {0}")]
    DomainViolation(f64),
    #[error("invalid potential shape: {0}")]
    InvalidShape(String),
    #[error("cannot parse potential term {term:?}: {reason}")]
    Parse { term: String, reason: String },
    #[error("base potential has vanishing slope at t = {0}")]
    DegenerateBase(f64),
    #[error("transformation is not increasing at t = {t} (slope {slope})")]
    NonMonotone { t: f64, slope: f64 },
    #[error("transformation has indefinite convexity on the sampled domain")]
    IndefiniteConvexity,

    #[error("unsupported power-law exponent q = {0} (need q != 0 and q > -2)")]
    UnsupportedExponent(f64),
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),
    #[error("base potential does not match the spectrum: {0}")]
    BaseMismatch(String),
    #[error("no envelope trial-function family for base exponent {q} in {mode} mode")]
    NoTrialFamily { q: f64, mode: &'static str },
    #[error("trial function fails the eigenfunction residual check (residual {0:e})")]
    TrialResidual(f64),

    #[error("kinetic potential is not decreasing at s = {s} (slope {slope})")]
    NonAttractive { s: f64, slope: f64 },

    #[error("local energy is unbounded in the inner extremum")]
    UnboundedInner,
    #[error("no critical parameter exists at r = {0}")]
    NoRoot(f64),
    #[error("trial function vanishes at r = {0}")]
    TrialZero(f64),

    #[error("no bound state with {nodes} nodes below energy {ceiling}")]
    NoBoundState { nodes: u32, ceiling: f64 },
    #[error("eigenfunction not decayed at r_max = {r_max} (tail ratio {tail:e})")]
    TruncationTooSmall { r_max: f64, tail: f64 },
}
