use thiserror::Error;

/// Errors raised by the toolkit's operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("negative radius: {0}")]
    NegativeRadius(f64),

    #[error("malformed interval [{0}, {1}]")]
    MalformedInterval(f64, f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("γ infinite: s·n = 1")]
    GammaInfinite,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("one-sided only: t = {0} is a breakpoint")]
    OneSidedOnly(f64),

    #[error("curve vanishes at t = {0}")]
    CurveVanishes(f64),

    #[error("insufficient data: {0} valid grid points, need at least 3")]
    InsufficientData(usize),

    #[error("empty domain: input has no present values")]
    EmptyDomain,

    #[error("out of theorem range: γ = {0}")]
    OutOfTheoremRange(f64),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("superlinearity required: p = {0}")]
    SuperlinearityRequired(f64),

    #[error("not convex: {0}")]
    NotConvex(String),

    #[error("vanishing base function: {0}")]
    Vanishing(String),

    #[error("grid too coarse: h = {0}")]
    GridTooCoarse(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
