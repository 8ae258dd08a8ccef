use thiserror::Error;

/// Errors raised by every stage of the clustering pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series length {0} is not a power of two (at least 4)")]
    NonDyadicLength(usize),
    #[error("input contains a non-finite value at position {0}")]
    NonFiniteInput(usize),
    #[error("decomposition levels {levels} out of range 1..={max}")]
    InvalidLevels { levels: usize, max: usize },
    #[error("coefficient pyramid is inconsistent: {0}")]
    InconsistentPyramid(String),
    #[error("wavelet band {0} has (near) zero norm; its log-energy is undefined")]
    DegenerateScale(usize),
    #[error("curve has zero norm")]
    ZeroNormCurve,
    #[error("unknown wavelet filter `{0}`")]
    UnknownWavelet(String),

    #[error("empty or too small input: {0}")]
    EmptyInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("covariate column {0} has zero variance")]
    DegenerateCovariates(usize),
    #[error("kernel neighbourhood of index value {0} is empty")]
    EmptyNeighborhood(f64),
    #[error("index optimizer found no finite loss")]
    OptimizerFailure,
    #[error("covariate effect for curve {0} is not positive")]
    NonPositiveEffect(usize),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("value {0} lies outside the density grid")]
    GridMismatch(f64),
    #[error("mixture component {0} became empty")]
    EmptyComponent(usize),
    #[error("invalid number of components {l} for {n} observations")]
    InvalidL { l: usize, n: usize },
    #[error("need at least two log-likelihood values, got {0}")]
    TooFewValues(usize),
    #[error("invalid bandwidth {0}")]
    InvalidBandwidth(f64),

    #[error("invalid scenario {0} (expected 1, 2 or 3)")]
    InvalidScenario(u8),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("partition lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),

    #[error("series is empty")]
    EmptySeries,
    #[error("population must be positive, got {0}")]
    NonPositivePopulation(f64),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
