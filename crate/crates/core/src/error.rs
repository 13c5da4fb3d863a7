//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has (near-)zero variance")]
    ConstantColumn(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("requested rank {requested} exceeds the maximum {max}")]
    RankTooLarge { requested: usize, max: usize },

    #[error("covariance is numerically singular (min eigenvalue {min_eigenvalue:.3e}); increase the ridge")]
    SingularCovariance { min_eigenvalue: f64 },

    #[error("canonical direction has (near-)zero variance on the supplied data")]
    DegenerateDirection,

    #[error("sensitive attribute is degenerate: both groups must be present")]
    DegenerateAttribute,

    #[error("data is already orthogonal to the sensitive attribute; nothing to remove")]
    AttributeOrthogonal,

    #[error("joint covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPSD { min_eigenvalue: f64 },

    #[error("generated labels are degenerate: all combined scores equal")]
    DegenerateLabels,

    #[error("dataset generation kept producing degenerate attributes/labels after {0} attempts")]
    RetryExhausted(usize),

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("solver failed to converge within {passes} passes")]
    NonConvergence { passes: usize },

    #[error("class {class} has only {count} members; {k}-fold stratification needs at least {k}")]
    ClassTooSmall { class: u8, count: usize, k: usize },

    #[error("baseline entry {0} is zero; percentage change undefined")]
    ZeroBaseline(usize),

    #[error("evaluation frame is missing one of the two groups")]
    MissingGroup,

    #[error("sample size {n} outside the supported range {min}..={max}")]
    SampleTooSmall { n: usize, min: usize, max: usize },

    #[error("all sample values are equal; test statistic undefined")]
    ConstantSample,

    #[error("paired differences have zero variance")]
    ZeroVariance,

    #[error("all paired differences are zero")]
    AllZeroDifferences,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model JSON malformed: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
