//! CLI error type with the exit-code mapping:
//! 2 = configuration error, 3 = data error, 4 = numerical failure.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error in {file} at row {row}, column {col}: {message}")]
    Parse {
        file: String,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("{0}")]
    Core(#[from] faircca_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use faircca_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Parse { .. } | CliError::Io(_) => 3,
            CliError::Core(core) => match core {
                E::InvalidParameter(_) | E::RankTooLarge { .. } | E::ZeroBaseline(_) => 2,
                E::ConstantColumn(_)
                | E::ShapeMismatch(_)
                | E::DegenerateAttribute
                | E::MissingGroup
                | E::SingleClass
                | E::ClassTooSmall { .. }
                | E::SampleTooSmall { .. }
                | E::ConstantSample
                | E::ZeroVariance
                | E::AllZeroDifferences
                | E::ModelFormat(_) => 3,
                E::SingularCovariance { .. }
                | E::DegenerateDirection
                | E::AttributeOrthogonal
                | E::NotPSD { .. }
                | E::DegenerateLabels
                | E::RetryExhausted(_)
                | E::NonConvergence { .. } => 4,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
