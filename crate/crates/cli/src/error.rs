use thiserror::Error;

use mpverify::combinatorics::CombinatoricsError;
use mpverify::concentration::ConcentrationError;
use mpverify::linalg::LinalgError;
use mpverify::models::ModelError;
use mpverify::mplaw::MpLawError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot parse config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    MpLaw(#[from] MpLawError),
    #[error(transparent)]
    Concentration(#[from] ConcentrationError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the config or flags, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::Json(_)
            | CliError::Model(_)
            | CliError::Combinatorics(CombinatoricsError::Precondition(_))
            | CliError::Combinatorics(CombinatoricsError::Budget { .. })
            | CliError::Concentration(ConcentrationError::TooFewSamples(_))
            | CliError::Concentration(ConcentrationError::DimensionMismatch(_))
            | CliError::Concentration(ConcentrationError::Model(_))
            | CliError::Concentration(ConcentrationError::Unsupported(_))
            | CliError::MpLaw(MpLawError::InvalidParameter(_))
            | CliError::MpLaw(MpLawError::InvalidMixture(_)) => 2,
            _ => 1,
        }
    }
}
