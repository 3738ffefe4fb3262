use intercausal::copositivity::CopositivityError;
use intercausal::{ModelError, OracleError, SynergyError};

/// Failure of a command, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input file, unknown names, malformed options.
    #[error("{0}")]
    Input(String),
    /// The analysis does not apply to this network.
    #[error("refused: {0}")]
    Refused(String),
    /// A size limit was hit.
    #[error("limit reached: {0}")]
    Limit(String),
}

impl CliError {
    pub fn status(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused(_) => 2,
            CliError::Limit(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::StateSpaceTooLarge { .. } => CliError::Limit(e.to_string()),
            OracleError::NotBinary(_) | OracleError::NotRoot(_) => CliError::Refused(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SynergyError> for CliError {
    fn from(e: SynergyError) -> Self {
        match e {
            SynergyError::Oracle(inner) => inner.into(),
            SynergyError::Model(inner) => inner.into(),
            SynergyError::Copositivity(CopositivityError::DimensionLimit { .. }) => CliError::Limit(e.to_string()),
            SynergyError::Dependent(_) | SynergyError::NotBinary(_) => CliError::Refused(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
