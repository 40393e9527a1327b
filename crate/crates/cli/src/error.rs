use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for validation and IO errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<twophoton::Error> for CliError {
    fn from(e: twophoton::Error) -> Self {
        use twophoton::Error as E;
        match e {
            E::Numerical(_) | E::Resonance(_) | E::Fit(_) | E::GridMismatch | E::DivisionByZero(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(format!("csv: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
