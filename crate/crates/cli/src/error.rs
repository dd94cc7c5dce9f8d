use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lcft::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

/// Exit codes: 0 ok, 1 violation, 2 configuration, 3 precision or budget.
pub fn exit_code_of(e: &lcft::Error) -> i32 {
    use lcft::Error::*;
    match e {
        Config(_) | InvalidBase(_) | NotEisenstein(_) | UnsupportedDegree(_) | NotGalois { .. } | IncompatibleTower(_) => 2,
        ResidueBudgetExceeded { .. } | PrecisionLoss(_) | HenselFails(_) | Unstable(_) | NotInvertible | ZeroComponent(_) => 3,
        _ => 1,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => exit_code_of(e),
            CliError::Io(_) => 1,
        }
    }
}
