use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("oracle refuses a model with {states} states (limit {limit})")]
    OracleCap { states: usize, limit: usize },

    #[error("unsupported query: {0}")]
    Unsupported(String),

    #[error("strategy failure: {0}")]
    Strategy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
