use thiserror::Error;

use crate::model::Coalition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown object id `{0}`")]
    UnknownObject(String),

    #[error("unknown agent id `{0}`")]
    UnknownAgent(String),

    #[error("invalid rational `{0}` (expected \"p/q\", an integer, or \"-inf\")")]
    BadRational(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// Enumeration work exceeds the configured budget.
    #[error("size refusal: {what} needs {needed} steps, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },

    #[error("size refusal: {0}")]
    Size(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cycle of length {} among A2 agents: {cycle:?}", cycle.len())]
    LongCycle { cycle: Vec<usize> },

    #[error("witness for coalition {coalition} gives agent {agent} less than its target")]
    WitnessBelowTarget { coalition: Coalition, agent: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
