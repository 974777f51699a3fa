use thiserror::Error;

use crate::lattice::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice level k={0} is out of range (supported: 1..={max})", max = crate::lattice::MAX_LEVEL)]
    InvalidLevel(u32),

    #[error("stage {stage} is out of range for level k={k}")]
    InvalidStage { stage: u32, k: u32 },

    #[error("expected a cycle, but the edge set has {0} syndrome vertices")]
    NonCycleInput(usize),

    #[error("vertex {vertex} is not on the stage-{stage} sublattice")]
    NotInSublattice { vertex: Vertex, stage: u32 },

    #[error("invalid syndrome: {0}")]
    InvalidSyndrome(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("search budget exceeded: {needed} patterns required, budget is {budget}")]
    SearchBudgetExceeded { needed: u128, budget: u128 },

    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
