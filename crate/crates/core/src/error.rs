use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeplexError {
    #[error("decision point {point} lies on a parent cycle")]
    CycleDetected { point: usize },
    #[error("decision point {point} lists {count} parent sequences")]
    MultipleParents { point: usize, count: usize },
    #[error("decision point {point} is listed under parent sequence {seq} more than once")]
    OverlappingChildren { point: usize, seq: usize },
    #[error("decision point {point} is ordered before its parent decision point {parent}")]
    BadTopoOrder { point: usize, parent: usize },
    #[error("unknown id {id}")]
    UnknownId { id: usize },
    #[error("decision point {point} has no actions")]
    NoActions { point: usize },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("unknown game '{0}'")]
    UnknownGame(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Treeplex(#[from] TreeplexError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegularizerError {
    #[error("center entry {index} is {value}, entropy needs a strictly positive center")]
    CenterNotInterior { index: usize, value: f64 },
    #[error("non-finite input at index {index}")]
    NonFiniteInput { index: usize },
    #[error("non-positive weight {0}")]
    BadWeight(f64),
    #[error(transparent)]
    Treeplex(#[from] TreeplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("treeplex has no decision points")]
    EmptyTreeplex,
    #[error("decision point {point} appears in no block")]
    Missing { point: usize },
    #[error("decision point {point} appears in more than one block")]
    Duplicate { point: usize },
    #[error("unknown decision point {point}")]
    UnknownPoint { point: usize },
    #[error("block {i} holds {j}, an ancestor of {j_desc} in later block {i_desc}")]
    Violation {
        i: usize,
        i_desc: usize,
        j: usize,
        j_desc: usize,
    },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Regularizer(#[from] RegularizerError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Treeplex(#[from] TreeplexError),
}
