use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("a network needs at least one functional unit")]
    NoUnits,

    #[error("edge (u{unit}, s{spare}) is out of range for {n_units} units and {n_spares} spares")]
    EdgeOutOfRange {
        unit: usize,
        spare: usize,
        n_units: usize,
        n_spares: usize,
    },

    #[error("{node} is out of range")]
    NodeOutOfRange { node: String },

    #[error("requested {requested} edges but only {capacity} cells exist")]
    TooManyEdges { requested: usize, capacity: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node set mixes functional units and spare units")]
    MixedSides,

    #[error("spare s{0} has already been consumed")]
    ConsumedSpare(usize),

    #[error("spare s{spare} is not a live neighbor of unit u{unit}")]
    NotAdjacent { unit: usize, spare: usize },

    #[error("immediate replacement failure: no live spare for unit u{unit}")]
    ImmediateReplacementFailure { unit: usize },

    #[error("scripted policy ran out of choices at step {step}")]
    ScriptExhausted { step: usize },

    #[error("operation requires the lowest-index tie-break mode")]
    NondeterministicPolicy,

    #[error("{what}: needs at least {needed} visits, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u64,
    },

    #[error("count overflow while enumerating {0}")]
    Overflow(&'static str),

    #[error("network is complete, no edge can be added")]
    CompleteNetwork,

    #[error("empty fault-count range")]
    EmptyRange,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
