use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    /// A multiplication table failed one of the group axioms; `witness`
    /// holds the offending element indices.
    #[error("group axiom `{axiom}` fails at {witness:?}")]
    AxiomViolation {
        axiom: &'static str,
        witness: Vec<usize>,
    },

    #[error("element {index} is out of range for a group of order {order}")]
    OutOfRange { index: usize, order: usize },

    #[error("operands live in different groups")]
    GroupMismatch,

    #[error("input set must be non-empty: {0}")]
    EmptySet(&'static str),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("no almost-periods found: {0}")]
    NoPeriods(String),

    #[error("no regular dilate found: {0}")]
    NoRegularDilate(String),

    #[error("modelling failed: {0}")]
    Modelling(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("unknown strategy `{name}`; available: {available}")]
    UnknownStrategy { name: String, available: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
