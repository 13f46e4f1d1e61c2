use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("points coincide; an arc needs distinct endpoints")]
    DegeneratePoint,
    #[error("subtree is empty")]
    EmptySubtree,
    #[error("region is not connected")]
    NotConnected,
    #[error("composition exceeded the piece budget ({0} pieces)")]
    BudgetExceeded(usize),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("certified core unavailable: eventual image is only an enclosure")]
    CoreUncertified,
    #[error("no preimage on the bracketing geodesic: {0}")]
    SolverFailure(String),
    #[error("orbit avoidance undecided: {0}")]
    UndecidedAvoidance(String),
    #[error("inconsistent verdicts: {0}")]
    Inconsistency(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
