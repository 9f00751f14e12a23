use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An element or argument does not fit the group realization (wrong arity,
    /// residue out of range, mismatched spec).
    #[error("structural error: {0}")]
    Structure(String),

    /// The requested operation is not defined for this group kind or input shape.
    #[error("capability error: {0}")]
    Capability(String),

    /// A bad argument (empty window, non-symmetric generating set, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// Integer overflow in exact element arithmetic.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// An enumeration exceeded its configured element cap.
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    /// An exhaustive search exceeded its candidate budget. Carries the best
    /// lower bound found so far.
    #[error("search budget exceeded (best lower bound {lower_bound})")]
    BudgetExceeded { lower_bound: usize },

    /// A group element is outside every materialized ball of the action.
    #[error("element outside cached balls: enumerate a larger ball (need radius > {radius})")]
    EnlargeBall { radius: u32 },

    /// Coset enumeration did not close at the given seed radius.
    #[error("incomplete transversal: coset enumeration did not close at seed radius {0}")]
    IncompleteTransversal(u32),

    /// A membership predicate could not decide an element within its
    /// verification ball.
    #[error("insufficient ball: membership predicate cannot decide {0}")]
    InsufficientBall(String),

    /// A construction precondition failed; the message names the witness.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A parameter schedule is infeasible (names the failing level).
    #[error("infeasible construction at level {level}: {reason}")]
    Infeasible { level: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
