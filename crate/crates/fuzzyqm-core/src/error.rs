//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical laboratory.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Bad parameters detected before any computation starts.
    #[error("configuration error: {0}")]
    Config(String),

    /// A computation produced or encountered non-finite values.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Input is structurally valid but carries no usable information.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}
