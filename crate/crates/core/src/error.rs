use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are split between domain errors (bad input) and range errors
/// (a cap on graph order or oracle size was hit); see [`Error::is_range`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph order {0} exceeds the 64-vertex cap")]
    OrderOverflow(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed graph6: {0}")]
    Graph6(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle range: {0}")]
    OracleRange(String),
    #[error("oracle budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("no {family}-free graph exists on {m} vertices")]
    Infeasible { m: usize, family: String },
    #[error("arithmetic overflow evaluating {0}")]
    Overflow(&'static str),
    #[error("cache: {0}")]
    Cache(String),
}

impl Error {
    /// Whether the error comes from a size cap rather than malformed input.
    pub fn is_range(&self) -> bool {
        matches!(
            self,
            Error::OrderOverflow(_)
                | Error::OracleRange(_)
                | Error::BudgetExhausted { .. }
                | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
