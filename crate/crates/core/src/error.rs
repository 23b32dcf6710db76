use thiserror::Error;

use crate::evaluator::Method;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{method} method is not applicable: {reason}")]
    Inapplicable { method: Method, reason: String },
    #[error("could not certify root {k} of P_{n}")]
    UncertifiedRoot { n: u64, k: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
