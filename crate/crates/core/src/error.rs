use thiserror::Error;

/// Errors raised by the arithmetic and group layers.
///
/// Verification outcomes are never errors: a refuted claim is a report status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(
        "invalid modulus p={p}, k={k}: p must be an odd prime at most 13 and k must be 1 or 2"
    )]
    BadModulus { p: u32, k: u32 },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },

    #[error("{value} is not a unit mod {m}")]
    NotAUnit { value: u32, m: u32 },

    #[error("matrix {0} is not invertible")]
    NotInvertible(String),

    #[error("{0} is not in the kernel of reduction mod p")]
    NotInKernel(String),

    #[error("operation needs k = {expected}, got k = {got}")]
    WrongExponent { expected: u32, got: u32 },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("degenerate pair: D equals its diagonal swap")]
    DegeneratePair,

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
