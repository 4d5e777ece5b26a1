use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("F_p^{from} does not embed in F_p^{to}")]
    NoEmbedding { from: u32, to: u32 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("duplicate exponent {0}")]
    DuplicateExponent(u64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
