use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| entry = {0:e}")]
    NotHermitian(f64),

    #[error("vector is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("spectral gap undefined: a single distinct eigenvalue")]
    UndefinedGap,

    #[error("jump operator norm {0} exceeds 1; rescale it and the evolution time together")]
    JumpNorm(f64),

    #[error("{what} of size {size} exceeds the cap {cap}")]
    Cap { what: &'static str, size: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{steps} steps exceed the default limit; pass the explicit override to proceed")]
    StepOverride { steps: u64 },

    #[error("jump operators do not commute in the vectorized picture (max commutator norm {0:e})")]
    NonCommuting(f64),

    #[error("numerical guard tripped: {0}")]
    NumericalGuard(String),
}

impl Error {
    /// Errors caused by inputs rather than by a failure inside the library.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NumericalGuard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
