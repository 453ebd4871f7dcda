use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Error categories map onto CLI exit codes via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("generator A{index} out of range (generator count {count})")]
    GeneratorOutOfRange { index: usize, count: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("term count exceeds cap {cap}")]
    TermCap { cap: usize },

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("word length {len} exceeds partition cap {cap}")]
    PartitionCap { len: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("state is not tracial")]
    NotTracial,

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("numerical fault: {0}")]
    Numerical(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// 2 for configuration/input errors, 3 for cap violations, 4 for
    /// numerical faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegreeCap { .. }
            | Error::TermCap { .. }
            | Error::DimensionCap { .. }
            | Error::PartitionCap { .. } => 3,
            Error::NotHermitian { .. }
            | Error::Eigen(_)
            | Error::Numerical(_)
            | Error::Internal(_) => 4,
            _ => 2,
        }
    }
}
