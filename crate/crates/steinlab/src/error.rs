use thiserror::Error;

/// Errors produced by operator construction and linear-algebra operations.
#[derive(Debug, Error)]
pub enum OpError {
    #[error("dense dimension {0} exceeds cap {1}")]
    CapExceeded(usize, usize),

    #[error("invalid subsystem selection: {0}")]
    BadSubsystem(String),

    #[error("operator is not positive semi-definite (min eigenvalue {0})")]
    NotPsd(f64),

    #[error("eigensolver did not converge after {0} sweeps (off-diagonal norm {1})")]
    EigFailure(usize, f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("trace {0} is not 1 within tolerance")]
    BadTrace(f64),

    #[error("invalid argument: {0}")]
    BadArgument(String),
}

pub type Result<T> = std::result::Result<T, OpError>;
