use thiserror::Error;

/// Hard cap on register width: 2^24 complex amplitudes is the largest state
/// this simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Cap for explicit Kronecker expansion (a 2^n x 2^n dense matrix).
pub const MAX_KRON_QUBITS: usize = 12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("capacity exceeded: {requested} qubits (max {max})")]
    Capacity { requested: usize, max: usize },

    #[error("period extraction failed after {trials} trials")]
    ExtractionFailure { trials: usize },
}

impl SimError {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }

    pub fn invalid_state(msg: impl Into<String>) -> Self {
        SimError::InvalidState(msg.into())
    }

    pub fn capacity(requested: usize) -> Self {
        SimError::Capacity {
            requested,
            max: MAX_QUBITS,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
