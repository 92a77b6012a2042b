use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum IsacError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not Hermitian PSD: {0}")]
    NotPsd(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// No transmit power reaches the target direction, so the DoA is not identifiable.
    #[error("target DoA unobservable: no transmit power toward the target")]
    Unobservable,

    #[error("SINR threshold {gamma0:.6e} infeasible (bound P|h|^2/sigma_c^2 = {bound:.6e})")]
    Infeasible { gamma0: f64, bound: f64 },

    #[error("covariance rank {rank} exceeds symbol count {symbols}")]
    RankTooHigh { rank: usize, symbols: usize },

    #[error("received block carries no energy")]
    DegenerateSamples,

    #[error("barrier solver did not converge at SCA iteration {iteration} (gap estimate {gap:.3e})")]
    SolverFailure { iteration: usize, gap: f64 },

    #[error("self-check failed: {0}")]
    CheckFailed(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, IsacError>;

impl IsacError {
    /// Process exit code for the CLI: 2 for configuration or I/O problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            IsacError::InvalidConfig(_) | IsacError::Io(_) | IsacError::Parse(_) => 2,
            _ => 1,
        }
    }
}
