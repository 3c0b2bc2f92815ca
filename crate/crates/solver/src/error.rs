use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Core(#[from] bwlab_core::CoreError),

    #[error("CFL violation: dt·sqrt(Σ 1/dx²) = {cfl:.4} ≥ {limit}")]
    CflViolation { cfl: f64, limit: f64 },

    #[error("compatibility defect {defect:e} exceeds tolerance {tol:e} ({which})")]
    Compatibility { which: String, defect: f64, tol: f64 },

    #[error("coefficient magnitude {max:.2} exceeds the stability-tested bound {bound}")]
    CoefficientsTooLarge { max: f64, bound: f64 },

    #[error("instability detected at step {step}: window norm grew by {factor:.2}x (guard {guard}x)")]
    Instability { step: usize, factor: f64, guard: f64 },

    #[error("solver state does not cover the requested trace ({0})")]
    MissingTrace(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
