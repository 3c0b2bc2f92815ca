use thiserror::Error;

#[derive(Debug, Error)]
pub enum GoError {
    #[error(transparent)]
    Core(#[from] bwlab_core::CoreError),

    #[error("amplitude a0 does not satisfy T²a0 = 0 within tolerance: residual {residual:e} > {tol:e}")]
    TransportResidual { residual: f64, tol: f64 },

    #[error("scale separation violated: h = {h} < {min_h} = 10·max(dt,dx)")]
    ScaleSeparation { h: f64, min_h: f64 },

    #[error("h-sweep needs at least {min} values, got {got}")]
    SweepTooShort { min: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, GoError>;
