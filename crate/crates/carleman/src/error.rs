use thiserror::Error;

#[derive(Debug, Error)]
pub enum CarlemanError {
    #[error(transparent)]
    Core(#[from] bwlab_core::CoreError),

    #[error("scale separation violated: h = {h} < {min_h}")]
    ScaleSeparation { h: f64, min_h: f64 },

    #[error("convexified-weight regime violated: h = {h} > eps/{factor} = {max_h}")]
    ConvexifiedRegime { h: f64, max_h: f64, factor: f64 },

    #[error("epsilon out of (0,1): {0}")]
    BadEps(f64),

    #[error("h-sweep must be strictly decreasing with at least {min} entries")]
    BadSweep { min: usize },

    #[error("test function violates the vanishing conditions: {which} = {value:e} (tol {tol:e})")]
    VanishingViolated { which: String, value: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, CarlemanError>;
