//! Numerical probes of the Carleman estimates: the interior estimate for the
//! conjugated bi-wave operator and the boundary estimate with its face-sign
//! structure. The probes verify boundedness trends of the empirical constant
//! across an h-sweep — the theorems are asymptotic with existential
//! constants, so a numeric artifact can only corroborate or falsify.

pub mod boundary;
pub mod conjugate;
pub mod error;
pub mod interior;
pub mod report;

pub use boundary::{probe_boundary_estimate, BoundaryProbeReport};
pub use conjugate::{conjugate_apply, ConjugateVariant};
pub use error::CarlemanError;
pub use interior::probe_interior_estimate;
pub use report::CarlemanReport;

/// Guard: in the convexified weight the proof regime is `h ≪ ε`; enforce
/// `h ≤ ε/5`.
pub const CONVEXIFIED_H_FACTOR: f64 = 5.0;
/// Default ε for the convexified weight `φ_ε`.
pub const DEFAULT_EPS: f64 = 0.25;
