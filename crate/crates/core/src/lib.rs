//! Core numerics for the bi-wave laboratory: uniform space-time grids over
//! `Q = (0,T) × Ω` with `Ω` an axis-aligned box, scalar/vector grid fields,
//! second-order finite-difference kernels, region quadrature, discrete
//! (semiclassical) Sobolev norms, and the `BWLAB1` array file format.
//!
//! Everything downstream (the bi-wave solver, the geometric-optics builder,
//! the Carleman probes, the ray-transform library and the reconstruction
//! pipeline) is built out of these pieces. All operations are pure with
//! respect to their inputs; fields are immutable once built, and every
//! parallel reduction uses a fixed tree so results are bit-reproducible.

pub mod conjugate;
pub mod coeffs;
pub mod direction;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod norms;
pub mod quadrature;
pub mod reduce;
pub mod stencil;
pub mod synth;

pub use coeffs::CoefficientSet;
pub use direction::{Direction, FrequencyVector};
pub use error::CoreError;
pub use field::{ComplexField, Field, RealField};
pub use grid::{NodeClass, SpaceTimeGrid};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
