//! Forward solver for the perturbed bi-wave initial-boundary value problem.
//!
//! The fourth-order equation `𝓛u = □²u + A□u + B∂tu + C·∇u + qu = 0` is
//! solved through the equivalent 2×2 wave system for `(u, w)`, `w = □u`:
//!
//! ```text
//! □u = w (+ s_u)
//! □w + B∂tu + C·∇u + qu + Aw = 0 (+ s_w)
//! ```
//!
//! stepped by explicit leapfrog with strong Dirichlet data `(u,w) = (f,g)`
//! on Σ and the initial pairs built from `(ψ₀..ψ₃)`. The optional source
//! pair exists for manufactured-solution verification only.

pub mod data;
pub mod energy;
pub mod error;
pub mod ibvp;
pub mod measure;
pub mod system;

pub use data::IbvpData;
pub use energy::{energy_report, EnergyReport};
pub use error::SolverError;
pub use ibvp::{solve_ibvp, SystemState};
pub use measure::{measurement_operator, measure_state, MeasurementBundle, TraceSource};
pub use system::SystemOperator;
