//! Exponentially growing and decaying geometric-optics solutions of the
//! perturbed bi-wave operator: characteristic transport integration, the
//! two-term amplitude hierarchy, adjoint coefficients, assembly of the
//! oscillatory fields, and the `O(h⁴)` residual-order verification.

pub mod ansatz;
pub mod amplitudes;
pub mod error;
pub mod residual;
pub mod transport;

pub use amplitudes::{adjoint_coefficients, build_amplitudes, transport_rhs, AmplitudeWeight};
pub use ansatz::{assemble_go_field, A0Form, GOAnsatz, GoSign};
pub use error::GoError;
pub use residual::{verify_residual_order, ResidualOrderReport};
pub use transport::transport_integrate;
