//! Numerical simulator for universal state orthogonalizers and
//! continuous-variable qubit generators in a truncated bosonic Fock space.
//!
//! - [`fock`]: states, operators, displacement, beam splitter, herald projection.
//! - [`schemes`]: orthogonalizers, qubit operators and the heralded physical models.
//! - [`phase_space`]: Wigner functions, quadrature marginals, detection loss.
//! - [`homodyne`]: simulated homodyne sampling and maximum-likelihood reconstruction.

pub mod error;
pub mod fock;
pub mod homodyne;
pub mod phase_space;
pub mod schemes;

pub use error::{Error, Result};
pub use fock::C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
