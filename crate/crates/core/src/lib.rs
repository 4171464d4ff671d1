//! Pseudospectral simulation of the kinetic derivative nonlinear Schrödinger
//! equation `∂_t u - i∂²_x u = α∂_x(|u|²u) + β∂_x[H(|u|²)u]` on the torus.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod nonlinearity;
pub mod propagator;
pub mod spectral;

pub use error::{KdnlsError, Result};
