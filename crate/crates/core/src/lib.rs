//! Ground-state geometry of the parametrically driven Kerr resonator.
//!
//! - [`model`]: truncated Fock-space Hamiltonian, parity blocks, gauge phases.
//! - [`eigen`]: implicit-QL tridiagonal eigensolver and ground states.
//! - [`analytic`]: closed-form normal and superradiant phase solutions.
//! - [`qgt`]: quantum geometric tensor by spectral sums and overlaps.
//! - [`scaling`]: peak location, power-law and collapse fits.
//! - [`pipeline`]: the end-to-end finite-size-scaling studies.

pub mod analytic;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod model;
pub mod pipeline;
pub mod qgt;
pub mod scaling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
