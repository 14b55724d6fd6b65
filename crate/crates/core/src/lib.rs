//! Finite element solver for the fractional Dirichlet problem
//! `(-Δ)^s u + V u = |u|^{p-2} u` on bounded domains in 1D and 2D.

pub mod error;
pub mod kernel;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod assembly;
pub mod spectral;
pub mod variational;
pub mod solver;
pub mod limit;
pub mod studies;
pub mod io;

pub use error::{Error, Result};
