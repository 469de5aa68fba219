//! Steklov eigenvalue laboratory.
//!
//! Computes Dirichlet-to-Neumann spectra of triangulated surfaces with
//! boundary and studies what happens to them when a thin flat strip
//! `[-ε²/2, ε²/2] × [-εh/2, εh/2]` is attached along its two short sides.
//!
//! Layout:
//! - [`mesh`]: intrinsic (edge-length) triangle meshes, builders, arc alignment, glueing.
//! - [`assembly`]: cotangent stiffness and weighted boundary mass.
//! - [`numerics`]: sparse Cholesky, Schur condensation, dense generalized eigensolver.
//! - [`steklov`]: Steklov problems with mixed boundary conditions.
//! - [`analytic`]: closed-form spectra used as oracles.
//! - [`experiments`]: convergence, sweeps, multiplicity search, inequality checks.

pub mod analytic;
pub mod assembly;
pub mod error;
pub mod experiments;
pub mod mesh;
pub mod numerics;
pub mod steklov;

pub use error::{Error, Result};
