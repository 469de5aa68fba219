//! Linear-algebra kernels: sparse SPD factorization, Schur condensation
//! onto boundary sets, and the dense definite generalized eigenproblem.

mod dense;
mod schur;
mod sparse;

pub use dense::{multiplets, sym_generalized_eig, DenseSym, GeneralizedEig};
pub use schur::{condense, schur_complement, Condensation, DofPartition};
pub use sparse::{factor_spd, solve, Factor, PIVOT_TOL};
