//! Dense complex linear algebra: the matrix type, factorizations, solves and
//! random matrix sampling.

mod matrix;
mod random;
pub mod rng;
mod solve;
mod svd;

pub use matrix::ComplexMatrix;
pub use random::{complex_normal, gaussian_matrix, haar_unitary};
pub use solve::{hermitian_solve, HERMITIAN_TOL};
pub use svd::{compact_svd, principal_angles, singular_values, CompactSvd, DEFAULT_RANK_TOL};
