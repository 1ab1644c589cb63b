//! Exact dense linear algebra over ℚ.

pub mod eigen;
pub mod matrix;
pub mod modular;
pub mod rational;
pub mod subspace;

pub use eigen::{joint_eigen_decomposition, nilpotence_index, simultaneous_eigenspaces};
pub use matrix::{dot, RationalMatrix, Rref};
pub use rational::Rational;
pub use subspace::{image_basis, kernel_basis, subspace_intersection, subspace_sum, RowSpace, Subspace};
