//! Small dense complex linear algebra and seeded sampling.
//!
//! Everything here is backed by `nalgebra` dense storage. The newtypes add
//! the construction-time checks the rest of the crate relies on (finite
//! entries, square shape, normalization) and the conventions that make
//! results reproducible (ascending spectra, phase-fixed eigenvectors).

mod eigen;
pub(crate) mod linalg;
mod sampling;

pub use eigen::{
    eigendecompose_hermitian, eigendecompose_hermitian_with, EigenGroup, SpectralDecomposition,
};
pub use linalg::{orthogonal_component, ComplexMatrix, ComplexVector, StateVector};
pub use sampling::{
    haar_random_state, random_hermitian, random_orthogonal_state, sample_complex_gaussian,
    sample_haar_state, sample_hermitian, Seed,
};

pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);
