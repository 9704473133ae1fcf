//! Weak values of non-commuting projectors.
//!
//! [`projector_weak_value_pair`] covers rank-one projectors in finite
//! dimension, where the product of the two reverse-order weak values is
//! `|<a|b>|^2` regardless of the pre-selection. The grid half of the module
//! realizes position and momentum window projectors on a uniform grid with a
//! unitary discrete Fourier transform as the change of basis.

mod cv;
mod finite;
mod grid;
mod window;

pub use cv::{
    cv_product_study, cv_weak_value, refinement_study, GridWavefunction, ProductRow, ProductStudy,
    RefinementStep,
};
pub use finite::{
    anomalous_decomposition, complementarity_check, projector_weak_value_pair,
    wavefunction_bridge_check, AnomalousParts, ProjectorWeakValuePair,
};
pub use grid::{build_cv_grid, CVGrid};
pub use window::{window_projector, Domain, WindowProjector};
