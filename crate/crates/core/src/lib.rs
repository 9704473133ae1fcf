//! Weak values, non-Hermitian weak operators, and numerically certified
//! uncertainty and complementarity relations for pre- and post-selected
//! ensembles.
//!
//! Layers, bottom up:
//!
//! * [`numeric`]: dense complex linear algebra and seeded sampling.
//! * [`model`]: observables, pre/post-selected ensembles, weak values and
//!   the weak operator `A_w = |phi><phi| A / k`.
//! * [`relations`]: non-Hermitian variances, the generalized Vaidman
//!   decomposition and the sum-of-variance uncertainty relations.
//! * [`complementarity`]: projector weak values in finite dimension and on
//!   a discretized position/momentum grid.
//! * [`pointer`]: exact von Neumann system-meter simulation and weak-value
//!   readout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complementarity;
pub mod error;
pub mod fingerprint;
pub mod model;
pub mod numeric;
pub mod pointer;
pub mod relations;
pub mod tolerance;

pub use error::{Error, Result};
pub use fingerprint::Fingerprint;
pub use tolerance::Tolerances;
