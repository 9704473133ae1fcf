use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{orthogonal_component, ComplexMatrix, StateVector, C64};
use crate::error::{Error, Result};

/// Seed for a reproducible sample stream.
///
/// Streams come from ChaCha8, whose output is fixed by the seed on every
/// platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// One standard complex Gaussian sample (independent N(0,1) parts).
pub fn sample_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed pure state drawn from `rng`.
pub fn sample_haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let v = DVector::from_fn(dim, |_, _| sample_complex_gaussian(rng));
        let n = v.norm();
        // a zero Gaussian vector has probability zero; redraw if it ever happens
        if n > 0.0 {
            return Ok(StateVector::from_trusted(v.unscale(n)));
        }
    }
}

/// Haar-random state: a normalized standard complex Gaussian vector.
pub fn haar_random_state(dim: usize, seed: Seed) -> Result<StateVector> {
    sample_haar_state(&mut seed.rng(), dim)
}

/// GUE-style Hermitian matrix `(G + G^dagger)/2` drawn from `rng`.
pub fn sample_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "scale",
            reason: format!("must be positive and finite, got {scale}"),
        });
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| sample_complex_gaussian(rng) * scale);
    // elementwise symmetrization is exactly Hermitian in floating point
    let h = DMatrix::from_fn(dim, dim, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
    ComplexMatrix::new(h)
}

pub fn random_hermitian(dim: usize, seed: Seed, scale: f64) -> Result<ComplexMatrix> {
    sample_hermitian(&mut seed.rng(), dim, scale)
}

/// Random unit vector orthogonal to `anchor`: a Haar draw with the anchor
/// component removed.
pub fn random_orthogonal_state(anchor: &StateVector, seed: Seed) -> Result<StateVector> {
    let dim = anchor.dim();
    if dim < 2 {
        return Err(Error::ContractViolation(
            "no orthogonal complement in dimension 1".into(),
        ));
    }
    let mut rng = seed.rng();
    loop {
        let v = sample_haar_state(&mut rng, dim)?;
        let (w, n) = orthogonal_component(anchor, &v)?;
        // redraw when v is almost parallel to the anchor
        if n > 1e-3 {
            return w.normalized();
        }
    }
}
