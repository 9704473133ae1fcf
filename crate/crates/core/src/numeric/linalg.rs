use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use super::C64;
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::tolerance::Tolerances;

/// Dense complex vector with finite entries and dimension at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(v: DVector<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(i) = v
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(v))
    }

    pub fn from_slice(entries: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(entries))
    }

    /// Real entries, a convenience for fixtures.
    pub fn from_reals(entries: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DVector::zeros(dim))
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub(crate) fn from_trusted(v: DVector<C64>) -> Self {
        debug_assert!(!v.is_empty());
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<C64> {
        self.0
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.dotc(&other.0))
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.0.norm();
        if !(n > 0.0) {
            return Err(Error::NotNormalized(n));
        }
        Ok(StateVector(Self(self.0.unscale(n))))
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of_complex("vector", &[self.dim()], self.0.as_slice())
    }
}

impl Deref for ComplexVector {
    type Target = DVector<C64>;
    fn deref(&self) -> &DVector<C64> {
        &self.0
    }
}

/// A [`ComplexVector`] of unit norm; houses pre-, post- and orthogonal states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(ComplexVector);

impl StateVector {
    /// Accepts `v` only if `| ||v|| - 1 | <= 1e-12`.
    pub fn new(v: ComplexVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > Tolerances::DEFAULT.construction {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(v))
    }

    pub fn from_slice(entries: &[C64]) -> Result<Self> {
        Self::new(ComplexVector::from_slice(entries)?)
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_amplitudes(entries: &[C64]) -> Result<Self> {
        ComplexVector::from_slice(entries)?.normalized()
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self(ComplexVector::basis(dim, index)?))
    }

    pub(crate) fn from_trusted(v: DVector<C64>) -> Self {
        Self(ComplexVector::from_trusted(v))
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn into_vector(self) -> ComplexVector {
        self.0
    }
}

impl Deref for StateVector {
    type Target = ComplexVector;
    fn deref(&self) -> &ComplexVector {
        &self.0
    }
}

/// Square dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        // nalgebra storage is column-major; report a row-major flat index
        if let Some((r, col)) = (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |col| (r, col)))
            .find(|&(r, col)| !m[(r, col)].re.is_finite() || !m[(r, col)].im.is_finite())
        {
            return Err(Error::NonFinite(r * m.ncols() + col));
        }
        Ok(Self(m))
    }

    /// Builds from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `|u><v|`.
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Result<Self> {
        check_dim(u.dim(), v.dim())?;
        Ok(Self(u.as_dvector() * v.as_dvector().adjoint()))
    }

    pub(crate) fn from_trusted(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square() && m.nrows() > 0);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self(self.0.adjoint())
    }

    /// `max_ij |M_ij - conj(M_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Hermitian within `construction * max(1, max|M_ij|)`.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= Tolerances::DEFAULT.construction * self.max_abs().max(1.0)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(ComplexVector::from_trusted(&self.0 * v.as_dvector()))
    }

    /// `<u|M|v>`.
    pub fn sandwich(&self, u: &ComplexVector, v: &ComplexVector) -> Result<C64> {
        check_dim(self.dim(), u.dim())?;
        check_dim(self.dim(), v.dim())?;
        Ok(u.as_dvector().dotc(&(&self.0 * v.as_dvector())))
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        Self(&self.0 * s)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0 - &other.0 * &self.0))
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let n = self.dim();
        let row_major: Vec<C64> = (0..n)
            .flat_map(|r| (0..n).map(move |col| (r, col)))
            .map(|(r, col)| self.0[(r, col)])
            .collect();
        Fingerprint::of_complex("matrix", &[n, n], &row_major)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;
    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::ShapeMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Component of `v` orthogonal to the unit vector `anchor`, and its norm.
///
/// Uses two Gram-Schmidt passes so the residual overlap stays at roundoff
/// level relative to `||v||` even when `v` is nearly parallel to `anchor`.
pub fn orthogonal_component(
    anchor: &StateVector,
    v: &ComplexVector,
) -> Result<(ComplexVector, f64)> {
    check_dim(anchor.dim(), v.dim())?;
    let a = anchor.as_dvector();
    let mut w = v.as_dvector().clone();
    for _ in 0..2 {
        let proj = a.dotc(&w);
        w.axpy(-proj, a, C64::new(1.0, 0.0));
    }
    let n = w.norm();
    Ok((ComplexVector::from_trusted(w), n))
}
