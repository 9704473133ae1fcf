use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::numeric::{
    eigendecompose_hermitian_with, ComplexMatrix, SpectralDecomposition, StateVector, C64,
};
use crate::tolerance::Tolerances;

/// A Hermitian matrix together with its cached spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let spectrum = eigendecompose_hermitian_with(&matrix, tol)?;
        Ok(Self { matrix, spectrum })
    }

    /// Builds `V diag(eigenvalues) V^dagger` from a known eigenbasis.
    ///
    /// Used where the spectrum is available in closed form (grid momentum,
    /// for instance) and a numerical eigensolve would only add error.
    pub fn from_spectrum(
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<C64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let spectrum = SpectralDecomposition::from_parts(eigenvalues, eigenvectors, tol)?;
        let m = spectrum.reconstruct().into_dmatrix();
        let n = m.nrows();
        let h = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        Ok(Self {
            matrix: ComplexMatrix::new(h)?,
            spectrum,
        })
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::new(ComplexMatrix::from_row_slice(2, &[o, l, l, o]).unwrap()).unwrap()
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self::new(ComplexMatrix::from_row_slice(2, &[o, -i, i, o]).unwrap()).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::new(ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap())
            .unwrap()
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `(a, Pi_a)` for every distinct eigenvalue `a`.
    pub fn projectors(&self) -> Vec<(f64, ComplexMatrix)> {
        self.spectrum
            .groups
            .iter()
            .map(|g| (g.value, self.spectrum.projector(g)))
            .collect()
    }

    /// Worst idempotency defect `max |Pi^2 - Pi|` and completeness defect
    /// `max |sum Pi - 1|` of the spectral projectors.
    pub fn projector_defects(&self) -> (f64, f64) {
        let n = self.dim();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        let mut idem = 0.0f64;
        for (_, p) in self.projectors() {
            let sq = p.mul(&p).expect("same dimension");
            idem = idem.max(sq.max_abs_diff(&p).expect("same dimension"));
            sum += p.as_dmatrix();
        }
        let complete = (sum - DMatrix::<C64>::identity(n, n))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        (idem, complete)
    }

    /// `<psi|A|psi>` (real part; the imaginary part is roundoff).
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        Ok(self.matrix.sandwich(state, state)?.re)
    }

    /// Ordinary variance `<A^2> - <A>^2`, computed as `||(A - <A>) psi||^2`.
    pub fn variance(&self, state: &StateVector) -> Result<f64> {
        let mean = self.expectation(state)?;
        let a_psi = self.matrix.apply(state)?;
        Ok((a_psi.as_dvector() - state.as_dvector() * C64::new(mean, 0.0)).norm_squared())
    }

    /// Real linear combination `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Observable, beta: f64) -> Result<Observable> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let m = self
            .matrix
            .scale(C64::new(alpha, 0.0))
            .add(&other.matrix.scale(C64::new(beta, 0.0)))?;
        Observable::new(m)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.matrix.fingerprint()
    }
}
