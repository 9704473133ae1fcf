use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::{ComplexMatrix, ComplexVector, C64};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A run of (numerically) equal eigenvalues sharing one spectral projector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup {
    /// Mean of the grouped eigenvalues.
    pub value: f64,
    /// Column range in [`SpectralDecomposition::eigenvectors`].
    pub columns: Range<usize>,
}

/// Spectral decomposition `H = sum_i lambda_i v_i v_i^dagger`.
///
/// Eigenvalues ascend; each eigenvector is scaled so its largest-modulus
/// entry is real and positive (the first such entry on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub groups: Vec<EigenGroup>,
}

impl SpectralDecomposition {
    /// Builds from already known eigenpairs (columns of `eigenvectors`).
    ///
    /// Eigenvalues must ascend and the columns must be orthonormal to the
    /// spectral tolerance; the phase convention is applied here as well.
    pub fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<C64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: eigenvectors.ncols(),
            });
        }
        if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::ContractViolation(
                "eigenvalues must be finite and ascending".into(),
            ));
        }
        let gram = eigenvectors.adjoint() * &eigenvectors;
        let defect = (&gram - DMatrix::<C64>::identity(n, n))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if defect > tol.spectral {
            return Err(Error::ContractViolation(format!(
                "eigenvector columns not orthonormal (defect {defect:e})"
            )));
        }
        let mut vecs = eigenvectors;
        for j in 0..n {
            fix_phase(&mut vecs, j);
        }
        let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let groups = group_eigenvalues(&eigenvalues, tol.degeneracy * scale.max(1.0));
        Ok(Self {
            eigenvalues,
            eigenvectors: ComplexMatrix::new(vecs)?,
            groups,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectral norm `max |lambda_i|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()))
    }

    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        ComplexVector::from_trusted(self.eigenvectors.column(i).into_owned())
    }

    /// Projector onto the span of one eigen-group.
    pub fn projector(&self, group: &EigenGroup) -> ComplexMatrix {
        let cols = self
            .eigenvectors
            .columns(group.columns.start, group.columns.len());
        ComplexMatrix::from_trusted(cols * cols.adjoint())
    }

    /// `sum_i lambda_i v_i v_i^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        let d = DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        );
        ComplexMatrix::from_trusted(v * DMatrix::from_diagonal(&d) * v.adjoint())
    }

    /// `V f(Lambda) V^dagger` applied to `x`, for a scalar function of the spectrum.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64, x: &DVector<C64>) -> DVector<C64> {
        let v = self.eigenvectors.as_dmatrix();
        let mut coeffs = v.adjoint() * x;
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= f(l);
        }
        v * coeffs
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] unless `max|H - H^dagger|` is within the
/// construction tolerance (relative to the largest entry when that exceeds 1).
pub fn eigendecompose_hermitian(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    eigendecompose_hermitian_with(h, &Tolerances::DEFAULT)
}

pub fn eigendecompose_hermitian_with(
    h: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    let defect = h.hermiticity_defect();
    if defect > tol.construction * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim();
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (h.as_dmatrix() + h.as_dmatrix().adjoint()).unscale(2.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let norm = col.norm();
        vecs.set_column(dst, &col.unscale(norm));
    }
    for j in 0..n {
        fix_phase(&mut vecs, j);
    }
    let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let groups = group_eigenvalues(&eigenvalues, tol.degeneracy * scale.max(1.0));
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_trusted(vecs),
        groups,
    })
}

fn fix_phase(vecs: &mut DMatrix<C64>, j: usize) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in vecs.column(j).iter().enumerate() {
        // strict comparison with a small margin keeps the first of near ties
        if z.norm() > best_mod * (1.0 + 1e-12) {
            best = i;
            best_mod = z.norm();
        }
    }
    let pivot = vecs[(best, j)];
    if best_mod > 0.0 {
        let phase = pivot.conj() / best_mod;
        for z in vecs.column_mut(j).iter_mut() {
            *z *= phase;
        }
        vecs[(best, j)] = C64::new(best_mod, 0.0);
    }
}

fn group_eigenvalues(sorted: &[f64], gap: f64) -> Vec<EigenGroup> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            let mean = sorted[start..i].iter().sum::<f64>() / (i - start) as f64;
            groups.push(EigenGroup {
                value: mean,
                columns: start..i,
            });
            start = i;
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{random_hermitian, Seed};

    fn pauli_x() -> ComplexMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        ComplexMatrix::from_row_slice(2, &[o, l, l, o]).unwrap()
    }

    #[test]
    fn pauli_z_is_diagonal() {
        let z = ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
        let d = eigendecompose_hermitian(&z).unwrap();
        assert_eq!(d.eigenvalues, vec![-1.0, 1.0]);
        // lambda = -1 -> |1>, lambda = +1 -> |0>
        assert_eq!(d.eigenvector(0), ComplexVector::basis(2, 1).unwrap());
        assert_eq!(d.eigenvector(1), ComplexVector::basis(2, 0).unwrap());
        assert_eq!(d.groups.len(), 2);
    }

    #[test]
    fn pauli_x_hand_solution() {
        let d = eigendecompose_hermitian(&pauli_x()).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (|0> - |1>)/sqrt2 and (|0> + |1>)/sqrt2, up to the phase convention
        let minus = d.eigenvector(0);
        let plus = d.eigenvector(1);
        let expect_minus = ComplexVector::from_reals(&[s, -s]).unwrap();
        let expect_plus = ComplexVector::from_reals(&[s, s]).unwrap();
        assert!((minus.inner(&expect_minus).unwrap().norm() - 1.0).abs() < 1e-14);
        assert!((plus.inner(&expect_plus).unwrap().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_is_one_degenerate_group() {
        let d = eigendecompose_hermitian(&ComplexMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(d.groups.len(), 1);
        assert_eq!(d.groups[0].columns, 0..3);
        assert!((d.groups[0].value - 1.0).abs() < 1e-15);
        let p = d.projector(&d.groups[0]);
        assert!(
            p.max_abs_diff(&ComplexMatrix::identity(3).unwrap())
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn rejects_non_hermitian() {
        let o = C64::new(0.0, 0.0);
        let m = ComplexMatrix::from_row_slice(2, &[o, C64::new(1.0, 0.0), o, o]).unwrap();
        assert!(matches!(
            eigendecompose_hermitian(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn phase_convention_largest_entry_real_positive() {
        let h = random_hermitian(6, Seed(11), 1.0).unwrap();
        let d = eigendecompose_hermitian(&h).unwrap();
        for j in 0..6 {
            let col = d.eigenvector(j);
            let (imax, zmax) = col
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bm), (i, z)| {
                    if z.norm() > bm {
                        (i, z.norm())
                    } else {
                        (bi, bm)
                    }
                });
            assert!(col[imax].im == 0.0 && col[imax].re > 0.0);
            assert!((col[imax].re - zmax).abs() < 1e-15);
        }
    }

    #[test]
    fn reconstruction_and_residuals_random_up_to_16() {
        for dim in 1..=16 {
            let h = random_hermitian(dim, Seed(1000 + dim as u64), 1.0).unwrap();
            let d = eigendecompose_hermitian(&h).unwrap();
            let scale = d.norm().max(1.0);
            assert!(d.reconstruct().max_abs_diff(&h).unwrap() <= 1e-10 * scale);
            for (i, &l) in d.eigenvalues.iter().enumerate() {
                let v = d.eigenvector(i);
                let hv = h.apply(&v).unwrap();
                assert!(
                    (hv.as_dvector() - v.as_dvector() * C64::new(l, 0.0)).norm() <= 1e-10 * scale
                );
            }
            let v = d.eigenvectors.as_dmatrix();
            let gram = v.adjoint() * v;
            let id = DMatrix::<C64>::identity(dim, dim);
            assert!((gram - id).iter().all(|z| z.norm() <= 1e-10));
        }
    }

    #[test]
    fn roundoff_split_levels_are_grouped() {
        let m = ComplexMatrix::from_diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(1.0 + 1e-13, 0.0),
            C64::new(2.0, 0.0),
        ])
        .unwrap();
        let d = eigendecompose_hermitian(&m).unwrap();
        assert_eq!(d.groups.len(), 2);
        assert_eq!(d.groups[0].columns, 0..2);
    }
}
