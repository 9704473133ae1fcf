use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::numeric::{ComplexMatrix, StateVector, C64};
use crate::tolerance::Tolerances;

/// `dO^2 = <psi|(O - <O>)(O^dagger - <O^dagger>)|psi>` for a general operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NHVariance {
    pub value: f64,
    pub state: Fingerprint,
    pub operator: Fingerprint,
}

/// `<O^dagger>` and the shifted vector `(O^dagger - <O^dagger>)|psi>`.
pub(crate) fn shifted_adjoint_action(
    state: &StateVector,
    o: &ComplexMatrix,
) -> Result<(C64, DVector<C64>)> {
    if o.dim() != state.dim() {
        return Err(Error::ShapeMismatch {
            expected: state.dim(),
            found: o.dim(),
        });
    }
    let psi = state.as_dvector();
    let o_dag_psi = o.as_dmatrix().adjoint() * psi;
    let mean = psi.dotc(&o_dag_psi);
    let shifted = o_dag_psi - psi * mean;
    Ok((mean, shifted))
}

/// Non-Hermitian variance, evaluated as `||(O^dagger - <O^dagger>)|psi>||^2`
/// so that it is non-negative by construction.
pub fn nh_variance(state: &StateVector, o: &ComplexMatrix) -> Result<NHVariance> {
    let (_, shifted) = shifted_adjoint_action(state, o)?;
    Ok(NHVariance {
        value: shifted.norm_squared(),
        state: state.fingerprint(),
        operator: o.fingerprint(),
    })
}

/// `O^dagger|psi> = <O^dagger>|psi> + dO |psibar_O>` with `<psi|psibar_O> = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VaidmanParts {
    /// `<psi|O^dagger|psi>`
    pub mean: C64,
    /// `dO`, the square root of the non-Hermitian variance.
    pub spread: f64,
    /// Absent when the spread vanishes (psi is an "eigenvector" of O^dagger).
    pub orthogonal_state: Option<StateVector>,
}

impl VaidmanParts {
    /// `|| O^dagger|psi> - mean|psi> - spread|psibar> ||`.
    pub fn reconstruction_residual(&self, state: &StateVector, o: &ComplexMatrix) -> Result<f64> {
        let psi = state.as_dvector();
        let mut rebuilt = psi * self.mean;
        if let Some(bar) = &self.orthogonal_state {
            rebuilt += bar.as_dvector() * C64::new(self.spread, 0.0);
        }
        Ok((o.as_dmatrix().adjoint() * psi - rebuilt).norm())
    }
}

/// Generalized Vaidman decomposition of `O^dagger` acting on `|psi>`.
pub fn vaidman_decompose(state: &StateVector, o: &ComplexMatrix) -> Result<VaidmanParts> {
    let (mean, shifted) = shifted_adjoint_action(state, o)?;
    let spread = shifted.norm();
    let orthogonal_state = if spread > Tolerances::DEFAULT.construction {
        Some(StateVector::from_trusted(shifted.unscale(spread)))
    } else {
        None
    };
    Ok(VaidmanParts {
        mean,
        spread,
        orthogonal_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{weak_operator, Observable, PpsEnsemble};
    use crate::numeric::{
        haar_random_state, random_hermitian, sample_complex_gaussian, ComplexVector, Seed,
    };
    use nalgebra::DMatrix;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real_state(a: &[f64]) -> StateVector {
        StateVector::new(ComplexVector::from_reals(a).unwrap()).unwrap()
    }

    #[test]
    fn hermitian_case_is_ordinary_variance() {
        let psi = haar_random_state(5, Seed(1)).unwrap();
        let a = Observable::new(random_hermitian(5, Seed(2), 1.0).unwrap()).unwrap();
        let m = a.matrix().as_dmatrix();
        let p = psi.as_dvector();
        let second = p.dotc(&(m * m * p)).re;
        let first = p.dotc(&(m * p)).re;
        let v = nh_variance(&psi, a.matrix()).unwrap().value;
        assert!((v - (second - first * first)).abs() < 1e-12);
    }

    #[test]
    fn weak_operator_variance_reduces_when_post_equals_pre() {
        let psi = haar_random_state(4, Seed(5)).unwrap();
        let a = Observable::new(random_hermitian(4, Seed(6), 1.0).unwrap()).unwrap();
        let ens = PpsEnsemble::new(psi.clone(), psi.clone()).unwrap();
        let w = weak_operator(&ens, &a).unwrap();
        let v = nh_variance(&psi, w.matrix()).unwrap().value;
        assert!((v - a.variance(&psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn qubit_weak_operator_variance_oracle() {
        // A_w = 2|+><-|, A_w A_w^dagger = 4|+><+|, <0|.|0> = 2, |<A_w>|^2 = 1
        let ens = PpsEnsemble::new(
            real_state(&[1.0, 0.0]),
            real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        )
        .unwrap();
        let w = weak_operator(&ens, &Observable::pauli_z()).unwrap();
        let m = w.matrix().as_dmatrix();
        let psi = ens.pre().as_dvector();
        let direct = psi.dotc(&(m * m.adjoint() * psi)).re - psi.dotc(&(m * psi)).norm_sqr();
        assert!((direct - 1.0).abs() < 1e-14);
        let v = nh_variance(ens.pre(), w.matrix()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vaidman_sigma_z_on_plus() {
        let plus = real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let parts = vaidman_decompose(&plus, Observable::pauli_z().matrix()).unwrap();
        assert!(parts.mean.norm() < 1e-15);
        assert!((parts.spread - 1.0).abs() < 1e-15);
        let bar = parts.orthogonal_state.unwrap();
        let minus = real_state(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        assert!((bar.inner(&minus).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vaidman_eigenstate_has_no_orthogonal_part() {
        let one = StateVector::basis(2, 1).unwrap();
        let parts = vaidman_decompose(&one, Observable::pauli_z().matrix()).unwrap();
        assert_eq!(parts.spread, 0.0);
        assert!(parts.orthogonal_state.is_none());
        assert!((parts.mean - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vaidman_reconstruction_random_non_hermitian() {
        let mut rng = Seed(77).rng();
        let o = ComplexMatrix::new(DMatrix::from_fn(5, 5, |_, _| {
            sample_complex_gaussian(&mut rng)
        }))
        .unwrap();
        let psi = haar_random_state(5, Seed(78)).unwrap();
        let parts = vaidman_decompose(&psi, &o).unwrap();
        assert!(parts.reconstruction_residual(&psi, &o).unwrap() <= 1e-10);
        let bar = parts.orthogonal_state.as_ref().unwrap();
        assert!(psi.inner(bar).unwrap().norm() <= 1e-12);
        let var = nh_variance(&psi, &o).unwrap().value;
        assert!((parts.spread * parts.spread - var).abs() <= 1e-12 * var.max(1.0));
    }

    #[test]
    fn shape_error() {
        let psi = haar_random_state(3, Seed(1)).unwrap();
        assert!(matches!(
            nh_variance(&psi, &ComplexMatrix::identity(2).unwrap()),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
