use serde::{Deserialize, Serialize};

use super::{Observable, PpsEnsemble};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::numeric::{ComplexMatrix, ComplexVector, C64};

/// `<A>_w = <phi|A|psi> / <phi|psi>` tagged with the inputs it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: C64,
    pub ensemble: Fingerprint,
    pub observable: Fingerprint,
}

pub fn weak_value(ens: &PpsEnsemble, a: &Observable) -> Result<WeakValue> {
    check(ens, a)?;
    let amp = ens.amplitude();
    if amp.norm() == 0.0 {
        return Err(Error::OrthogonalPostselection(0.0));
    }
    let num = a.matrix().sandwich(ens.post(), ens.pre())?;
    Ok(WeakValue {
        value: num / amp,
        ensemble: ens.fingerprint(),
        observable: a.fingerprint(),
    })
}

/// The non-Hermitian operator `A_w = |phi><phi| A / k` whose average in
/// `|psi>` is the weak value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakOperator {
    matrix: ComplexMatrix,
    ensemble: PpsEnsemble,
    parent: Observable,
}

pub fn weak_operator(ens: &PpsEnsemble, a: &Observable) -> Result<WeakOperator> {
    check(ens, a)?;
    let phi = ens.post().as_dvector();
    // <phi|A as a row vector
    let row = phi.adjoint() * a.matrix().as_dmatrix();
    let matrix = (phi * row).unscale(ens.overlap_k());
    Ok(WeakOperator {
        matrix: ComplexMatrix::new(matrix)?,
        ensemble: ens.clone(),
        parent: a.clone(),
    })
}

/// `A_w^dagger`.
pub fn adjoint_weak_operator(w: &WeakOperator) -> ComplexMatrix {
    w.matrix.adjoint()
}

impl WeakOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn ensemble(&self) -> &PpsEnsemble {
        &self.ensemble
    }

    pub fn parent(&self) -> &Observable {
        &self.parent
    }

    /// `<psi|A_w|psi>`, equal to the weak value.
    pub fn expectation(&self) -> C64 {
        let psi = self.ensemble.pre();
        self.matrix
            .sandwich(psi, psi)
            .expect("weak operator shares the ensemble dimension")
    }

    /// `|| A_w|psi> - <A>_w c |phi> ||` with `c = 1/<psi|phi>`.
    pub fn post_eigen_residual(&self) -> f64 {
        let c = C64::new(1.0, 0.0) / self.ensemble.amplitude().conj();
        self.post_eigen_residual_with(c)
    }

    /// Residual of `A_w|psi> = <A>_w c |phi>` for an arbitrary constant `c`.
    pub fn post_eigen_residual_with(&self, c: C64) -> f64 {
        let wv = self.weak_value_eq3();
        let lhs = self.apply(self.ensemble.pre());
        (lhs - self.ensemble.post().as_dvector() * (wv * c)).norm()
    }

    /// `|| A_w|phi> - (<phi|A|phi>/k) |phi> ||`.
    pub fn phi_eigen_residual(&self) -> f64 {
        let phi = self.ensemble.post();
        let ev =
            self.parent.matrix().sandwich(phi, phi).expect("same dim") / self.ensemble.overlap_k();
        (self.apply(phi) - phi.as_dvector() * ev).norm()
    }

    /// `max |A_w - |phi>(<phi|A)/k|`, recomputed from scratch via outer product.
    pub fn outer_product_residual(&self) -> f64 {
        let phi = self.ensemble.post();
        let a_dag_phi = self.parent.matrix().adjoint().apply(phi).expect("same dim");
        let outer = ComplexMatrix::outer(phi, &a_dag_phi)
            .expect("same dim")
            .scale(C64::new(1.0 / self.ensemble.overlap_k(), 0.0));
        self.matrix.max_abs_diff(&outer).expect("same dim")
    }

    fn apply(&self, v: &ComplexVector) -> nalgebra::DVector<C64> {
        self.matrix.as_dmatrix() * v.as_dvector()
    }

    fn weak_value_eq3(&self) -> C64 {
        let ens = &self.ensemble;
        self.parent
            .matrix()
            .sandwich(ens.post(), ens.pre())
            .expect("same dim")
            / ens.amplitude()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::combine(
            "weak-op",
            &[self.ensemble.fingerprint(), self.parent.fingerprint()],
        )
    }
}

fn check(ens: &PpsEnsemble, a: &Observable) -> Result<()> {
    if ens.dim() != a.dim() {
        return Err(Error::ShapeMismatch {
            expected: ens.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{haar_random_state, random_hermitian, Seed, StateVector};
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn real_state(a: &[f64]) -> StateVector {
        StateVector::new(ComplexVector::from_reals(a).unwrap()).unwrap()
    }

    fn zero_plus() -> PpsEnsemble {
        PpsEnsemble::new(
            real_state(&[1.0, 0.0]),
            real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        )
        .unwrap()
    }

    #[test]
    fn qubit_weak_value_sigma_z() {
        // <+|sz|0> / <+|0> = (1/sqrt2)/(1/sqrt2)
        let wv = weak_value(&zero_plus(), &Observable::pauli_z()).unwrap();
        assert!((wv.value - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn anomalous_weak_value() {
        let t = PI / 8.0;
        let ens = PpsEnsemble::new(
            real_state(&[t.cos(), t.sin()]),
            real_state(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
        )
        .unwrap();
        let wv = weak_value(&ens, &Observable::pauli_z()).unwrap().value;
        let oracle = (t.cos() + t.sin()) / (t.cos() - t.sin());
        assert!((oracle - (1.0 + SQRT_2)).abs() < 1e-14);
        assert!((wv - C64::new(oracle, 0.0)).norm() < 1e-14);
        // outside the spectrum [-1, 1]
        assert!(wv.re > 1.0);
    }

    #[test]
    fn weak_value_reduces_to_expectation() {
        let psi = haar_random_state(4, Seed(3)).unwrap();
        let a = Observable::new(random_hermitian(4, Seed(4), 1.0).unwrap()).unwrap();
        let ens = PpsEnsemble::new(psi.clone(), psi.clone()).unwrap();
        let wv = weak_value(&ens, &a).unwrap().value;
        assert!((wv.re - a.expectation(&psi).unwrap()).abs() < 1e-13);
        assert!(wv.im.abs() < 1e-13);
    }

    #[test]
    fn weak_operator_qubit_matrix() {
        let w = weak_operator(&zero_plus(), &Observable::pauli_z()).unwrap();
        // |+><+| sz / (1/2) = |+><-| * 2 = [[1,-1],[1,-1]]
        let expect = ComplexMatrix::from_row_slice(
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(w.matrix().max_abs_diff(&expect).unwrap() < 1e-14);
        assert!((w.expectation() - C64::new(1.0, 0.0)).norm() < 1e-14);
        let adj = adjoint_weak_operator(&w);
        let psi = zero_plus().pre().clone();
        assert!((adj.sandwich(&psi, &psi).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_weak_operator_is_scaled_projector() {
        let ens = zero_plus();
        let w = weak_operator(&ens, &Observable::identity(2).unwrap()).unwrap();
        let proj = ComplexMatrix::outer(ens.post(), ens.post())
            .unwrap()
            .scale(C64::new(1.0 / ens.overlap_k(), 0.0));
        assert!(w.matrix().max_abs_diff(&proj).unwrap() < 1e-15);
        assert!((w.expectation() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn adjoint_is_involution() {
        let ens = PpsEnsemble::new(
            haar_random_state(3, Seed(1)).unwrap(),
            haar_random_state(3, Seed(2)).unwrap(),
        )
        .unwrap();
        let a = Observable::new(random_hermitian(3, Seed(9), 1.0).unwrap()).unwrap();
        let w = weak_operator(&ens, &a).unwrap();
        assert_eq!(adjoint_weak_operator(&w).adjoint(), *w.matrix());
    }

    #[test]
    fn which_conjugation_makes_post_eigen_identity_hold() {
        // A_w|psi> = |phi><phi|A|psi>/k = <A>_w |phi> / <psi|phi>; the
        // alternative c = 1/<phi|psi> only agrees when <phi|psi> is real.
        let ens = PpsEnsemble::new(
            haar_random_state(3, Seed(21)).unwrap(),
            haar_random_state(3, Seed(22)).unwrap(),
        )
        .unwrap();
        let a = Observable::new(random_hermitian(3, Seed(23), 1.0).unwrap()).unwrap();
        let w = weak_operator(&ens, &a).unwrap();
        assert!(w.post_eigen_residual() < 1e-12);
        let wrong = C64::new(1.0, 0.0) / ens.amplitude();
        assert!(w.post_eigen_residual_with(wrong) > 1e-3);
    }

    #[test]
    fn shape_mismatch() {
        let err = weak_value(&zero_plus(), &Observable::identity(3).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::ShapeMismatch {
                expected: 2,
                found: 3
            }
        );
        assert!(weak_operator(&zero_plus(), &Observable::identity(3).unwrap()).is_err());
    }
}
