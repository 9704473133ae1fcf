use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::numeric::{StateVector, C64};
use crate::tolerance::Tolerances;

/// Pre-selected state `|psi>`, post-selected state `|phi>` and their overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsEnsemble {
    pre: StateVector,
    post: StateVector,
    amplitude: C64,
    overlap_k: f64,
}

impl PpsEnsemble {
    /// Rejects post-selections with `k = |<phi|psi>|^2 <= 1e-10`.
    pub fn new(pre: StateVector, post: StateVector) -> Result<Self> {
        Self::with_threshold(pre, post, Tolerances::DEFAULT.overlap)
    }

    /// Same as [`PpsEnsemble::new`] with an explicit rejection threshold on `k`.
    pub fn with_threshold(pre: StateVector, post: StateVector, min_overlap: f64) -> Result<Self> {
        let amplitude = post.inner(&pre)?;
        let overlap_k = amplitude.norm_sqr();
        if !(overlap_k > min_overlap) {
            return Err(Error::OrthogonalPostselection(overlap_k));
        }
        Ok(Self {
            pre,
            post,
            amplitude,
            overlap_k,
        })
    }

    /// `|psi>`
    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    /// `|phi>`
    pub fn post(&self) -> &StateVector {
        &self.post
    }

    /// `<phi|psi>`
    pub fn amplitude(&self) -> C64 {
        self.amplitude
    }

    /// `k = |<phi|psi>|^2`
    pub fn overlap_k(&self) -> f64 {
        self.overlap_k
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::combine("pps", &[self.pre.fingerprint(), self.post.fingerprint()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{haar_random_state, Seed};

    #[test]
    fn overlap_is_recomputable() {
        let psi = haar_random_state(5, Seed(1)).unwrap();
        let phi = haar_random_state(5, Seed(2)).unwrap();
        let ens = PpsEnsemble::new(psi.clone(), phi.clone()).unwrap();
        let k = phi.inner(&psi).unwrap().norm_sqr();
        assert!((ens.overlap_k() - k).abs() <= 1e-12);
        assert!(ens.overlap_k() <= 1.0 + 1e-12);
    }

    #[test]
    fn orthogonal_postselection_rejected() {
        let r = PpsEnsemble::new(
            StateVector::basis(2, 0).unwrap(),
            StateVector::basis(2, 1).unwrap(),
        );
        assert_eq!(r, Err(Error::OrthogonalPostselection(0.0)));
    }

    #[test]
    fn threshold_can_be_lowered() {
        let eps = 1e-6;
        let psi = StateVector::from_amplitudes(&[C64::new(1.0, 0.0), C64::new(eps, 0.0)]).unwrap();
        let phi = StateVector::basis(2, 1).unwrap();
        assert!(PpsEnsemble::new(psi.clone(), phi.clone()).is_err());
        assert!(PpsEnsemble::with_threshold(psi, phi, 1e-14).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let r = PpsEnsemble::new(
            StateVector::basis(2, 0).unwrap(),
            StateVector::basis(3, 0).unwrap(),
        );
        assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
    }
}
