use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::numeric::{ComplexMatrix, StateVector, C64};
use crate::relations::{vaidman_decompose, NamedValue, RelationId, RelationReport};
use crate::tolerance::Tolerances;

/// `<Pi_a>_w^(b)`, `<Pi_b>_w^(a)` and their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorWeakValuePair {
    /// `<b|Pi_a|psi>/<b|psi>`
    pub wv_a: C64,
    /// `<a|Pi_b|psi>/<a|psi>`
    pub wv_b: C64,
    pub product: C64,
    /// `|<a|b>|^2`
    pub overlap_sq: f64,
}

struct Amplitudes {
    psi_a: C64,
    psi_b: C64,
    ab: C64,
}

fn amplitudes(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
    tol: &Tolerances,
) -> Result<Amplitudes> {
    let psi_a = a.inner(psi)?;
    let psi_b = b.inner(psi)?;
    let ab = a.inner(b)?;
    for amp in [psi_a, psi_b] {
        if !(amp.norm() > tol.overlap) {
            return Err(Error::OrthogonalPostselection(amp.norm()));
        }
    }
    Ok(Amplitudes { psi_a, psi_b, ab })
}

/// Weak values of `Pi_a = |a><a|` post-selected on `|b>` and of `Pi_b`
/// post-selected on `|a>`, for the same pre-selection `|psi>`.
pub fn projector_weak_value_pair(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
) -> Result<ProjectorWeakValuePair> {
    projector_weak_value_pair_with(psi, a, b, &Tolerances::DEFAULT)
}

pub(crate) fn projector_weak_value_pair_with(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
    tol: &Tolerances,
) -> Result<ProjectorWeakValuePair> {
    let amp = amplitudes(psi, a, b, tol)?;
    let wv_a = amp.ab.conj() * amp.psi_a / amp.psi_b;
    let wv_b = amp.ab * amp.psi_b / amp.psi_a;
    Ok(ProjectorWeakValuePair {
        wv_a,
        wv_b,
        product: wv_a * wv_b,
        overlap_sq: amp.ab.norm_sqr(),
    })
}

/// Residuals of `<Pi_a>_w^(b) psi(b) = <b|a> psi(a)` and its mirror image.
pub fn wavefunction_bridge_check(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
) -> Result<(f64, f64)> {
    let pair = projector_weak_value_pair(psi, a, b)?;
    let psi_a = a.inner(psi)?;
    let psi_b = b.inner(psi)?;
    let ba = b.inner(a)?;
    let r1 = (pair.wv_a * psi_b - ba * psi_a).norm();
    let r2 = (pair.wv_b * psi_a - ba.conj() * psi_b).norm();
    Ok((r1, r2))
}

/// `<Pi_a>_w^(b) = <Pi_a> + dPi_a <b|psibar_a>/<b|psi>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnomalousParts {
    /// `|psi(a)|^2`
    pub mean: f64,
    pub anomalous: C64,
    /// `dPi_a`
    pub spread: f64,
    /// The directly computed weak value, for comparison.
    pub weak_value: C64,
}

impl AnomalousParts {
    pub fn reconstruction_residual(&self) -> f64 {
        (C64::new(self.mean, 0.0) + self.anomalous - self.weak_value).norm()
    }
}

pub fn anomalous_decomposition(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
) -> Result<AnomalousParts> {
    let pair = projector_weak_value_pair(psi, a, b)?;
    let proj = ComplexMatrix::outer(a, a)?;
    let parts = vaidman_decompose(psi, &proj)?;
    let psi_b = b.inner(psi)?;
    let anomalous = match &parts.orthogonal_state {
        Some(bar) => C64::new(parts.spread, 0.0) * b.inner(bar)? / psi_b,
        None => C64::new(0.0, 0.0),
    };
    Ok(AnomalousParts {
        mean: parts.mean.re,
        anomalous,
        spread: parts.spread,
        weak_value: pair.wv_a,
    })
}

/// Report form of the product bound `<Pi_a>_w^(b) <Pi_b>_w^(a) <= 1`.
///
/// `lhs` is the bound 1 and the single right-hand term is the real part of
/// the product, so the slack is `1 - Re(product)`. The identity with
/// `|<a|b>|^2` is recorded in the `identity_residual` diagnostic.
pub fn complementarity_check(
    psi: &StateVector,
    a: &StateVector,
    b: &StateVector,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let pair = projector_weak_value_pair_with(psi, a, b, tol)?;
    let mut report = RelationReport::new(
        RelationId::Complementarity,
        1.0,
        vec![NamedValue::new("product", pair.product.re)],
        tol.relation,
    )
    .diagnostic("overlap_sq", pair.overlap_sq)
    .diagnostic(
        "identity_residual",
        (pair.product - C64::new(pair.overlap_sq, 0.0)).norm(),
    )
    .diagnostic("wv_a_abs", pair.wv_a.norm())
    .diagnostic("wv_b_abs", pair.wv_b.norm())
    .input("psi", psi.fingerprint())
    .input("a", a.fingerprint())
    .input("b", b.fingerprint())
    .input(
        "pair",
        Fingerprint::combine("proj-pair", &[a.fingerprint(), b.fingerprint()]),
    );
    report.imag_residue = pair.product.im.abs();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{haar_random_state, ComplexVector, Seed};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real_state(v: &[f64]) -> StateVector {
        StateVector::new(ComplexVector::from_reals(v).unwrap()).unwrap()
    }

    #[test]
    fn zero_plus_product_is_half_for_any_psi() {
        let a = real_state(&[1.0, 0.0]);
        let b = real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let mut first = None;
        for s in 0..100 {
            let psi = haar_random_state(2, Seed(s)).unwrap();
            let pair = projector_weak_value_pair(&psi, &a, &b).unwrap();
            assert!((pair.product - C64::new(0.5, 0.0)).norm() <= 1e-12);
            let p = *first.get_or_insert(pair.product);
            assert!((pair.product - p).norm() <= 1e-10);
        }
    }

    #[test]
    fn same_vector_gives_unit_values() {
        let psi = haar_random_state(3, Seed(4)).unwrap();
        let a = haar_random_state(3, Seed(5)).unwrap();
        let pair = projector_weak_value_pair(&psi, &a, &a).unwrap();
        assert!((pair.product - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((pair.wv_a - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn orthogonal_pair_gives_zero_product() {
        let psi = real_state(&[0.6, 0.8]);
        let pair =
            projector_weak_value_pair(&psi, &real_state(&[1.0, 0.0]), &real_state(&[0.0, 1.0]))
                .unwrap();
        assert_eq!(pair.product, C64::new(0.0, 0.0));
    }

    #[test]
    fn vanishing_denominator_rejected() {
        let psi = real_state(&[1.0, 0.0]);
        let r = projector_weak_value_pair(
            &psi,
            &real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            &real_state(&[0.0, 1.0]),
        );
        assert!(matches!(r, Err(Error::OrthogonalPostselection(_))));
    }

    #[test]
    fn bridge_residuals() {
        let a = real_state(&[1.0, 0.0]);
        let b = real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let psi = haar_random_state(2, Seed(8)).unwrap();
        let (r1, r2) = wavefunction_bridge_check(&psi, &a, &b).unwrap();
        assert!(r1 <= 1e-14 && r2 <= 1e-14);
        let (psi, a, b) = (
            haar_random_state(6, Seed(1)).unwrap(),
            haar_random_state(6, Seed(2)).unwrap(),
            haar_random_state(6, Seed(3)).unwrap(),
        );
        let (r1, r2) = wavefunction_bridge_check(&psi, &a, &b).unwrap();
        assert!(r1 <= 1e-12 && r2 <= 1e-12);
        // psi = a: psi(a) = 1 up to phase; wv_a psi(b) = <b|a> psi(a)
        let (r1, _) = wavefunction_bridge_check(&a, &a, &b).unwrap();
        assert!(r1 <= 1e-14);
    }

    #[test]
    fn anomalous_parts_eigenstate() {
        let a = haar_random_state(3, Seed(10)).unwrap();
        let b = haar_random_state(3, Seed(11)).unwrap();
        let parts = anomalous_decomposition(&a, &a, &b).unwrap();
        assert!((parts.mean - 1.0).abs() < 1e-14);
        assert!(parts.spread < 1e-7);
        assert!(parts.anomalous.norm() < 1e-7);
        assert!((parts.weak_value - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn anomalous_parts_plus_on_zero() {
        let plus = real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let a = real_state(&[1.0, 0.0]);
        let b = haar_random_state(2, Seed(3)).unwrap();
        let parts = anomalous_decomposition(&plus, &a, &b).unwrap();
        assert!((parts.mean - 0.5).abs() < 1e-15);
        assert!((parts.spread - 0.5).abs() < 1e-15);
        assert!(parts.reconstruction_residual() <= 1e-12);
    }

    #[test]
    fn anomalous_reconstruction_random_dim5() {
        let (psi, a, b) = (
            haar_random_state(5, Seed(21)).unwrap(),
            haar_random_state(5, Seed(22)).unwrap(),
            haar_random_state(5, Seed(23)).unwrap(),
        );
        let parts = anomalous_decomposition(&psi, &a, &b).unwrap();
        assert!(parts.reconstruction_residual() <= 1e-10);
        let pa = a.inner(&psi).unwrap().norm_sqr();
        assert!((parts.spread.powi(2) - pa * (1.0 - pa)).abs() <= 1e-12);
    }

    #[test]
    fn large_weak_value_with_bounded_product() {
        // b nearly orthogonal to psi makes <Pi_a>_w^(b) large
        let psi = real_state(&[1.0, 0.0]);
        let t: f64 = 0.02;
        let b = real_state(&[t.sin(), t.cos()]);
        let a = real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let pair = projector_weak_value_pair(&psi, &a, &b).unwrap();
        assert!(pair.wv_a.norm() > 1.0);
        assert!(pair.product.re <= 1.0 + 1e-12);
    }
}
