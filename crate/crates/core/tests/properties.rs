use proptest::prelude::*;
use weakrel::complementarity::projector_weak_value_pair;
use weakrel::model::{weak_value, Observable, PpsEnsemble};
use weakrel::numeric::{haar_random_state, random_hermitian, Seed, C64};
use weakrel::relations::{
    nh_variance, parallelogram_identity_check, ur1_check, ur2_check, PsibarMode,
};
use weakrel::Tolerances;

fn ensemble(dim: usize, seed: u64) -> Option<PpsEnsemble> {
    PpsEnsemble::new(
        haar_random_state(dim, Seed(seed)).unwrap(),
        haar_random_state(dim, Seed(seed ^ 0x5bd1)).unwrap(),
    )
    .ok()
}

fn observable(dim: usize, seed: u64) -> Observable {
    Observable::new(random_hermitian(dim, Seed(seed), 1.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nh_variance_non_negative(dim in 1usize..7, seed in any::<u64>()) {
        let psi = haar_random_state(dim, Seed(seed)).unwrap();
        let m = random_hermitian(dim, Seed(seed.wrapping_add(1)), 2.0).unwrap();
        prop_assert!(nh_variance(&psi, &m).unwrap().value >= 0.0);
    }

    #[test]
    fn weak_value_is_linear(dim in 2usize..7, seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let Some(ens) = ensemble(dim, seed) else { return Ok(()) };
        let (a, b) = (observable(dim, seed.wrapping_add(2)), observable(dim, seed.wrapping_add(3)));
        let wa = weak_value(&ens, &a).unwrap().value;
        let wb = weak_value(&ens, &b).unwrap().value;
        let wc = weak_value(&ens, &a.combine(alpha, &b, beta).unwrap()).unwrap().value;
        let scale = 1.0 + wa.norm() + wb.norm();
        prop_assert!((wc - wa * alpha - wb * beta).norm() <= 1e-10 * scale);
    }

    #[test]
    fn relations_hold_with_random_psibar(dim in 2usize..6, seed in any::<u64>()) {
        let Some(ens) = ensemble(dim, seed) else { return Ok(()) };
        let (a, b) = (observable(dim, seed.wrapping_add(4)), observable(dim, seed.wrapping_add(5)));
        let tol = Tolerances::DEFAULT;
        let mode = PsibarMode::Random(Seed(seed.wrapping_add(6)));
        let r1 = ur1_check(&ens, &a, &b, &mode, &tol).unwrap();
        let r2 = ur2_check(&ens, &a, &b, &mode, &tol).unwrap();
        let scale = 1.0 + r1.lhs;
        prop_assert!(r1.slack >= -1e-9 * scale);
        prop_assert!(r2.slack >= -1e-9 * scale);
        prop_assert!(parallelogram_identity_check(&ens, &a, &b).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn projector_product_bounded(dim in 2usize..6, seed in any::<u64>()) {
        let psi = haar_random_state(dim, Seed(seed)).unwrap();
        let a = haar_random_state(dim, Seed(seed.wrapping_add(7))).unwrap();
        let b = haar_random_state(dim, Seed(seed.wrapping_add(8))).unwrap();
        if let Ok(p) = projector_weak_value_pair(&psi, &a, &b) {
            prop_assert!(p.product.re <= 1.0 + 1e-10);
            prop_assert!((p.product - C64::new(p.overlap_sq, 0.0)).norm() <= 1e-10 * (1.0 + p.wv_a.norm() * p.wv_b.norm()));
        }
    }
}
