use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use statrs::function::erf::erf;
use weakrel::complementarity::*;
use weakrel::numeric::{haar_random_state, ComplexVector, Seed, StateVector, C64};

#[test]
fn product_matches_overlap_for_random_pairs() {
    for pair in 0..10u64 {
        let a = haar_random_state(4, Seed(1000 + pair)).unwrap();
        let b = haar_random_state(4, Seed(2000 + pair)).unwrap();
        let overlap = a.inner(&b).unwrap().norm_sqr();
        for trial in 0..100u64 {
            let psi = haar_random_state(4, Seed(pair * 1000 + trial)).unwrap();
            let p = projector_weak_value_pair(&psi, &a, &b).unwrap();
            assert!((p.product.re - overlap).abs() <= 1e-10);
            assert!(p.product.im.abs() <= 1e-10);
        }
    }
}

#[test]
fn report_form() {
    let a = StateVector::basis(2, 0).unwrap();
    let b = StateVector::new(ComplexVector::from_reals(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap())
        .unwrap();
    let psi = haar_random_state(2, Seed(3)).unwrap();
    let r = complementarity_check(&psi, &a, &b, &weakrel::Tolerances::DEFAULT).unwrap();
    assert!((r.slack - 0.5).abs() <= 1e-12);
    assert!(r.diagnostic_value("identity_residual").unwrap() <= 1e-12);
    assert!(r.imag_residue <= 1e-12);
    assert!(!r.tight);
}

#[test]
fn full_windows_at_512_points() {
    let grid = build_cv_grid(512, -20.0, 20.0, 1.0).unwrap();
    let psi = GridWavefunction::gaussian(&grid, 0.4, 1.3, -0.7).unwrap();
    let full_x = WindowProjector::full(&grid, Domain::Position);
    let full_p = WindowProjector::full(&grid, Domain::Momentum);
    let p_post = grid.snap_momentum(-0.5);
    let x_post = grid.snap_position(0.3);
    let wx = cv_weak_value(&psi, &full_x, p_post).unwrap();
    let wp = cv_weak_value(&psi, &full_p, x_post).unwrap();
    assert!((wx - C64::new(1.0, 0.0)).norm() <= 1e-8);
    assert!((wp - C64::new(1.0, 0.0)).norm() <= 1e-8);
    assert!((wx * wp - C64::new(1.0, 0.0)).norm() <= 1e-8);
}

#[test]
fn windows_are_idempotent_exactly() {
    let grid = build_cv_grid(64, -6.0, 6.0, 1.0).unwrap();
    for d in [Domain::Position, Domain::Momentum] {
        let w = window_projector(&grid, d, 0.3, 2.5).unwrap();
        let m = w.matrix_in_own_basis();
        assert_eq!(m.mul(&m).unwrap().max_abs_diff(&m).unwrap(), 0.0);
    }
}

#[test]
fn refinement_error_is_monotone() {
    let reference = C64::new(0.5 * erf(FRAC_1_SQRT_2), 0.0);
    let steps = refinement_study(
        &[128, 256, 512],
        (-8.0, 8.0),
        1.0,
        Some(reference),
        |grid| {
            let psi = GridWavefunction::gaussian(grid, 0.0, 1.0, 0.0)?;
            let win = window_projector(grid, Domain::Position, 0.5, 1.0)?;
            cv_weak_value(&psi, &win, 0.0)
        },
    )
    .unwrap();
    let errs: Vec<f64> = steps.iter().map(|s| s.error.unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[2] <= 1e-5);
    assert!(steps[0].change.is_none() && steps[1].change.is_some());
}

#[test]
fn half_line_gaussian_across_grids() {
    for (n, l, hbar) in [(128, 12.0, 1.0), (256, 16.0, 0.5), (512, 20.0, 2.0)] {
        let grid = build_cv_grid(n, -l, l, hbar).unwrap();
        let psi = GridWavefunction::gaussian(&grid, 0.0, SQRT_2, 0.0).unwrap();
        let win = window_projector(&grid, Domain::Position, l / 2.0, l).unwrap();
        let wv = cv_weak_value(&psi, &win, 0.0).unwrap();
        assert!((wv - C64::new(0.5, 0.0)).norm() <= 1e-6, "n = {n}");
    }
}
