//! Named regression fixtures with known values.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use anyhow::Result;
use weakrel::complementarity::{
    anomalous_decomposition, build_cv_grid, cv_product_study, cv_weak_value,
    projector_weak_value_pair, window_projector, Domain, GridWavefunction, ProductStudy,
    WindowProjector,
};
use weakrel::model::{weak_operator, weak_value, Observable, PpsEnsemble};
use weakrel::numeric::{
    haar_random_state, random_hermitian, ComplexVector, Seed, StateVector, C64,
};
use weakrel::pointer::{evolve_joint, first_order_pointer, pointer_study, postselect, MeterSpec};
use weakrel::relations::{
    conjugate_pair_check, mp1_check, mp2_check, nh_variance, parallelogram_identity_check,
    robertson_check, ur1_check, ur2_check, vaidman_decompose, PsibarMode, RelationReport,
    TruncatedFockPair,
};
use weakrel::Tolerances;

use crate::report::{FixtureResult, ReportSet};

const TOL: Tolerances = Tolerances::DEFAULT;

fn real_state(v: &[f64]) -> StateVector {
    StateVector::new(ComplexVector::from_reals(v).expect("finite")).expect("normalized")
}

fn plus() -> StateVector {
    real_state(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
}

pub fn anomalous_ensemble() -> PpsEnsemble {
    let t = PI / 8.0;
    PpsEnsemble::new(
        real_state(&[t.cos(), t.sin()]),
        real_state(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
    )
    .expect("overlap is 0.146")
}

fn complex_pair(out: &mut Vec<FixtureResult>, name: &str, expected: C64, observed: C64, tol: f64) {
    out.push(FixtureResult::new(
        format!("{name}.re"),
        expected.re,
        observed.re,
        tol,
    ));
    out.push(FixtureResult::new(
        format!("{name}.im"),
        expected.im,
        observed.im,
        tol,
    ));
}

/// Largest term-by-term gap between the post-selected relations at
/// `phi = psi` and their Hermitian forms.
pub fn reduction_gap(
    psi: &StateVector,
    a: &Observable,
    b: &Observable,
    mode: &PsibarMode,
) -> Result<f64> {
    let ens = PpsEnsemble::new(psi.clone(), psi.clone())?;
    let gap = |x: &RelationReport, y: &RelationReport| {
        x.rhs_terms
            .iter()
            .zip(&y.rhs_terms)
            .map(|(p, q)| (p.value - q.value).abs())
            .fold((x.lhs - y.lhs).abs(), f64::max)
            .max((x.rhs_total - y.rhs_total).abs())
    };
    let g1 = gap(
        &ur1_check(&ens, a, b, mode, &TOL)?,
        &mp1_check(psi, a, b, mode, &TOL)?,
    );
    let g2 = gap(
        &ur2_check(&ens, a, b, mode, &TOL)?,
        &mp2_check(psi, a, b, mode, &TOL)?,
    );
    Ok(g1.max(g2))
}

fn model_fixtures(out: &mut Vec<FixtureResult>) -> Result<()> {
    let zero = StateVector::basis(2, 0)?;
    let qubit = PpsEnsemble::new(zero.clone(), plus())?;
    let sz = Observable::pauli_z();
    complex_pair(
        out,
        "weak_value.zero_plus_sigma_z",
        C64::new(1.0, 0.0),
        weak_value(&qubit, &sz)?.value,
        1e-14,
    );
    complex_pair(
        out,
        "weak_value.anomalous",
        C64::new(1.0 + SQRT_2, 0.0),
        weak_value(&anomalous_ensemble(), &sz)?.value,
        1e-12,
    );
    let psi = haar_random_state(3, Seed(11))?;
    let a = Observable::new(random_hermitian(3, Seed(12), 1.0)?)?;
    let same = PpsEnsemble::new(psi.clone(), psi.clone())?;
    complex_pair(
        out,
        "weak_value.expectation_limit",
        C64::new(a.expectation(&psi)?, 0.0),
        weak_value(&same, &a)?.value,
        1e-12,
    );
    let aw = weak_operator(&qubit, &sz)?;
    complex_pair(
        out,
        "weak_operator.zero_plus_expectation",
        C64::new(1.0, 0.0),
        aw.expectation(),
        1e-14,
    );
    let iw = weak_operator(&qubit, &Observable::identity(2)?)?;
    complex_pair(
        out,
        "weak_operator.identity",
        C64::new(1.0, 0.0),
        iw.expectation(),
        1e-14,
    );
    let ens = PpsEnsemble::new(
        haar_random_state(4, Seed(13))?,
        haar_random_state(4, Seed(14))?,
    )?;
    let w = weak_operator(&ens, &Observable::new(random_hermitian(4, Seed(15), 1.0)?)?)?;
    out.push(FixtureResult::at_most(
        "weak_operator.post_eigen_residual",
        1e-10,
        w.post_eigen_residual(),
    ));
    out.push(FixtureResult::at_most(
        "weak_operator.phi_eigen_residual",
        1e-10,
        w.phi_eigen_residual(),
    ));
    out.push(FixtureResult::at_most(
        "weak_operator.outer_product_residual",
        1e-10,
        w.outer_product_residual(),
    ));
    Ok(())
}

fn relation_fixtures(out: &mut Vec<FixtureResult>) -> Result<()> {
    let zero = StateVector::basis(2, 0)?;
    let (sx, sy, sz) = (
        Observable::pauli_x(),
        Observable::pauli_y(),
        Observable::pauli_z(),
    );
    let parts = vaidman_decompose(&plus(), sz.matrix())?;
    out.push(FixtureResult::new(
        "vaidman.sigma_z_plus.mean",
        0.0,
        parts.mean.norm(),
        1e-15,
    ));
    out.push(FixtureResult::new(
        "vaidman.sigma_z_plus.spread",
        1.0,
        parts.spread,
        1e-14,
    ));
    let psi = haar_random_state(4, Seed(21))?;
    let a = Observable::new(random_hermitian(4, Seed(22), 1.0)?)?;
    out.push(FixtureResult::new(
        "nh_variance.hermitian_reduction",
        a.variance(&psi)?,
        nh_variance(&psi, a.matrix())?.value,
        1e-12,
    ));

    let qubit = PpsEnsemble::new(zero.clone(), plus())?;
    let r = ur1_check(&qubit, &sz, &sx, &PsibarMode::Optimal, &TOL)?;
    out.push(FixtureResult::new("ur1.qubit_lhs", 2.0, r.lhs, 1e-14));
    out.push(FixtureResult::new(
        "ur1.qubit_overlap",
        2.0,
        r.term("overlap").unwrap_or(f64::NAN),
        1e-14,
    ));
    let ens = PpsEnsemble::new(
        haar_random_state(4, Seed(23))?,
        haar_random_state(4, Seed(24))?,
    )?;
    let b = Observable::new(random_hermitian(4, Seed(25), 1.0)?)?;
    let r = ur1_check(&ens, &a, &b, &PsibarMode::Optimal, &TOL)?;
    out.push(FixtureResult::new(
        "ur1.optimal_saturation_dim4",
        0.0,
        r.slack,
        1e-9,
    ));
    let r = ur2_check(&ens, &a, &b, &PsibarMode::Optimal, &TOL)?;
    out.push(FixtureResult::new(
        "ur2.optimal_half_sum_variance",
        r.diagnostic_value("half_sum_variance").unwrap_or(f64::NAN),
        r.rhs_total,
        1e-10,
    ));
    let same = PpsEnsemble::new(psi.clone(), psi.clone())?;
    let r = ur2_check(&same, &a, &a, &PsibarMode::Optimal, &TOL)?;
    out.push(FixtureResult::new(
        "ur2.equal_observables_equality",
        0.0,
        r.slack,
        1e-12,
    ));
    out.push(FixtureResult::at_most(
        "reduction.stronger_relations_optimal",
        1e-12,
        reduction_gap(&psi, &a, &b, &PsibarMode::Optimal)?,
    ));
    out.push(FixtureResult::at_most(
        "reduction.stronger_relations_random",
        1e-12,
        reduction_gap(&psi, &a, &b, &PsibarMode::Random(Seed(26)))?,
    ));
    out.push(FixtureResult::at_most(
        "parallelogram.qubit",
        1e-12,
        parallelogram_identity_check(&qubit, &sz, &sy)?,
    ));
    let r = robertson_check(&zero, &sx, &sy, &TOL)?;
    out.push(FixtureResult::new("robertson.pauli.lhs", 1.0, r.lhs, 1e-15));
    out.push(FixtureResult::new(
        "robertson.pauli.rhs",
        1.0,
        r.rhs_total,
        1e-15,
    ));

    let fock = TruncatedFockPair::new(40, 1.0)?;
    let ground = fock.fock_state(0)?;
    let r = conjugate_pair_check(
        &fock,
        &PpsEnsemble::new(ground.clone(), ground)?,
        &PsibarMode::Optimal,
        &TOL,
    )?;
    out.push(FixtureResult::new(
        "conjugate_pair.ground.lhs",
        1.0,
        r.lhs,
        1e-12,
    ));
    out.push(FixtureResult::new(
        "conjugate_pair.ground.slack",
        0.0,
        r.slack,
        1e-8,
    ));
    let one = fock.fock_state(1)?;
    let r = conjugate_pair_check(
        &fock,
        &PpsEnsemble::new(one.clone(), one)?,
        &PsibarMode::Optimal,
        &TOL,
    )?;
    out.push(FixtureResult::new(
        "conjugate_pair.first_excited.lhs",
        3.0,
        r.lhs,
        1e-12,
    ));
    out.push(FixtureResult::new(
        "conjugate_pair.first_excited.slack",
        0.0,
        r.slack,
        1e-8,
    ));
    Ok(())
}

fn complementarity_fixtures(out: &mut Vec<FixtureResult>) -> Result<()> {
    let zero = StateVector::basis(2, 0)?;
    let psi = haar_random_state(2, Seed(31))?;
    let p = projector_weak_value_pair(&psi, &zero, &plus())?;
    complex_pair(
        out,
        "complementarity.zero_plus",
        C64::new(0.5, 0.0),
        p.product,
        1e-12,
    );
    let p = projector_weak_value_pair(&psi, &zero, &zero)?;
    complex_pair(
        out,
        "complementarity.same_vector",
        C64::new(1.0, 0.0),
        p.product,
        1e-14,
    );
    let t: f64 = 0.02;
    let p = projector_weak_value_pair(&zero, &plus(), &real_state(&[t.sin(), t.cos()]))?;
    out.push(FixtureResult::at_most(
        "complementarity.anomalous_pair.product",
        1.0,
        p.product.re,
    ));
    out.push(FixtureResult {
        name: "complementarity.anomalous_pair.wv_a_abs".into(),
        expected: 1.0,
        observed: p.wv_a.norm(),
        tolerance: 0.0,
        passed: p.wv_a.norm() > 1.0,
    });
    let parts = anomalous_decomposition(&plus(), &zero, &haar_random_state(2, Seed(32))?)?;
    out.push(FixtureResult::new(
        "anomalous.plus_zero.mean",
        0.5,
        parts.mean,
        1e-15,
    ));
    out.push(FixtureResult::new(
        "anomalous.plus_zero.spread",
        0.5,
        parts.spread,
        1e-15,
    ));
    out.push(FixtureResult::at_most(
        "anomalous.plus_zero.reconstruction",
        1e-12,
        parts.reconstruction_residual(),
    ));
    Ok(())
}

fn cv_fixtures(out: &mut Vec<FixtureResult>) -> Result<()> {
    let grid = build_cv_grid(256, -16.0, 16.0, 1.0)?;
    let psi = GridWavefunction::gaussian(&grid, 0.0, 1.0, 0.0)?;
    let ft = psi.momentum_values();
    let worst = grid
        .momenta()
        .iter()
        .zip(&ft)
        .map(|(&p, z)| (z - C64::new(PI.powf(-0.25) * (-p * p / 2.0).exp(), 0.0)).norm())
        .fold(0.0, f64::max);
    out.push(FixtureResult::at_most(
        "cv.gaussian_fourier_pair",
        1e-6,
        worst,
    ));
    let half = window_projector(&grid, Domain::Position, 8.0, 16.0)?;
    complex_pair(
        out,
        "cv.half_line",
        C64::new(0.5, 0.0),
        cv_weak_value(&psi, &half, 0.0)?,
        1e-6,
    );

    let grid = build_cv_grid(512, -20.0, 20.0, 1.0)?;
    let psi = GridWavefunction::gaussian(&grid, 0.0, 1.0, 0.0)?;
    let fx = WindowProjector::full(&grid, Domain::Position);
    let fp = WindowProjector::full(&grid, Domain::Momentum);
    let wx = cv_weak_value(&psi, &fx, 0.0)?;
    let wp = cv_weak_value(&psi, &fp, grid.snap_position(0.0))?;
    complex_pair(
        out,
        "cv.full_window_product",
        C64::new(1.0, 0.0),
        wx * wp,
        1e-8,
    );
    let p_max = *grid.momenta().last().unwrap_or(&0.0);
    let rows = cv_product_study(
        &psi,
        &ProductStudy {
            x_center: 0.0,
            p_center: 0.0,
            x_widths: vec![40.0],
            p_widths: vec![2.0 * p_max - 4.0 * grid.dp()],
            p_post: 0.0,
            x_post: grid.snap_position(0.0),
        },
    )?;
    out.push(FixtureResult::at_most(
        "cv.full_minus_edges_product",
        1e-6,
        rows[0].deviation,
    ));
    Ok(())
}

fn pointer_fixtures(out: &mut Vec<FixtureResult>) -> Result<()> {
    let grid = build_cv_grid(256, -16.0, 16.0, 1.0)?;
    let meter = MeterSpec::gaussian(&grid, 1.0)?;
    let ens = anomalous_ensemble();
    let (_, steps) = pointer_study(&ens, &Observable::pauli_z(), &meter, &[1e-3])?;
    let est = steps[0].estimate.map(|e| e.re).unwrap_or(f64::NAN);
    out.push(FixtureResult::new(
        "pointer.anomalous_estimate",
        1.0 + SQRT_2,
        est,
        0.03,
    ));
    let joint = evolve_joint(ens.pre(), &meter, &Observable::pauli_z(), 0.0)?;
    let post = postselect(&joint, &ens, C64::new(1.0 + SQRT_2, 0.0), 0.0, &meter)?;
    out.push(FixtureResult::new(
        "pointer.zero_coupling_probability",
        ens.overlap_k(),
        post.probability,
        1e-14,
    ));
    let (hbar, g) = (0.7, 0.2);
    let uniform = MeterSpec::finite(Observable::pauli_z(), plus(), None, hbar)?;
    let kicked = first_order_pointer(&uniform, C64::new(0.0, 1.0), g);
    out.push(FixtureResult::new(
        "pointer.imaginary_kick_up",
        FRAC_1_SQRT_2 * (g / hbar).exp(),
        kicked[0].re,
        1e-14,
    ));
    out.push(FixtureResult::new(
        "pointer.imaginary_kick_down",
        FRAC_1_SQRT_2 * (-g / hbar).exp(),
        kicked[1].re,
        1e-14,
    ));
    Ok(())
}

/// Runs every named fixture. Construction errors propagate; value mismatches
/// are recorded as failed fixtures.
pub fn run_fixtures() -> Result<ReportSet> {
    let start = std::time::Instant::now();
    let mut out = Vec::new();
    model_fixtures(&mut out)?;
    relation_fixtures(&mut out)?;
    complementarity_fixtures(&mut out)?;
    cv_fixtures(&mut out)?;
    pointer_fixtures(&mut out)?;
    let mut set = ReportSet::new(None, TOL.relation, Vec::new(), out);
    set.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(set)
}
