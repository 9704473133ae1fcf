//! Exact von Neumann system-meter simulation.
//!
//! The interaction `exp(-i g A (x) M / hbar)` is applied through the spectral
//! decomposition of `A`, so every joint state is exact up to roundoff. Joint
//! vectors are laid out system-major: index `s * meter_dim + m`.

use nalgebra::{DMatrix, DVector};

use crate::complementarity::{CVGrid, GridWavefunction};
use crate::error::{Error, Result};
use crate::model::{weak_value, Observable, PpsEnsemble};
use crate::numeric::{ComplexVector, StateVector, C64};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub enum MeterKind {
    Finite,
    Grid(CVGrid),
}

/// Meter Hilbert space, coupling observable `M`, initial state and readout.
#[derive(Debug, Clone)]
pub struct MeterSpec {
    kind: MeterKind,
    m: Observable,
    initial: StateVector,
    conjugate: Option<Observable>,
    hbar: f64,
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            reason: format!("{hbar} must be positive"),
        });
    }
    Ok(())
}

impl MeterSpec {
    pub fn finite(
        m: Observable,
        initial: StateVector,
        conjugate: Option<Observable>,
        hbar: f64,
    ) -> Result<Self> {
        check_hbar(hbar)?;
        crate::numeric::linalg::check_dim(m.dim(), initial.dim())?;
        if let Some(c) = &conjugate {
            crate::numeric::linalg::check_dim(m.dim(), c.dim())?;
        }
        Ok(Self {
            kind: MeterKind::Finite,
            m,
            initial,
            conjugate,
            hbar,
        })
    }

    /// Grid meter coupled through momentum and read out in position.
    pub fn grid(initial: &GridWavefunction) -> Result<Self> {
        let grid = initial.grid();
        let eigvecs: DMatrix<C64> = grid.transform().adjoint();
        let m = Observable::from_spectrum(grid.momenta().to_vec(), eigvecs, &Tolerances::DEFAULT)?;
        let diag: Vec<C64> = grid.positions().iter().map(|&x| C64::new(x, 0.0)).collect();
        let position = Observable::new(crate::numeric::ComplexMatrix::from_diagonal(&diag)?)?;
        let amps = initial.amplitudes();
        Ok(Self {
            kind: MeterKind::Grid(grid.clone()),
            m,
            initial: StateVector::new(ComplexVector::new(amps)?)?,
            conjugate: Some(position),
            hbar: grid.hbar(),
        })
    }

    /// Grid meter with a real Gaussian pointer of position width `sigma` centered at 0.
    pub fn gaussian(grid: &CVGrid, sigma: f64) -> Result<Self> {
        Self::grid(&GridWavefunction::gaussian(grid, 0.0, sigma, 0.0)?)
    }

    pub fn kind(&self) -> &MeterKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn coupling(&self) -> &Observable {
        &self.m
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn conjugate(&self) -> Option<&Observable> {
        self.conjugate.as_ref()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `exp(-i g z M / hbar) Phi` for complex `z`.
    fn kick(&self, z: C64, g: f64) -> DVector<C64> {
        let factor = -C64::i() * z * (g / self.hbar);
        self.m
            .spectrum()
            .apply_function(|m| (factor * m).exp(), self.initial.as_dvector())
    }
}

#[derive(Debug, Clone)]
pub struct JointState {
    vector: DVector<C64>,
    system_dim: usize,
    meter_dim: usize,
}

impl JointState {
    pub fn vector(&self) -> &DVector<C64> {
        &self.vector
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn meter_dim(&self) -> usize {
        self.meter_dim
    }

    pub fn norm_defect(&self) -> f64 {
        (self.vector.norm() - 1.0).abs()
    }
}

fn check_g(g: f64) -> Result<()> {
    if !g.is_finite() {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: format!("{g} is not finite"),
        });
    }
    Ok(())
}

/// `sum_a Pi_a psi (x) exp(-i g a M / hbar) Phi`.
pub fn evolve_joint(
    psi: &StateVector,
    meter: &MeterSpec,
    a: &Observable,
    g: f64,
) -> Result<JointState> {
    check_g(g)?;
    crate::numeric::linalg::check_dim(a.dim(), psi.dim())?;
    let (sd, md) = (psi.dim(), meter.dim());
    let mut vector = DVector::zeros(sd * md);
    for (value, proj) in a.projectors() {
        let branch = proj.apply(psi.as_vector())?;
        let kicked = meter.kick(C64::new(value, 0.0), g);
        for s in 0..sd {
            let amp = branch[s];
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            for m in 0..md {
                vector[s * md + m] += amp * kicked[m];
            }
        }
    }
    Ok(JointState {
        vector,
        system_dim: sd,
        meter_dim: md,
    })
}

#[derive(Debug, Clone)]
pub struct PostselectionResult {
    /// `(<phi| (x) 1)` applied to the joint state.
    pub pointer_unnormalized: ComplexVector,
    pub probability: f64,
    /// `k (1 + 2 (g/hbar) Im<A>_w <M>)`
    pub first_order_probability: f64,
}

/// Projects the system onto the post-selected state of `ens`.
pub fn postselect(
    joint: &JointState,
    ens: &PpsEnsemble,
    weak_value: C64,
    g: f64,
    meter: &MeterSpec,
) -> Result<PostselectionResult> {
    crate::numeric::linalg::check_dim(joint.system_dim, ens.dim())?;
    crate::numeric::linalg::check_dim(joint.meter_dim, meter.dim())?;
    let md = joint.meter_dim;
    let phi = ens.post();
    let pointer = DVector::from_fn(md, |m, _| {
        (0..joint.system_dim)
            .map(|s| phi[s].conj() * joint.vector[s * md + m])
            .sum::<C64>()
    });
    let probability = pointer.norm_squared();
    let mean_m = meter.m.expectation(&meter.initial)?;
    let first_order_probability =
        ens.overlap_k() * (1.0 + 2.0 * (g / meter.hbar) * weak_value.im * mean_m);
    Ok(PostselectionResult {
        pointer_unnormalized: ComplexVector::from_trusted(pointer),
        probability,
        first_order_probability,
    })
}

/// `exp(-i g <A>_w M / hbar) Phi`, unnormalized when the weak value is complex.
pub fn first_order_pointer(meter: &MeterSpec, weak_value: C64, g: f64) -> ComplexVector {
    ComplexVector::from_trusted(meter.kick(weak_value, g))
}

/// `|| exact pointer - <phi|psi> first_order_pointer ||`.
pub fn first_order_residual(
    result: &PostselectionResult,
    ens: &PpsEnsemble,
    meter: &MeterSpec,
    weak_value: C64,
    g: f64,
) -> f64 {
    let amp = ens.amplitude();
    let predicted = meter.kick(weak_value, g).map(|z| z * amp);
    (result.pointer_unnormalized.as_dvector() - predicted).norm()
}

fn readout_means(meter: &MeterSpec, pointer: &DVector<C64>) -> Result<(f64, f64)> {
    let norm = pointer.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::EstimationUndefined(format!(
            "post-selected pointer has norm {norm}"
        )));
    }
    let state = StateVector::from_trusted(pointer.map(|z| z / norm));
    let conj = meter.conjugate.as_ref().ok_or_else(|| {
        Error::EstimationUndefined("meter has no conjugate readout observable".into())
    })?;
    Ok((conj.expectation(&state)?, meter.m.expectation(&state)?))
}

/// Weak value inferred from the shifts of `<conjugate>` and `<M>` between the
/// initial and the post-selected pointer.
///
/// The linear response to the weak value is calibrated at the working `g` by
/// simulating first-order pointers for weak values 1 and `i`, and the 2x2
/// response system is solved for the real and imaginary parts.
pub fn estimate_weak_value(meter: &MeterSpec, pointer_post: &ComplexVector, g: f64) -> Result<C64> {
    check_g(g)?;
    crate::numeric::linalg::check_dim(meter.dim(), pointer_post.dim())?;
    if g == 0.0 {
        return Err(Error::EstimationUndefined("no coupling at g = 0".into()));
    }
    let base = readout_means(meter, meter.initial.as_dvector())?;
    let shift = |p: &DVector<C64>| -> Result<(f64, f64)> {
        let (c, m) = readout_means(meter, p)?;
        Ok((c - base.0, m - base.1))
    };
    let (c_re, m_re) = shift(&meter.kick(C64::new(1.0, 0.0), g))?;
    let (c_im, m_im) = shift(&meter.kick(C64::new(0.0, 1.0), g))?;
    let (dc, dm) = shift(pointer_post.as_dvector())?;
    let det = c_re * m_im - c_im * m_re;
    let scale = (c_re.abs() + c_im.abs()) * (m_re.abs() + m_im.abs());
    if !(det.abs() > 1e-12 * scale) || scale == 0.0 {
        return Err(Error::EstimationUndefined(
            "meter readout does not resolve both parts of the weak value".into(),
        ));
    }
    let re = (dc * m_im - c_im * dm) / det;
    let im = (c_re * dm - dc * m_re) / det;
    Ok(C64::new(re, im))
}

/// One rung of a coupling-strength ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerStep {
    pub g: f64,
    pub probability: f64,
    pub first_order_probability: f64,
    /// `|probability - first_order_probability|`
    pub probability_error: f64,
    pub pointer_residual: f64,
    pub estimate: Option<C64>,
    /// `|estimate - weak value|`
    pub estimate_error: Option<f64>,
    pub norm_defect: f64,
}

/// Exact simulation across `g_ladder` compared with the first-order theory.
pub fn pointer_study(
    ens: &PpsEnsemble,
    a: &Observable,
    meter: &MeterSpec,
    g_ladder: &[f64],
) -> Result<(C64, Vec<PointerStep>)> {
    let w = weak_value(ens, a)?.value;
    let mut steps = Vec::with_capacity(g_ladder.len());
    for &g in g_ladder {
        let joint = evolve_joint(ens.pre(), meter, a, g)?;
        let post = postselect(&joint, ens, w, g, meter)?;
        let estimate = match meter.conjugate {
            Some(_) => Some(estimate_weak_value(meter, &post.pointer_unnormalized, g)?),
            None => None,
        };
        steps.push(PointerStep {
            g,
            probability: post.probability,
            first_order_probability: post.first_order_probability,
            probability_error: (post.probability - post.first_order_probability).abs(),
            pointer_residual: first_order_residual(&post, ens, meter, w, g),
            estimate,
            estimate_error: estimate.map(|e| (e - w).norm()),
            norm_defect: joint.norm_defect(),
        });
    }
    Ok((w, steps))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
