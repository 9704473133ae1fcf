//! Convergence studies behind the `cv-study` and `pointer` subcommands.

use std::f64::consts::FRAC_1_SQRT_2;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use weakrel::complementarity::{
    build_cv_grid, cv_product_study, cv_weak_value, refinement_study, window_projector, Domain,
    GridWavefunction, ProductStudy,
};
use weakrel::model::{Observable, PpsEnsemble};
use weakrel::numeric::{ComplexVector, StateVector, C64};
use weakrel::pointer::{loglog_slope, pointer_study, MeterSpec};

use crate::config::{CvConfig, PointerConfig, PointerFixture};
use crate::fixtures::anomalous_ensemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CvState {
    /// Real Gaussian centered at 0.
    Gaussian,
    /// Displaced Gaussian with a momentum boost.
    Boosted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvProductRow {
    pub x_width: f64,
    pub p_width: f64,
    pub x_rank: usize,
    pub p_rank: usize,
    pub wv_x: [f64; 2],
    pub wv_p: [f64; 2],
    pub product: [f64; 2],
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRefinementRow {
    pub n: usize,
    pub value: [f64; 2],
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvStudyReport {
    pub version: String,
    pub config: CvConfig,
    pub hbar: f64,
    pub state: CvState,
    pub p_post: f64,
    pub x_post: f64,
    pub products: Vec<CvProductRow>,
    /// Window `[0, 1)` of the centered unit Gaussian against `erf(1/sqrt 2)/2`.
    pub refinement: Vec<CvRefinementRow>,
    pub refinement_monotone: bool,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn run_cv_study(config: &CvConfig, hbar: f64, state: CvState) -> Result<CvStudyReport> {
    let grid = build_cv_grid(
        config.grid_points,
        config.x_range[0],
        config.x_range[1],
        hbar,
    )?;
    let center = 0.5 * (config.x_range[0] + config.x_range[1]);
    let psi = match state {
        CvState::Gaussian => GridWavefunction::gaussian(&grid, center, config.sigma, 0.0)?,
        CvState::Boosted => GridWavefunction::gaussian(
            &grid,
            center + 0.5 * config.sigma,
            config.sigma,
            0.7 * hbar / config.sigma,
        )?,
    };
    let p_post = grid.snap_momentum(0.0);
    let x_post = grid.snap_position(center);
    let rows = cv_product_study(
        &psi,
        &ProductStudy {
            x_center: center,
            p_center: 0.0,
            x_widths: config.widths.clone(),
            p_widths: config.widths.iter().map(|w| w * hbar).collect(),
            p_post,
            x_post,
        },
    )?;
    let products = rows
        .iter()
        .map(|r| CvProductRow {
            x_width: r.x_width,
            p_width: r.p_width,
            x_rank: r.x_rank,
            p_rank: r.p_rank,
            wv_x: pair(r.wv_x),
            wv_p: pair(r.wv_p),
            product: pair(r.product),
            deviation: r.deviation,
        })
        .collect();
    let reference = C64::new(0.5 * erf(FRAC_1_SQRT_2), 0.0);
    let steps = refinement_study(&[128, 256, 512], (-8.0, 8.0), 1.0, Some(reference), |g| {
        let psi = GridWavefunction::gaussian(g, 0.0, 1.0, 0.0)?;
        let win = window_projector(g, Domain::Position, 0.5, 1.0)?;
        cv_weak_value(&psi, &win, 0.0)
    })?;
    let refinement: Vec<CvRefinementRow> = steps
        .iter()
        .map(|s| CvRefinementRow {
            n: s.n,
            value: pair(s.value),
            error: s.error.unwrap_or(f64::NAN),
        })
        .collect();
    let refinement_monotone = refinement.windows(2).all(|w| w[1].error < w[0].error);
    Ok(CvStudyReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config: config.clone(),
        hbar,
        state,
        p_post,
        x_post,
        products,
        refinement,
        refinement_monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerRow {
    pub g: f64,
    pub probability: f64,
    pub first_order_probability: f64,
    pub probability_error: f64,
    pub pointer_residual: f64,
    pub estimate: Option<[f64; 2]>,
    pub estimate_error: Option<f64>,
    pub norm_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerStudyReport {
    pub version: String,
    pub config: PointerConfig,
    pub weak_value: [f64; 2],
    pub rows: Vec<PointerRow>,
    pub pointer_residual_slope: Option<f64>,
    pub probability_error_slope: Option<f64>,
    pub estimate_error_slope: Option<f64>,
    /// Largest `|estimate - weak value| / g` over the ladder.
    pub estimate_constant: Option<f64>,
}

fn pointer_fixture(which: PointerFixture) -> Result<(PpsEnsemble, Observable)> {
    Ok(match which {
        PointerFixture::Anomalous => (anomalous_ensemble(), Observable::pauli_z()),
        PointerFixture::Imaginary => {
            let phi = StateVector::from_amplitudes(&[
                C64::new(FRAC_1_SQRT_2, 0.0),
                C64::new(0.0, FRAC_1_SQRT_2),
            ])?;
            (
                PpsEnsemble::new(StateVector::new(ComplexVector::basis(2, 0)?)?, phi)?,
                Observable::pauli_x(),
            )
        }
    })
}

/// Slope over rows with positive values, `None` when fewer than two remain.
fn slope_of(rows: &[PointerRow], f: impl Fn(&PointerRow) -> Option<f64>) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| f(r).filter(|v| *v > 0.0).map(|v| (r.g, v)))
        .unzip();
    loglog_slope(&xs, &ys)
}

pub fn run_pointer_study(config: &PointerConfig, hbar: f64) -> Result<PointerStudyReport> {
    let half = 16.0 * config.meter_sigma;
    let grid = build_cv_grid(config.meter_points, -half, half, hbar)?;
    let meter = MeterSpec::gaussian(&grid, config.meter_sigma)?;
    let (ens, a) = pointer_fixture(config.fixture)?;
    let (w, steps) = pointer_study(&ens, &a, &meter, &config.g_ladder)?;
    let rows: Vec<PointerRow> = steps
        .iter()
        .map(|s| PointerRow {
            g: s.g,
            probability: s.probability,
            first_order_probability: s.first_order_probability,
            probability_error: s.probability_error,
            pointer_residual: s.pointer_residual,
            estimate: s.estimate.map(pair),
            estimate_error: s.estimate_error,
            norm_defect: s.norm_defect,
        })
        .collect();
    Ok(PointerStudyReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config: config.clone(),
        weak_value: pair(w),
        pointer_residual_slope: slope_of(&rows, |r| Some(r.pointer_residual)),
        probability_error_slope: slope_of(&rows, |r| Some(r.probability_error)),
        estimate_error_slope: slope_of(&rows, |r| r.estimate_error),
        estimate_constant: rows
            .iter()
            .filter_map(|r| r.estimate_error.map(|e| e / r.g))
            .reduce(f64::max),
        rows,
    })
}
