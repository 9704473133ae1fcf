use serde::{Deserialize, Serialize};

use super::grid::CVGrid;
use crate::error::{Error, Result};
use crate::numeric::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Position,
    Momentum,
}

impl Domain {
    pub fn conjugate(self) -> Domain {
        match self {
            Domain::Position => Domain::Momentum,
            Domain::Momentum => Domain::Position,
        }
    }
}

/// Indicator of `[center - width/2, center + width/2)` on one grid domain.
#[derive(Debug, Clone)]
pub struct WindowProjector {
    domain: Domain,
    center: f64,
    width: f64,
    grid: CVGrid,
    indicator: Vec<bool>,
}

pub fn window_projector(
    grid: &CVGrid,
    domain: Domain,
    center: f64,
    width: f64,
) -> Result<WindowProjector> {
    if !(center.is_finite() && width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("center {center}, width {width}"),
        });
    }
    let (lo, hi) = (center - width / 2.0, center + width / 2.0);
    let samples = samples(grid, domain);
    let indicator: Vec<bool> = samples.iter().map(|&s| lo <= s && s < hi).collect();
    if !indicator.iter().any(|&b| b) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("[{lo}, {hi}) contains no grid point"),
        });
    }
    Ok(WindowProjector {
        domain,
        center,
        width,
        grid: grid.clone(),
        indicator,
    })
}

fn samples(grid: &CVGrid, domain: Domain) -> &[f64] {
    match domain {
        Domain::Position => grid.positions(),
        Domain::Momentum => grid.momenta(),
    }
}

impl WindowProjector {
    /// Window covering every sample of `domain`.
    pub fn full(grid: &CVGrid, domain: Domain) -> WindowProjector {
        let s = samples(grid, domain);
        let spacing = match domain {
            Domain::Position => grid.dx(),
            Domain::Momentum => grid.dp(),
        };
        let (lo, hi) = (s[0] - spacing / 2.0, s[s.len() - 1] + spacing / 2.0);
        window_projector(grid, domain, (lo + hi) / 2.0, hi - lo)
            .expect("full window is never empty")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn grid(&self) -> &CVGrid {
        &self.grid
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }

    pub fn rank(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    /// Diagonal matrix in the basis of the window's own domain.
    pub fn matrix_in_own_basis(&self) -> ComplexMatrix {
        let diag: Vec<C64> = self
            .indicator
            .iter()
            .map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        ComplexMatrix::from_diagonal(&diag).expect("grid is non-empty")
    }

    /// Matrix in the position basis.
    pub fn matrix_in_position_basis(&self) -> ComplexMatrix {
        let own = self.matrix_in_own_basis();
        match self.domain {
            Domain::Position => own,
            Domain::Momentum => {
                let f = self.grid.transform();
                ComplexMatrix::from_trusted(f.ad_mul(&(own.as_dmatrix() * f)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::grid::build_cv_grid;
    use super::*;

    #[test]
    fn half_open_edges() {
        let g = build_cv_grid(16, -8.0, 8.0, 1.0).unwrap();
        // samples at -7.5..7.5; [0, 2) holds 0.5 and 1.5
        let w = window_projector(&g, Domain::Position, 1.0, 2.0).unwrap();
        assert_eq!(w.rank(), 2);
        // [0.5, 1.5) holds only 0.5
        let w = window_projector(&g, Domain::Position, 1.0, 1.0).unwrap();
        assert_eq!(w.rank(), 1);
        assert!(window_projector(&g, Domain::Position, 0.0, 0.5).is_err());
        assert!(window_projector(&g, Domain::Position, 0.0, -1.0).is_err());
    }

    #[test]
    fn sub_spacing_window_is_rank_one() {
        let g = build_cv_grid(16, -8.0, 8.0, 1.0).unwrap();
        let w = window_projector(&g, Domain::Position, 2.5, 0.5).unwrap();
        assert_eq!(w.rank(), 1);
        let e =
            nalgebra::DVector::from_fn(16, |i, _| C64::new(if i == 10 { 1.0 } else { 0.0 }, 0.0));
        let m = w.matrix_in_own_basis();
        assert_eq!(m.as_dmatrix() * &e, e);
    }

    #[test]
    fn full_windows() {
        let g = build_cv_grid(32, -3.0, 5.0, 0.7).unwrap();
        for d in [Domain::Position, Domain::Momentum] {
            let w = WindowProjector::full(&g, d);
            assert_eq!(w.rank(), 32);
            let m = w.matrix_in_position_basis();
            let id = ComplexMatrix::identity(32).unwrap();
            assert!(m.max_abs_diff(&id).unwrap() < 1e-12);
        }
    }

    #[test]
    fn momentum_window_is_projector() {
        let g = build_cv_grid(32, -4.0, 4.0, 1.0).unwrap();
        let w = window_projector(&g, Domain::Momentum, 0.0, 3.0).unwrap();
        let m = w.matrix_in_position_basis();
        assert!(m.hermiticity_defect() < 1e-12);
        assert!(m.mul(&m).unwrap().max_abs_diff(&m).unwrap() < 1e-12);
        let trace: C64 = (0..32).map(|i| m.as_dmatrix()[(i, i)]).sum();
        assert!((trace.re - w.rank() as f64).abs() < 1e-10);
    }
}
