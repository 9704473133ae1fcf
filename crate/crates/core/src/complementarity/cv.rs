use nalgebra::DVector;

use super::grid::{build_cv_grid, CVGrid};
use super::window::{Domain, WindowProjector};
use crate::error::{Error, Result};
use crate::numeric::C64;
use crate::tolerance::Tolerances;

/// Continuum wavefunction samples `psi(x_j)` with `sum |psi|^2 dx = 1`.
#[derive(Debug, Clone)]
pub struct GridWavefunction {
    grid: CVGrid,
    values: Vec<C64>,
}

impl GridWavefunction {
    pub fn new(grid: &CVGrid, values: Vec<C64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(i) = values
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm.sqrt()));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f` on the grid and normalizes.
    pub fn from_fn(grid: &CVGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let raw: Vec<C64> = grid.positions().iter().map(|&x| f(x)).collect();
        if let Some(i) = raw
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let norm = (raw.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let values = raw.into_iter().map(|z| z / norm).collect();
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// `exp(-(x - x0)^2 / (2 sigma^2) + i p0 x / hbar)`, normalized on the grid.
    pub fn gaussian(grid: &CVGrid, x0: f64, sigma: f64, p0: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("{sigma} must be positive"),
            });
        }
        let hbar = grid.hbar();
        Self::from_fn(grid, |x| {
            C64::from_polar(
                (-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp(),
                p0 * x / hbar,
            )
        })
    }

    pub fn grid(&self) -> &CVGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Unit-norm position amplitudes `psi(x_j) sqrt(dx)`.
    pub fn amplitudes(&self) -> DVector<C64> {
        let s = self.grid.dx().sqrt();
        DVector::from_iterator(self.values.len(), self.values.iter().map(|z| z * s))
    }

    /// Unit-norm momentum amplitudes.
    pub fn momentum_amplitudes(&self) -> DVector<C64> {
        self.grid.transform() * self.amplitudes()
    }

    /// Continuum momentum wavefunction `psi~(p_k)`.
    pub fn momentum_values(&self) -> Vec<C64> {
        let s = 1.0 / self.grid.dp().sqrt();
        self.momentum_amplitudes().iter().map(|z| z * s).collect()
    }
}

/// Weak value of a window projector post-selected on a single grid point of
/// the conjugate domain.
pub fn cv_weak_value(
    psi: &GridWavefunction,
    window: &WindowProjector,
    postselect: f64,
) -> Result<C64> {
    let grid = psi.grid();
    if !grid.same_as(window.grid()) {
        return Err(Error::ContractViolation(
            "window and wavefunction live on different grids".into(),
        ));
    }
    let f = grid.transform();
    let c = psi.amplitudes();
    let inside = window.indicator();
    let (num, den) = match window.domain() {
        Domain::Position => {
            let k = grid.momentum_index(postselect)?;
            let mut num = C64::new(0.0, 0.0);
            let mut den = C64::new(0.0, 0.0);
            for j in 0..grid.n() {
                let term = f[(k, j)] * c[j];
                den += term;
                if inside[j] {
                    num += term;
                }
            }
            (num, den)
        }
        Domain::Momentum => {
            let j = grid.position_index(postselect)?;
            let d = f * &c;
            let num: C64 = (0..grid.n())
                .filter(|&k| inside[k])
                .map(|k| f[(k, j)].conj() * d[k])
                .sum();
            (num, c[j])
        }
    };
    if !(den.norm() > Tolerances::DEFAULT.overlap) {
        return Err(Error::OrthogonalPostselection(den.norm()));
    }
    Ok(num / den)
}

/// Window layout for [`cv_product_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStudy {
    pub x_center: f64,
    pub p_center: f64,
    pub x_widths: Vec<f64>,
    pub p_widths: Vec<f64>,
    /// Momentum point the position window is post-selected on.
    pub p_post: f64,
    /// Position point the momentum window is post-selected on.
    pub x_post: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductRow {
    pub x_width: f64,
    pub p_width: f64,
    pub x_rank: usize,
    pub p_rank: usize,
    pub wv_x: C64,
    pub wv_p: C64,
    pub product: C64,
    /// `|product - 1|`
    pub deviation: f64,
}

/// Product of the two reverse-order window weak values over every width pair.
pub fn cv_product_study(psi: &GridWavefunction, study: &ProductStudy) -> Result<Vec<ProductRow>> {
    let grid = psi.grid();
    let mut x_side = Vec::with_capacity(study.x_widths.len());
    for &w in &study.x_widths {
        let win = super::window::window_projector(grid, Domain::Position, study.x_center, w)?;
        x_side.push((w, win.rank(), cv_weak_value(psi, &win, study.p_post)?));
    }
    let mut p_side = Vec::with_capacity(study.p_widths.len());
    for &w in &study.p_widths {
        let win = super::window::window_projector(grid, Domain::Momentum, study.p_center, w)?;
        p_side.push((w, win.rank(), cv_weak_value(psi, &win, study.x_post)?));
    }
    let mut rows = Vec::with_capacity(x_side.len() * p_side.len());
    for &(x_width, x_rank, wv_x) in &x_side {
        for &(p_width, p_rank, wv_p) in &p_side {
            let product = wv_x * wv_p;
            rows.push(ProductRow {
                x_width,
                p_width,
                x_rank,
                p_rank,
                wv_x,
                wv_p,
                product,
                deviation: (product - C64::new(1.0, 0.0)).norm(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementStep {
    pub n: usize,
    pub value: C64,
    /// `|value - previous value|`, absent on the first step.
    pub change: Option<f64>,
    /// `|value - reference|` when a reference is supplied.
    pub error: Option<f64>,
}

/// Evaluates `quantity` on grids of each size in `ns` over a fixed interval.
pub fn refinement_study(
    ns: &[usize],
    x_range: (f64, f64),
    hbar: f64,
    reference: Option<C64>,
    quantity: impl Fn(&CVGrid) -> Result<C64>,
) -> Result<Vec<RefinementStep>> {
    let mut steps: Vec<RefinementStep> = Vec::with_capacity(ns.len());
    for &n in ns {
        let grid = build_cv_grid(n, x_range.0, x_range.1, hbar)?;
        let value = quantity(&grid)?;
        steps.push(RefinementStep {
            n,
            value,
            change: steps.last().map(|prev| (value - prev.value).norm()),
            error: reference.map(|r| (value - r).norm()),
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::super::window::window_projector;
    use super::*;
    use std::f64::consts::PI;

    fn continuum_ft(p: f64, x0: f64, sigma: f64, p0: f64, hbar: f64) -> C64 {
        let amp = (sigma * sigma / (PI * hbar * hbar)).powf(0.25)
            * (-(sigma * (p - p0) / hbar).powi(2) / 2.0).exp();
        C64::from_polar(amp, -(p - p0) * x0 / hbar)
    }

    #[test]
    fn gaussian_transform_matches_continuum() {
        for (hbar, x0, p0) in [(1.0, 0.0, 0.0), (1.0, 0.7, 1.3), (0.5, -1.1, 0.4)] {
            let grid = build_cv_grid(256, -16.0, 16.0, hbar).unwrap();
            let psi = GridWavefunction::gaussian(&grid, x0, 1.0, p0).unwrap();
            let got = psi.momentum_values();
            for (k, &p) in grid.momenta().iter().enumerate() {
                let want = continuum_ft(p, x0, 1.0, p0, hbar);
                assert!((got[k] - want).norm() <= 1e-6, "hbar {hbar} p {p}");
            }
        }
    }

    #[test]
    fn half_line_is_one_half() {
        let grid = build_cv_grid(256, -16.0, 16.0, 1.0).unwrap();
        let psi = GridWavefunction::gaussian(&grid, 0.0, 1.0, 0.0).unwrap();
        let win = window_projector(&grid, Domain::Position, 8.0, 16.0).unwrap();
        let wv = cv_weak_value(&psi, &win, 0.0).unwrap();
        assert!((wv - C64::new(0.5, 0.0)).norm() <= 1e-6);
    }

    #[test]
    fn full_windows_give_one() {
        let grid = build_cv_grid(128, -12.0, 12.0, 1.0).unwrap();
        let psi = GridWavefunction::gaussian(&grid, 0.3, 1.2, 0.5).unwrap();
        let study = ProductStudy {
            x_center: 0.0,
            p_center: 0.0,
            x_widths: vec![24.0],
            p_widths: vec![2.0 * grid.momenta()[127]],
            p_post: grid.snap_momentum(0.4),
            x_post: grid.snap_position(0.2),
        };
        let rows = cv_product_study(&psi, &study).unwrap();
        assert_eq!(rows[0].x_rank, 128);
        assert_eq!(rows[0].p_rank, 127);
        assert!(rows[0].deviation <= 1e-6);
        let full = WindowProjector::full(&grid, Domain::Momentum);
        let wv = cv_weak_value(&psi, &full, study.x_post).unwrap();
        assert!((wv - C64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn narrow_windows_deviate() {
        let grid = build_cv_grid(128, -12.0, 12.0, 1.0).unwrap();
        let psi = GridWavefunction::gaussian(&grid, 0.0, 1.0, 0.0).unwrap();
        let study = ProductStudy {
            x_center: 0.0,
            p_center: 0.0,
            x_widths: vec![1.0],
            p_widths: vec![1.0],
            p_post: grid.snap_momentum(0.5),
            x_post: grid.snap_position(0.5),
        };
        let rows = cv_product_study(&psi, &study).unwrap();
        assert!(rows[0].deviation > 0.1);
    }

    #[test]
    fn off_grid_postselection_rejected() {
        let grid = build_cv_grid(32, -4.0, 4.0, 1.0).unwrap();
        let psi = GridWavefunction::gaussian(&grid, 0.0, 1.0, 0.0).unwrap();
        let win = window_projector(&grid, Domain::Position, 0.0, 2.0).unwrap();
        assert!(cv_weak_value(&psi, &win, 0.123).is_err());
    }

    #[test]
    fn normalization_enforced() {
        let grid = build_cv_grid(16, -4.0, 4.0, 1.0).unwrap();
        assert!(matches!(
            GridWavefunction::new(&grid, vec![C64::new(1.0, 0.0); 16]),
            Err(Error::NotNormalized(_))
        ));
        assert!(GridWavefunction::new(&grid, vec![C64::new(0.5, 0.0); 3]).is_err());
    }
}
