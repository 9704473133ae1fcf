use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::C64;

/// Uniform cell-centered position grid with its discrete momentum partner.
///
/// Positions are `x_j = x_min + (j + 1/2) dx` with `dx = (x_max - x_min)/n`.
/// Momenta are `p_m = m dp` for integer `m` in `(-n/2, n/2]`, with
/// `dp = 2 pi hbar / (n dx)`. The transform `F[k][j] = exp(-i p_k x_j / hbar) / sqrt(n)`
/// maps position amplitudes to momentum amplitudes and is unitary.
#[derive(Debug, Clone)]
pub struct CVGrid {
    n: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
    dp: f64,
    hbar: f64,
    x: Vec<f64>,
    p: Vec<f64>,
    transform: Arc<DMatrix<C64>>,
}

pub fn build_cv_grid(n: usize, x_min: f64, x_max: f64, hbar: f64) -> Result<CVGrid> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("{n} is not a power of two >= 16"),
        });
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
        return Err(Error::InvalidParameter {
            name: "x_range",
            reason: format!("[{x_min}, {x_max}] is not a finite non-empty interval"),
        });
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidParameter {
            name: "hbar",
            reason: format!("{hbar} must be positive"),
        });
    }
    let dx = (x_max - x_min) / n as f64;
    let dp = 2.0 * PI * hbar / (n as f64 * dx);
    let x: Vec<f64> = (0..n).map(|j| x_min + (j as f64 + 0.5) * dx).collect();
    let half = (n / 2) as i64;
    let p: Vec<f64> = (0..n as i64).map(|k| (k - half + 1) as f64 * dp).collect();
    let norm = 1.0 / (n as f64).sqrt();
    let transform = DMatrix::from_fn(n, n, |k, j| C64::from_polar(norm, -p[k] * x[j] / hbar));
    Ok(CVGrid {
        n,
        x_min,
        x_max,
        dx,
        dp,
        hbar,
        x,
        p,
        transform: Arc::new(transform),
    })
}

impl CVGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    /// Ascending momentum samples.
    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    pub fn transform(&self) -> &DMatrix<C64> {
        &self.transform
    }

    pub fn to_momentum(&self, position_amplitudes: &DVector<C64>) -> Result<DVector<C64>> {
        self.check_len(position_amplitudes.len())?;
        Ok(&*self.transform * position_amplitudes)
    }

    pub fn to_position(&self, momentum_amplitudes: &DVector<C64>) -> Result<DVector<C64>> {
        self.check_len(momentum_amplitudes.len())?;
        Ok(self.transform.ad_mul(momentum_amplitudes))
    }

    /// `max |F^dagger F - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.transform.ad_mul(&self.transform);
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for i in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Index of the position sample at `x`.
    pub fn position_index(&self, x: f64) -> Result<usize> {
        on_grid("x", &self.x, x, self.dx)
    }

    /// Index of the momentum sample at `p`.
    pub fn momentum_index(&self, p: f64) -> Result<usize> {
        on_grid("p", &self.p, p, self.dp)
    }

    /// Position sample closest to `x`.
    pub fn snap_position(&self, x: f64) -> f64 {
        self.x[nearest(&self.x, x, self.dx)]
    }

    /// Momentum sample closest to `p`.
    pub fn snap_momentum(&self, p: f64) -> f64 {
        self.p[nearest(&self.p, p, self.dp)]
    }

    pub(crate) fn same_as(&self, other: &CVGrid) -> bool {
        self.n == other.n
            && self.x_min == other.x_min
            && self.x_max == other.x_max
            && self.hbar == other.hbar
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}

fn nearest(samples: &[f64], value: f64, spacing: f64) -> usize {
    let idx = ((value - samples[0]) / spacing).round();
    idx.clamp(0.0, (samples.len() - 1) as f64) as usize
}

fn on_grid(name: &'static str, samples: &[f64], value: f64, spacing: f64) -> Result<usize> {
    let first = samples[0];
    let idx = ((value - first) / spacing).round();
    if idx >= 0.0 && (idx as usize) < samples.len() {
        let i = idx as usize;
        if (samples[i] - value).abs() <= 1e-9 * spacing {
            return Ok(i);
        }
    }
    Err(Error::InvalidParameter {
        name,
        reason: format!("{value} is not a grid point"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_cv_grid(15, -1.0, 1.0, 1.0).is_err());
        assert!(build_cv_grid(8, -1.0, 1.0, 1.0).is_err());
        assert!(build_cv_grid(24, -1.0, 1.0, 1.0).is_err());
        assert!(build_cv_grid(16, 1.0, 1.0, 1.0).is_err());
        assert!(build_cv_grid(16, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn layout() {
        let g = build_cv_grid(16, -8.0, 8.0, 1.0).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert_eq!(g.positions()[0], -7.5);
        assert_eq!(g.positions()[15], 7.5);
        assert!(g.momenta().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.momentum_index(0.0).unwrap(), 7);
        assert!((g.momenta()[15] - 8.0 * g.dp()).abs() < 1e-14);
        assert_eq!(g.position_index(0.5).unwrap(), 8);
        assert!(g.position_index(0.0).is_err());
        assert!(g.position_index(100.5).is_err());
        assert_eq!(g.snap_position(0.1), 0.5);
        assert_eq!(g.snap_position(-100.0), -7.5);
        assert_eq!(g.snap_momentum(0.1), 0.0);
    }

    #[test]
    fn unitary() {
        assert!(
            build_cv_grid(16, -4.0, 4.0, 1.0)
                .unwrap()
                .unitarity_defect()
                <= 1e-12
        );
        for (n, hbar) in [(64, 0.5), (256, 1.0)] {
            let g = build_cv_grid(n, -10.0, 6.0, hbar).unwrap();
            assert!(g.unitarity_defect() <= 1e-10, "n = {n}");
        }
    }

    #[test]
    fn round_trip() {
        let g = build_cv_grid(32, -4.0, 4.0, 1.0).unwrap();
        let v = DVector::from_fn(32, |i, _| C64::new(i as f64, -(i as f64).sqrt()));
        let back = g.to_position(&g.to_momentum(&v).unwrap()).unwrap();
        assert!((back - v).iter().all(|z| z.norm() < 1e-12));
        assert!(g.to_momentum(&DVector::zeros(3)).is_err());
    }
}
