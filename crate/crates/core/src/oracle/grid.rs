use num_complex::Complex64;

use crate::error::{Error, Result};

/// Required decay at the grid edges, relative to the peak modulus.
pub const EDGE_TOL: f64 = 1e-12;

/// Uniform periodic grid x_j = x_min + j dx, j = 0..n, dx = (x_max - x_min) / n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!("empty grid interval [{x_min}, {x_max}]")));
        }
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size must be a power of two >= 64, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid on [-half_width, half_width) whose point j = n/2 is the origin.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Largest |x| on the grid.
    pub fn abs_max(&self) -> f64 {
        self.x_min.abs().max(self.x(self.n - 1).abs())
    }

    /// Momentum grid dual to this one for a given hbar: spacing
    /// 2 pi hbar / (n dx), centred so that point n/2 is p = 0.
    pub fn dual(&self, hbar: f64) -> Grid1D {
        let dp = 2.0 * std::f64::consts::PI * hbar / (self.n as f64 * self.dx());
        let half = self.n as f64 / 2.0 * dp;
        Grid1D { x_min: -half, x_max: half, n: self.n }
    }

    /// Equality up to rounding of the endpoints.
    pub fn same_as(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * (self.x_max - self.x_min);
        self.n == other.n && (self.x_min - other.x_min).abs() <= tol && (self.x_max - other.x_max).abs() <= tol
    }
}

/// Wave function samples on a grid, carrying the value of hbar.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    pub hbar: f64,
}

impl WavefunctionGrid {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension { expected: grid.len(), got: values.len() });
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("wave function has non-finite values".into()));
        }
        Ok(Self { grid, values, hbar })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid1D, hbar: f64, f: F) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect(), hbar)
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.norm()))
    }

    /// Largest modulus among the two outermost points at either end, relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.values.len();
        let edge = [0, 1, n - 2, n - 1].iter().fold(0.0_f64, |a, &j| a.max(self.values[j].norm()));
        let peak = self.peak();
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }

    pub fn check_edge_decay(&self, tol: f64) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio > tol {
            return Err(Error::EdgeDecay { ratio });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &WavefunctionGrid) -> Result<()> {
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// <self, other> = sum conj(self) other dx.
    pub fn inner(&self, other: &WavefunctionGrid) -> Result<Complex64> {
        self.check_compatible(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }

    pub fn scaled(&self, c: Complex64) -> WavefunctionGrid {
        WavefunctionGrid { grid: self.grid, values: self.values.iter().map(|v| v * c).collect(), hbar: self.hbar }
    }

    pub fn map_values<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> WavefunctionGrid {
        let values = self.values.iter().enumerate().map(|(j, v)| f(self.grid.x(j), *v)).collect();
        WavefunctionGrid { grid: self.grid, values, hbar: self.hbar }
    }
}

/// L2 distance, optionally minimised over a global phase applied to `psi2`.
pub fn l2_error(psi1: &WavefunctionGrid, psi2: &WavefunctionGrid, mod_global_phase: bool) -> Result<f64> {
    psi1.check_compatible(psi2)?;
    let phase = if mod_global_phase {
        let ov = psi2.inner(psi1)?;
        if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    let s: f64 = psi1.values.iter().zip(&psi2.values).map(|(a, b)| (a - phase * b).norm_sqr()).sum();
    Ok((s * psi1.grid.dx()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 63).is_err());
        assert!(Grid1D::new(0.0, 1.0, 96).is_err());
        assert!(Grid1D::new(1.0, 1.0, 64).is_err());
        let g = Grid1D::centered(4.0, 64).unwrap();
        assert_eq!(g.x(32), 0.0);
        assert_eq!(g.dx(), 0.125);
    }

    #[test]
    fn l2_examples() {
        let g = Grid1D::centered(1.0, 64).unwrap();
        let dx = g.dx();
        let mut a = vec![Complex64::new(0.0, 0.0); 64];
        let mut b = a.clone();
        a[3] = Complex64::new(1.0 / dx.sqrt(), 0.0);
        b[9] = Complex64::new(1.0 / dx.sqrt(), 0.0);
        let (a, b) = (WavefunctionGrid::new(g, a, 1.0).unwrap(), WavefunctionGrid::new(g, b, 1.0).unwrap());
        assert_eq!(l2_error(&a, &a, false).unwrap(), 0.0);
        assert!((l2_error(&a, &b, false).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let psi = WavefunctionGrid::from_fn(g, 1.0, |x| Complex64::new((-x * x).exp(), x)).unwrap();
        let rotated = psi.scaled(Complex64::from_polar(1.0, 0.7));
        assert!(l2_error(&rotated, &psi, true).unwrap() < 1e-12);
        assert!(l2_error(&rotated, &psi, false).unwrap() > 0.1);
        let other = WavefunctionGrid { hbar: 0.5, ..psi.clone() };
        assert!(matches!(l2_error(&psi, &other, true), Err(Error::HbarMismatch(..))));
    }
}
