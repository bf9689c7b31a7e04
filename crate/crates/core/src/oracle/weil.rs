use num_complex::Complex64;

use super::fourier::{fft_in_place, fourier_h};
use super::grid::{WavefunctionGrid, EDGE_TOL};
use crate::error::{Error, Result};

/// One-dimensional Weil-representation generators with scalar parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeilAction {
    /// Multiply by exp(i B x^2 / 2 hbar).
    Shear(f64),
    /// psi(x) -> sqrt(A) psi(A x), A > 0; maps the germ Z to A^2 Z.
    Linear(f64),
    /// The hbar-scaled Fourier transform.
    Fourier,
}

/// Evaluate the trigonometric interpolant of the grid samples at `points`
/// (zero outside the grid interval).
fn interpolate(psi: &WavefunctionGrid, points: &[f64]) -> Vec<Complex64> {
    let grid = psi.grid;
    let n = grid.len();
    let mut coef = psi.values.clone();
    fft_in_place(&mut coef, false);
    let len = grid.x_max() - grid.x_min();
    points
        .iter()
        .map(|&x| {
            if x < grid.x_min() || x >= grid.x_max() {
                return Complex64::new(0.0, 0.0);
            }
            let u = (x - grid.x_min()) / len;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in coef.iter().enumerate() {
                let m = if j < n / 2 {
                    j as f64
                } else if j == n / 2 {
                    // Split the Nyquist term symmetrically to keep the interpolant real for real data.
                    acc += 0.5 * c * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (n / 2) as f64 * u);
                    n as f64 / 2.0
                } else {
                    j as f64 - n as f64
                };
                let w = if j == n / 2 { 0.5 } else { 1.0 };
                acc += w * c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m * u);
            }
            acc / n as f64
        })
        .collect()
}

pub fn weil_generator_act(kind: WeilAction, psi: &WavefunctionGrid) -> Result<WavefunctionGrid> {
    match kind {
        WeilAction::Shear(b) => {
            let hbar = psi.hbar;
            Ok(psi.map_values(|x, v| v * Complex64::from_polar(1.0, b * x * x / (2.0 * hbar))))
        }
        WeilAction::Linear(a) => {
            if !(a > 0.0) {
                return Err(Error::InvalidArgument(format!("linear generator needs A > 0, got {a}")));
            }
            psi.check_edge_decay(EDGE_TOL)?;
            let pts: Vec<f64> = psi.grid.points().iter().map(|x| a * x).collect();
            let values = interpolate(psi, &pts).into_iter().map(|v| v * a.sqrt()).collect();
            let out = WavefunctionGrid::new(psi.grid, values, psi.hbar)?;
            if out.edge_ratio() > 1e-10 {
                return Err(Error::Coverage(format!("resampled function reaches the grid edge (A = {a})")));
            }
            Ok(out)
        }
        WeilAction::Fourier => fourier_h(psi),
    }
}
