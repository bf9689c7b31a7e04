use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{Grid1D, WavefunctionGrid, EDGE_TOL};
use crate::error::{Error, Result};

/// Relative size of the transformed function at the dual-grid edges above
/// which the momentum content is considered aliased.
pub const NYQUIST_TOL: f64 = 1e-8;

pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
    fft.process(buf);
}

/// Signed FFT wavenumbers 2 pi m / (n dx), m in [-n/2, n/2), in FFT order.
pub(crate) fn wavenumbers(grid: &Grid1D) -> Vec<f64> {
    let n = grid.len();
    let dk = 2.0 * PI / (n as f64 * grid.dx());
    (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
}

fn transform(psi: &WavefunctionGrid) -> WavefunctionGrid {
    let grid = psi.grid;
    let n = grid.len();
    let hbar = psi.hbar;
    let dual = grid.dual(hbar);
    let mut buf: Vec<Complex64> =
        psi.values.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -*v }).collect();
    fft_in_place(&mut buf, false);
    let pref = grid.dx() / (2.0 * PI * hbar).sqrt();
    let values = buf
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            // FFT output index k corresponds to frequency k - n/2 after the (-1)^j shift.
            let p = dual.x(k);
            v * Complex64::from_polar(pref, -p * grid.x_min() / hbar)
        })
        .collect();
    debug_assert_eq!(n, dual.len());
    WavefunctionGrid { grid: dual, values, hbar }
}

/// (F psi)(p) = (2 pi hbar)^{-1/2} int exp(-i p y / hbar) psi(y) dy on the dual
/// grid. On a centred grid applying it twice gives psi(-x).
pub fn fourier_h(psi: &WavefunctionGrid) -> Result<WavefunctionGrid> {
    psi.check_edge_decay(EDGE_TOL)?;
    let out = transform(psi);
    let ratio = out.edge_ratio();
    if ratio > NYQUIST_TOL {
        return Err(Error::Coverage(format!(
            "momentum content reaches the Nyquist limit (edge/peak = {ratio:e}); refine the grid or increase hbar"
        )));
    }
    Ok(out)
}

/// Inverse of [`fourier_h`]: maps samples on `position.dual(hbar)` back to
/// the position grid.
pub fn inverse_fourier_h(phi: &WavefunctionGrid, position: &Grid1D) -> Result<WavefunctionGrid> {
    let hbar = phi.hbar;
    let dual = position.dual(hbar);
    if !phi.grid.same_as(&dual) {
        return Err(Error::GridMismatch);
    }
    let n = position.len();
    let mut buf: Vec<Complex64> = phi
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, dual.x(k) * position.x_min() / hbar))
        .collect();
    fft_in_place(&mut buf, true);
    let pref = dual.dx() / (2.0 * PI * hbar).sqrt();
    let values = buf.into_iter().enumerate().map(|(j, v)| if j % 2 == 0 { v * pref } else { -v * pref }).collect();
    debug_assert_eq!(n, phi.values.len());
    WavefunctionGrid::new(*position, values, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::grid::l2_error;

    fn gaussian(grid: Grid1D, hbar: f64, z: Complex64, q0: f64, p0: f64) -> WavefunctionGrid {
        WavefunctionGrid::from_fn(grid, hbar, |x| {
            (Complex64::i() / hbar * (0.5 * z * (x - q0) * (x - q0) + p0 * (x - q0))).exp()
        })
        .unwrap()
    }

    #[test]
    fn ground_state_is_fixed() {
        let g = Grid1D::centered(12.0, 256).unwrap();
        let psi = gaussian(g, 1.0, Complex64::i(), 0.0, 0.0);
        let f = fourier_h(&psi).unwrap();
        assert!(f.grid.same_as(&g.dual(1.0)));
        // On this grid the dual grid has spacing 2 pi / 24 and differs from g;
        // compare with the analytic Gaussian on the dual grid instead.
        let expected = gaussian(f.grid, 1.0, Complex64::i(), 0.0, 0.0);
        assert!(l2_error(&f, &expected, false).unwrap() < 1e-12);
    }

    #[test]
    fn square_is_reflection_and_fourth_power_identity() {
        let n = 256;
        let half = (n as f64 * std::f64::consts::PI / 2.0).sqrt();
        let g = Grid1D::centered(half, n).unwrap();
        assert!(g.dual(1.0).same_as(&g));
        let psi = gaussian(g, 1.0, Complex64::new(0.3, 1.4), 1.1, -0.6);
        let f2 = fourier_h(&fourier_h(&psi).unwrap()).unwrap();
        for j in 0..n {
            assert!((f2.values[j] - psi.values[(n - j) % n]).norm() < 1e-10);
        }
        let f4 = fourier_h(&fourier_h(&f2).unwrap()).unwrap();
        assert!(l2_error(&f4, &psi, false).unwrap() < 1e-10);
    }

    #[test]
    fn width_product_is_hbar() {
        let hbar = 0.5;
        let g = Grid1D::centered(10.0, 512).unwrap();
        let narrow = gaussian(g, hbar, Complex64::new(0.0, 8.0), 1.0, 0.0);
        let f = fourier_h(&narrow).unwrap();
        let spread = |w: &WavefunctionGrid| {
            let norm: f64 = w.values.iter().map(|v| v.norm_sqr()).sum();
            let mean: f64 = w.values.iter().enumerate().map(|(j, v)| w.grid.x(j) * v.norm_sqr()).sum::<f64>() / norm;
            (w.values.iter().enumerate().map(|(j, v)| (w.grid.x(j) - mean).powi(2) * v.norm_sqr()).sum::<f64>() / norm).sqrt()
        };
        let product = spread(&narrow) * spread(&f);
        assert!((product - hbar / 2.0).abs() < 1e-8, "{product}");
        assert!((f.norm() - narrow.norm()).abs() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip_and_edge_checks() {
        let g = Grid1D::new(-7.0, 9.0, 256).unwrap();
        let psi = gaussian(g, 0.7, Complex64::new(-0.2, 1.0), 0.5, 1.0);
        let back = inverse_fourier_h(&fourier_h(&psi).unwrap(), &g).unwrap();
        assert!(l2_error(&back, &psi, false).unwrap() < 1e-12);
        let wide = gaussian(g, 1.0, Complex64::new(0.0, 0.01), 0.0, 0.0);
        assert!(matches!(fourier_h(&wide), Err(Error::EdgeDecay { .. })));
        let fast = gaussian(g, 1e-3, Complex64::new(0.0, 1.0), 1.0, 0.0);
        assert!(matches!(fourier_h(&fast), Err(Error::Coverage(_))));
    }
}
