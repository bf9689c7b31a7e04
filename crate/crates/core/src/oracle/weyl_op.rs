use num_complex::Complex64;

use super::fourier::{fft_in_place, wavenumbers};
use super::grid::{WavefunctionGrid, EDGE_TOL};
use crate::error::{Error, Result};
use crate::moyal::PolySymbol;

/// Largest total degree accepted by [`apply_weyl_op`].
pub const MAX_WEYL_DEGREE: u32 = 8;

/// Spectral p^b: multiply the FFT by (hbar k)^b. The Nyquist mode is dropped
/// for odd b so that the discrete operator stays Hermitian.
pub(crate) fn apply_p_power(values: &[Complex64], ks: &[f64], hbar: f64, b: u32) -> Vec<Complex64> {
    if b == 0 {
        return values.to_vec();
    }
    let n = values.len();
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    for (j, v) in buf.iter_mut().enumerate() {
        let k = if j == n / 2 && b % 2 == 1 { 0.0 } else { ks[j] };
        *v *= (hbar * k).powi(b as i32) / n as f64;
    }
    fft_in_place(&mut buf, true);
    buf
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Precomputed Weyl quantization of a one-dimensional symbol for repeated use.
pub(crate) struct WeylOperator {
    /// (coefficient, a, b) for the monomials q^a p^b with hbar substituted.
    terms: Vec<(Complex64, u32, u32)>,
    hbar: f64,
}

impl WeylOperator {
    pub fn new(symbol: &PolySymbol, hbar: f64) -> Result<Self> {
        if symbol.n() != 1 {
            return Err(Error::InvalidArgument("the grid oracle supports one degree of freedom".into()));
        }
        if symbol.degree() > MAX_WEYL_DEGREE {
            return Err(Error::SizeCap(format!("symbol degree {} exceeds {MAX_WEYL_DEGREE}", symbol.degree())));
        }
        let terms = symbol.to_numeric(hbar).terms.into_iter().map(|(e, c)| (c, e[0], e[1])).collect();
        Ok(Self { terms, hbar })
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(c, _, _)| c.im.abs() <= 1e-14 * c.norm().max(1.0))
    }

    /// Upper bound on the operator norm on a grid with |x| <= x_max, |p| <= p_max.
    pub fn norm_bound(&self, x_max: f64, p_max: f64) -> f64 {
        self.terms.iter().map(|(c, a, b)| c.norm() * x_max.powi(*a as i32) * p_max.powi(*b as i32)).sum()
    }

    /// q^a p^b acts as 2^{-a} sum_k C(a, k) x^k p^b x^{a-k}.
    pub fn apply(&self, psi: &WavefunctionGrid) -> WavefunctionGrid {
        let grid = psi.grid;
        let xs = grid.points();
        let ks = wavenumbers(&grid);
        let mut out = vec![Complex64::new(0.0, 0.0); xs.len()];
        for &(c, a, b) in &self.terms {
            let scale = c / 2f64.powi(a as i32);
            for k in 0..=a {
                let weight = scale * binomial(a, k);
                let inner: Vec<Complex64> =
                    psi.values.iter().zip(&xs).map(|(v, x)| v * x.powi((a - k) as i32)).collect();
                let mid = if b == 0 { inner } else { apply_p_power(&inner, &ks, self.hbar, b) };
                for (o, (m, x)) in out.iter_mut().zip(mid.iter().zip(&xs)) {
                    *o += weight * m * x.powi(k as i32);
                }
            }
        }
        WavefunctionGrid { grid, values: out, hbar: psi.hbar }
    }
}

/// Apply the Weyl quantization of a one-dimensional polynomial symbol
/// (with hbar replaced by the wave function's hbar).
pub fn apply_weyl_op(symbol: &PolySymbol, psi: &WavefunctionGrid) -> Result<WavefunctionGrid> {
    psi.check_edge_decay(EDGE_TOL)?;
    Ok(WeylOperator::new(symbol, psi.hbar)?.apply(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::{parse, star, OmegaConvention};
    use crate::oracle::grid::{l2_error, Grid1D};

    fn test_state(hbar: f64) -> WavefunctionGrid {
        let g = Grid1D::centered(14.0, 512).unwrap();
        WavefunctionGrid::from_fn(g, hbar, |x| {
            let herm = Complex64::new(1.0 + 0.5 * x - 0.3 * x * x, 0.2 * x);
            herm * (Complex64::new(-0.5 * (x - 0.3).powi(2), 0.4 * x / hbar)).exp()
        })
        .unwrap()
    }

    #[test]
    fn position_is_multiplication() {
        let psi = test_state(1.0);
        let out = apply_weyl_op(&parse("q1").unwrap(), &psi).unwrap();
        let expected = psi.map_values(|x, v| v * x);
        assert!(l2_error(&out, &expected, false).unwrap() < 1e-12);
    }

    #[test]
    fn qp_is_symmetrised_dilation() {
        let hbar = 0.7;
        let psi = test_state(hbar);
        let out = apply_weyl_op(&parse("q1*p1").unwrap(), &psi).unwrap();
        // -i hbar (x d/dx + 1/2) psi with the derivative done spectrally.
        let dpsi = apply_p_power(&psi.values, &wavenumbers(&psi.grid), 1.0, 1);
        let expected: Vec<Complex64> = psi
            .values
            .iter()
            .zip(&dpsi)
            .enumerate()
            .map(|(j, (v, d))| {
                let deriv = d * Complex64::i();
                -Complex64::i() * hbar * (psi.grid.x(j) * deriv + 0.5 * v)
            })
            .collect();
        let expected = WavefunctionGrid::new(psi.grid, expected, hbar).unwrap();
        assert!(l2_error(&out, &expected, false).unwrap() < 1e-10);
    }

    #[test]
    fn composition_matches_star() {
        let hbar = 0.5;
        let psi = test_state(hbar);
        let pairs = [("q1^2", "p1^2"), ("q1*p1 + p1^2", "q1^3 - h*p1"), ("p1^3 + q1", "(1/3)*q1^2*p1")];
        for (a, b) in pairs {
            let (f, g) = (parse(a).unwrap(), parse(b).unwrap());
            let fg = star(&f, &g, OmegaConvention::Operator).unwrap();
            let lhs = apply_weyl_op(&f, &apply_weyl_op(&g, &psi).unwrap()).unwrap();
            let rhs = apply_weyl_op(&fg, &psi).unwrap();
            let err = l2_error(&lhs, &rhs, false).unwrap() / rhs.norm();
            assert!(err < 1e-9, "{a} * {b}: {err:e}");
        }
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(apply_weyl_op(&parse("q1^9").unwrap(), &test_state(1.0)), Err(Error::SizeCap(_))));
    }
}
