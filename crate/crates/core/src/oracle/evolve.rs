use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::fourier::{fft_in_place, wavenumbers};
use super::grid::{l2_error, WavefunctionGrid};
use super::weyl_op::WeylOperator;
use crate::error::{Error, Result};
use crate::moyal::PolySymbol;

/// Potential function U(x).
pub type Potential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Quantum Hamiltonian for the grid solver.
#[derive(Clone)]
pub enum QuantumHamiltonian {
    /// p^2 / 2m + U(x): split-step Fourier.
    Separable { mass: f64, potential: Potential },
    /// Weyl quantization of a real polynomial symbol: Chebyshev propagator.
    Symbol(PolySymbol),
}

impl std::fmt::Debug for QuantumHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuantumHamiltonian::Separable { mass, .. } => write!(f, "Separable {{ mass: {mass} }}"),
            QuantumHamiltonian::Symbol(s) => write!(f, "Symbol({s})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Initial number of time steps.
    pub steps: usize,
    /// Acceptable difference estimate between successive step doublings.
    pub tol: f64,
    /// Maximum number of doublings after the first comparison.
    pub max_doublings: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { steps: 64, tol: 1e-9, max_doublings: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub psi: WavefunctionGrid,
    /// Estimated discretisation error of `psi` in L2.
    pub error_estimate: f64,
    /// Number of steps used for `psi`.
    pub steps: usize,
}

fn strang(mass: f64, potential: &Potential, psi: &WavefunctionGrid, t: f64, steps: usize) -> WavefunctionGrid {
    let grid = psi.grid;
    let hbar = psi.hbar;
    let n = grid.len();
    let dt = t / steps as f64;
    let half_pot: Vec<Complex64> =
        grid.points().iter().map(|&x| Complex64::from_polar(1.0, -0.5 * dt * potential(x) / hbar)).collect();
    let kin: Vec<Complex64> = wavenumbers(&grid)
        .iter()
        .map(|k| Complex64::from_polar(1.0 / n as f64, -dt * hbar * k * k / (2.0 * mass)))
        .collect();
    let mut v = psi.values.clone();
    for _ in 0..steps {
        v.iter_mut().zip(&half_pot).for_each(|(a, b)| *a *= b);
        fft_in_place(&mut v, false);
        v.iter_mut().zip(&kin).for_each(|(a, b)| *a *= b);
        fft_in_place(&mut v, true);
        v.iter_mut().zip(&half_pot).for_each(|(a, b)| *a *= b);
    }
    WavefunctionGrid { grid, values: v, hbar }
}

/// Bessel functions J_0..J_kmax at x > 0 by Miller's backward recurrence,
/// normalised with J_0 + 2 sum J_{2k} = 1.
pub(crate) fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    let start = (kmax.max(x.ceil() as usize) + 30 + (10.0 * x.cbrt()) as usize) | 1;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(kmax + 1);
    vals.iter().map(|v| v / norm).collect()
}

fn chebyshev(op: &WeylOperator, bound: f64, psi: &WavefunctionGrid, t: f64, steps: usize) -> WavefunctionGrid {
    let dt = t / steps as f64;
    let z = bound * dt.abs() / psi.hbar;
    let sign = if dt >= 0.0 { 1.0 } else { -1.0 };
    // Terms beyond z + O(z^{1/3}) are below rounding.
    let kmax = (z + 20.0 + 8.0 * z.cbrt()).ceil() as usize;
    let js = bessel_j_sequence(z.max(1e-300), kmax);
    let scaled = |v: &WavefunctionGrid| {
        let w = op.apply(v);
        w.scaled(Complex64::new(1.0 / bound, 0.0))
    };
    let mut cur = psi.clone();
    for _ in 0..steps {
        let mut t_prev = cur.clone();
        let mut t_cur = scaled(&cur);
        let mut acc: Vec<Complex64> = t_prev.values.iter().map(|v| v * js[0]).collect();
        let mut phase = Complex64::new(0.0, -sign);
        for (k, jk) in js.iter().enumerate().skip(1) {
            let coef = phase * 2.0 * *jk;
            acc.iter_mut().zip(&t_cur.values).for_each(|(a, b)| *a += coef * b);
            if k < kmax {
                let h_t = scaled(&t_cur);
                let next: Vec<Complex64> =
                    h_t.values.iter().zip(&t_prev.values).map(|(a, b)| 2.0 * a - b).collect();
                t_prev = t_cur;
                t_cur = WavefunctionGrid { grid: psi.grid, values: next, hbar: psi.hbar };
            }
            phase *= Complex64::new(0.0, -sign);
        }
        cur = WavefunctionGrid { grid: psi.grid, values: acc, hbar: psi.hbar };
    }
    cur
}

/// Solve i hbar d psi/dt = H psi for time t.
///
/// Separable Hamiltonians use second-order Strang splitting; polynomial
/// symbols use a Chebyshev expansion of the propagator. In both cases the
/// number of steps is doubled until two successive results differ by less
/// than `opts.tol`; the finer result is returned with its error estimate.
pub fn evolve_schrodinger(h: &QuantumHamiltonian, psi0: &WavefunctionGrid, t: f64, opts: &EvolveOptions) -> Result<Evolution> {
    if t == 0.0 {
        return Ok(Evolution { psi: psi0.clone(), error_estimate: 0.0, steps: 0 });
    }
    let run: Box<dyn Fn(usize) -> WavefunctionGrid> = match h {
        QuantumHamiltonian::Separable { mass, potential } => {
            if !(*mass > 0.0) {
                return Err(Error::InvalidArgument("mass must be positive".into()));
            }
            let (mass, potential) = (*mass, potential.clone());
            let psi0 = psi0.clone();
            Box::new(move |steps| strang(mass, &potential, &psi0, t, steps))
        }
        QuantumHamiltonian::Symbol(sym) => {
            let op = WeylOperator::new(sym, psi0.hbar)?;
            if !op.is_hermitian() {
                return Err(Error::InvalidArgument("Hamiltonian symbol must have real coefficients".into()));
            }
            let p_max = PI * psi0.hbar / psi0.grid.dx();
            let bound = op.norm_bound(psi0.grid.abs_max(), p_max).max(1e-300);
            let psi0 = psi0.clone();
            Box::new(move |steps| chebyshev(&op, bound, &psi0, t, steps))
        }
    };
    let mut steps = opts.steps.max(1);
    let mut coarse = run(steps);
    for _ in 0..=opts.max_doublings {
        let fine = run(2 * steps);
        let diff = l2_error(&fine, &coarse, false)?;
        // Strang error scales as dt^2, so the finer result is off by about diff / 3.
        let est = match h {
            QuantumHamiltonian::Separable { .. } => diff / 3.0,
            QuantumHamiltonian::Symbol(_) => diff,
        };
        if est <= opts.tol {
            return Ok(Evolution { psi: fine, error_estimate: est, steps: 2 * steps });
        }
        steps *= 2;
        coarse = fine;
    }
    Err(Error::Convergence(format!("time stepping did not reach tolerance {:e} with {} steps", opts.tol, steps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::parse;
    use crate::oracle::grid::Grid1D;

    fn gaussian(grid: Grid1D, hbar: f64, z: Complex64) -> WavefunctionGrid {
        let c = (z.im / (PI * hbar)).powf(0.25);
        WavefunctionGrid::from_fn(grid, hbar, |x| c * (Complex64::i() * z * x * x / (2.0 * hbar)).exp()).unwrap()
    }

    #[test]
    fn bessel_values() {
        let j = bessel_j_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-14);
        let j = bessel_j_sequence(50.0, 60);
        assert!((j[0] - 0.055_812_327_669_251_86).abs() < 1e-13);
    }

    #[test]
    fn harmonic_ground_state_phase() {
        let g = Grid1D::centered(10.0, 128).unwrap();
        let psi = gaussian(g, 1.0, Complex64::i());
        let h = QuantumHamiltonian::Separable { mass: 1.0, potential: Arc::new(|x| 0.5 * x * x) };
        let out = evolve_schrodinger(&h, &psi, 1.3, &EvolveOptions::default()).unwrap();
        let expected = psi.scaled(Complex64::from_polar(1.0, -0.65));
        assert!(l2_error(&out.psi, &expected, false).unwrap() < 1e-8);
        let sym = QuantumHamiltonian::Symbol(parse("(1/2)*p1^2 + (1/2)*q1^2").unwrap());
        let out = evolve_schrodinger(&sym, &psi, 1.3, &EvolveOptions::default()).unwrap();
        assert!(l2_error(&out.psi, &expected, false).unwrap() < 1e-10);
        assert!((out.psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_spreading() {
        let g = Grid1D::centered(20.0, 256).unwrap();
        let psi = gaussian(g, 1.0, Complex64::i());
        let h = QuantumHamiltonian::Separable { mass: 1.0, potential: Arc::new(|_| 0.0) };
        let out = evolve_schrodinger(&h, &psi, 2.0, &EvolveOptions::default()).unwrap();
        let zt = Complex64::i() / (1.0 + Complex64::i() * 2.0);
        let expected = WavefunctionGrid::from_fn(g, 1.0, |x| {
            PI.powf(-0.25) / (1.0 + Complex64::i() * 2.0).sqrt() * (Complex64::i() * zt * x * x / 2.0).exp()
        })
        .unwrap();
        assert!(l2_error(&out.psi, &expected, false).unwrap() < 1e-10);
    }

    #[test]
    fn zero_time_and_errors() {
        let g = Grid1D::centered(10.0, 128).unwrap();
        let psi = gaussian(g, 1.0, Complex64::i());
        let h = QuantumHamiltonian::Symbol(parse("p1^2").unwrap());
        assert_eq!(evolve_schrodinger(&h, &psi, 0.0, &EvolveOptions::default()).unwrap().psi, psi);
        let bad = QuantumHamiltonian::Symbol(parse("i*p1^2").unwrap());
        assert!(evolve_schrodinger(&bad, &psi, 1.0, &EvolveOptions::default()).is_err());
    }
}
