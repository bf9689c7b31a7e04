use num_complex::Complex64;

use super::laurent::Laurent;
use super::mode::{mode_star, vacuum_average, ModePolynomial, FIRST_PHASE_VAR, HBAR_VAR, MU_VAR};
use crate::error::{Error, Result};

/// Largest number of field insertions in a Green function.
pub const MAX_INSERTIONS: usize = 12;

fn later_first(times: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[b].partial_cmp(&times[a]).unwrap());
    order
}

/// <T u(t_1) * ... * u(t_N)> with z_j = exp(i m t_j) kept symbolic: later
/// times stand to the left.
pub fn green_function_symbolic(times: &[f64]) -> Result<Laurent> {
    if times.len() > MAX_INSERTIONS {
        return Err(Error::SizeCap(format!("{} insertions (limit {MAX_INSERTIONS})", times.len())));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite".into()));
    }
    let n = times.len();
    let mut prod = ModePolynomial::one(n);
    for j in later_first(times) {
        prod = mode_star(&prod, &ModePolynomial::field(n, j)?)?;
    }
    Ok(vacuum_average(&prod))
}

/// Symbolic two-point function kappa z_later^-1 z_earlier between insertions
/// i and j, with coefficient variables for `n` phases.
pub fn two_point_symbolic(n: usize, times: &[f64], i: usize, j: usize) -> Laurent {
    let nv = FIRST_PHASE_VAR + n;
    let (late, early) = if times[i] >= times[j] { (i, j) } else { (j, i) };
    ModePolynomial::kappa(nv)
        .try_mul(&Laurent::var(nv, FIRST_PHASE_VAR + late, -1))
        .unwrap()
        .try_mul(&Laurent::var(nv, FIRST_PHASE_VAR + early, 1))
        .unwrap()
}

/// Sum over perfect pairings of products of two-point functions.
pub fn wick_sum_symbolic(times: &[f64]) -> Result<Laurent> {
    let n = times.len();
    if n > MAX_INSERTIONS {
        return Err(Error::SizeCap(format!("{n} insertions (limit {MAX_INSERTIONS})")));
    }
    fn rec(rest: &[usize], n: usize, times: &[f64]) -> Laurent {
        let nv = FIRST_PHASE_VAR + n;
        if rest.is_empty() {
            return Laurent::one(nv);
        }
        let first = rest[0];
        let mut total = Laurent::zero(nv);
        for k in 1..rest.len() {
            let mut others: Vec<usize> = rest[1..].to_vec();
            let partner = others.remove(k - 1);
            let term = two_point_symbolic(n, times, first, partner).try_mul(&rec(&others, n, times)).unwrap();
            total = total.try_add(&term).unwrap();
        }
        total
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(rec(&idx, n, times))
}

/// Numeric coefficient values [hbar, 1/(2m), exp(i m t_1), ...].
pub fn coefficient_values(times: &[f64], m: f64, hbar: f64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); FIRST_PHASE_VAR + times.len()];
    v[HBAR_VAR] = Complex64::new(hbar, 0.0);
    v[MU_VAR] = Complex64::new(1.0 / (2.0 * m), 0.0);
    for (j, t) in times.iter().enumerate() {
        v[FIRST_PHASE_VAR + j] = Complex64::from_polar(1.0, m * t);
    }
    v
}

/// Time-ordered vacuum average of N field insertions.
pub fn green_function(times: &[f64], m: f64, hbar: f64) -> Result<Complex64> {
    if !(m > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidArgument("mass and hbar must be positive".into()));
    }
    Ok(green_function_symbolic(times)?.eval(&coefficient_values(times, m, hbar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qft::{Propagator0p1, PropagatorKind};

    #[test]
    fn odd_counts_vanish() {
        assert!(green_function_symbolic(&[0.1, 0.5, 0.2]).unwrap().is_zero());
        assert!(green_function_symbolic(&[]).unwrap().is_one());
    }

    #[test]
    fn two_point_is_feynman_kernel() {
        let (m, hbar) = (1.3, 0.4);
        let dc = Propagator0p1::new(m, PropagatorKind::Feynman).unwrap();
        for (t1, t2) in [(0.5, 0.1), (0.1, 0.5), (-1.0, 2.0)] {
            let g = green_function(&[t1, t2], m, hbar).unwrap();
            let expect = hbar / (2.0 * m) * Complex64::from_polar(1.0, -m * (t1 - t2).abs());
            assert!((g - expect).norm() < 1e-14);
            assert!((g - Complex64::new(0.0, hbar) * dc.eval(t1 - t2)).norm() < 1e-14);
        }
    }

    #[test]
    fn wick_property() {
        for times in [vec![0.3, -0.2, 1.1, 0.7], vec![0.0, 0.5, 0.25, 0.75, 1.0, -1.0]] {
            assert_eq!(green_function_symbolic(&times).unwrap(), wick_sum_symbolic(&times).unwrap());
        }
    }
}
