//! Small dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn is_symmetric(m: &RMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.transpose())) <= tol
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &RMat) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// The canonical 2n x 2n form ((0, E), (-E, 0)).
pub fn canonical_j(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Principal square root continued from `reference`: returns the root of `z`
/// closest to `reference`.
pub fn sqrt_near(z: Complex64, reference: Complex64) -> Complex64 {
    let r = z.sqrt();
    if (r - reference).norm() <= (-r - reference).norm() {
        r
    } else {
        -r
    }
}
