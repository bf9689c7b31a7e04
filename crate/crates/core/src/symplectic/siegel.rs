use num_complex::Complex64;

use super::block::SymplecticBlock;
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, max_abs_c, min_eigenvalue, to_complex, CMat, RMat};

/// Eigenvalue floor for the imaginary part of a Siegel matrix.
pub const PD_TOL: f64 = 1e-12;

/// Complex symmetric n x n matrix with positive definite imaginary part.
///
/// Only the upper triangle is stored (row-major), so symmetry holds by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelMatrix {
    n: usize,
    upper: Vec<Complex64>,
}

fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SiegelMatrix {
    /// Build from a full matrix. The input must be symmetric up to rounding
    /// (relative 1e-9); the stored value is the symmetric part.
    pub fn new(z: &CMat) -> Result<Self> {
        let n = z.nrows();
        if n == 0 || z.ncols() != n {
            return Err(Error::Dimension { expected: n.max(1), got: z.ncols() });
        }
        let asym = max_abs_c(&(z - z.transpose()));
        if asym > 1e-9 * max_abs_c(z).max(1.0) {
            return Err(Error::NotSymmetric("Z"));
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push((z[(i, j)] + z[(j, i)]) * 0.5);
            }
        }
        let out = Self { n, upper };
        let min_eigenvalue = out.imag_min_eigenvalue();
        if !(min_eigenvalue > PD_TOL) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(out)
    }

    pub fn from_scalar(z: Complex64) -> Result<Self> {
        Self::new(&CMat::from_element(1, 1, z))
    }

    /// i times the identity.
    pub fn i_identity(n: usize) -> Self {
        Self::new(&(to_complex(&RMat::identity(n, n)) * Complex64::i())).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.upper[packed_index(self.n, i, j)]
    }

    pub fn matrix(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn real(&self) -> RMat {
        RMat::from_fn(self.n, self.n, |i, j| self.get(i, j).re)
    }

    pub fn imag(&self) -> RMat {
        RMat::from_fn(self.n, self.n, |i, j| self.get(i, j).im)
    }

    pub fn imag_min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.imag())
    }

    /// Max-norm distance between two germs of the same size.
    pub fn distance(&self, other: &SiegelMatrix) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

/// A real symmetric matrix: a point on the boundary of the Siegel half-plane,
/// i.e. the Lagrangian graph p = Z q.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLagrangian {
    z: RMat,
}

impl RealLagrangian {
    pub fn new(z: RMat) -> Result<Self> {
        if !is_symmetric(&z, 1e-12 * z.amax().max(1.0)) {
            return Err(Error::NotSymmetric("Z_real"));
        }
        let zt = z.transpose();
        Ok(Self { z: (&z + zt) * 0.5 })
    }

    pub fn zero(n: usize) -> Self {
        Self { z: RMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.z
    }

    /// Z + i eps E.
    pub fn with_epsilon(&self, eps: f64) -> Result<SiegelMatrix> {
        let n = self.n();
        SiegelMatrix::new(&(to_complex(&self.z) + to_complex(&RMat::identity(n, n)) * Complex64::new(0.0, eps)))
    }
}

/// C Z + D for a complex Z.
pub fn cz_plus_d(m: &SymplecticBlock, z: &CMat) -> CMat {
    to_complex(&m.c()) * z + to_complex(&m.d())
}

/// The linear-fractional action (A Z + B)(C Z + D)^{-1} on the Siegel half-plane.
pub fn moebius_act(m: &SymplecticBlock, z: &SiegelMatrix) -> Result<SiegelMatrix> {
    if m.n() != z.n() {
        return Err(Error::Dimension { expected: m.n(), got: z.n() });
    }
    let zm = z.matrix();
    let num = to_complex(&m.a()) * &zm + to_complex(&m.b());
    let den = cz_plus_d(m, &zm);
    let inv = den.try_inverse().ok_or_else(|| Error::Caustic { detail: "CZ+D is singular".into() })?;
    SiegelMatrix::new(&(num * inv))
}

/// The same action on a real Lagrangian graph; fails at a caustic.
pub fn moebius_act_real(m: &SymplecticBlock, z: &RealLagrangian) -> Result<RealLagrangian> {
    if m.n() != z.n() {
        return Err(Error::Dimension { expected: m.n(), got: z.n() });
    }
    let den = m.c() * z.matrix() + m.d();
    let det = den.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::Caustic { detail: format!("det(CZ+D) = {det:e}") });
    }
    let inv = den.try_inverse().ok_or_else(|| Error::Caustic { detail: "CZ+D is singular".into() })?;
    RealLagrangian::new((m.a() * z.matrix() + m.b()) * inv)
}

/// Right-hand side -(Z c Z + b Z + Z b^T + a) of the matrix Riccati equation.
pub fn riccati_rhs(a: &RMat, b: &RMat, c: &RMat, z: &CMat) -> Result<CMat> {
    if !is_symmetric(a, 1e-12 * a.amax().max(1.0)) {
        return Err(Error::NotSymmetric("a"));
    }
    if !is_symmetric(c, 1e-12 * c.amax().max(1.0)) {
        return Err(Error::NotSymmetric("c"));
    }
    let n = z.nrows();
    for m in [a, b, c] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension { expected: n, got: m.nrows() });
        }
    }
    let (ac, bc, cc) = (to_complex(a), to_complex(b), to_complex(c));
    let r = -(z * &cc * z + &bc * z + z * bc.transpose() + ac);
    Ok((&r + r.transpose()) * Complex64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::block::{weil_generator_matrix, WeilGenerator};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn packed_storage_roundtrip() {
        let z = CMat::from_row_slice(3, 3, &[
            c(1.0, 2.0), c(0.5, 0.1), c(-0.3, 0.0),
            c(0.5, 0.1), c(2.0, 3.0), c(0.2, 0.2),
            c(-0.3, 0.0), c(0.2, 0.2), c(0.0, 1.5),
        ]);
        let s = SiegelMatrix::new(&z).unwrap();
        assert_eq!(s.matrix(), z);
        assert_eq!(s.get(2, 1), s.get(1, 2));
    }

    #[test]
    fn rejects_bad_germs() {
        assert!(matches!(SiegelMatrix::from_scalar(c(1.0, 0.0)), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(SiegelMatrix::from_scalar(c(1.0, -1.0)), Err(Error::NotPositiveDefinite { .. })));
        let z = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(SiegelMatrix::new(&z), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn moebius_examples() {
        let z = SiegelMatrix::from_scalar(c(0.3, 0.7)).unwrap();
        assert_eq!(moebius_act(&SymplecticBlock::identity(1), &z).unwrap(), z);
        for k in 0..10 {
            let r = SymplecticBlock::rotation(1, 0.77 * k as f64);
            let w = moebius_act(&r, &SiegelMatrix::i_identity(1)).unwrap();
            assert!((w.get(0, 0) - c(0.0, 1.0)).norm() < 1e-14);
        }
        let b = RMat::from_element(1, 1, 2.5);
        let shear = weil_generator_matrix(&WeilGenerator::Shear(b), 1).unwrap();
        let w = moebius_act(&shear, &z).unwrap();
        assert!((w.get(0, 0) - c(2.8, 0.7)).norm() < 1e-14);
    }

    #[test]
    fn free_particle_block() {
        let one = RMat::identity(1, 1);
        let zero = RMat::zeros(1, 1);
        let free = SymplecticBlock::from_blocks(&one, &zero, &one, &one).unwrap();
        let w = moebius_act(&free, &SiegelMatrix::i_identity(1)).unwrap();
        assert!((w.get(0, 0) - c(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn riccati_examples() {
        let z0 = RMat::zeros(1, 1);
        let one = RMat::identity(1, 1);
        let r = riccati_rhs(&z0, &z0, &z0, &CMat::from_element(1, 1, c(0.0, 1.0))).unwrap();
        assert_eq!(r[(0, 0)], c(0.0, 0.0));
        let r = riccati_rhs(&one, &z0, &one, &CMat::from_element(1, 1, c(0.0, 1.0))).unwrap();
        assert!(r[(0, 0)].norm() < 1e-15);
        let r = riccati_rhs(&one, &z0, &one, &CMat::from_element(1, 1, c(0.0, 2.0))).unwrap();
        assert!((r[(0, 0)] - c(3.0, 0.0)).norm() < 1e-15);
        let bad = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let z2 = SiegelMatrix::i_identity(2).matrix();
        assert!(riccati_rhs(&bad, &RMat::zeros(2, 2), &RMat::identity(2, 2), &z2).is_err());
    }

    #[test]
    fn real_graph_caustic() {
        let quarter = SymplecticBlock::rotation(1, std::f64::consts::FRAC_PI_2);
        assert!(matches!(moebius_act_real(&quarter, &RealLagrangian::zero(1)), Err(Error::Caustic { .. })));
    }
}
