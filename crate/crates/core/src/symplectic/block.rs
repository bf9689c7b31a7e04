use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{canonical_j, is_symmetric, max_abs, RMat};

/// Tolerance used when a block is expected to be symplectic after numerical
/// construction.
pub const SYM_TOL: f64 = 1e-10;

/// Largest defect `symplectify` will try to repair.
pub const MAX_REPAIRABLE_DEFECT: f64 = 1e-3;

/// A real 2n x 2n matrix ((A, B), (C, D)) acting on phase-space vectors
/// ordered as (p, q): p' = A p + B q, q' = C p + D q.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticBlock {
    n: usize,
    m: RMat,
}

impl SymplecticBlock {
    pub fn from_matrix(m: RMat) -> Result<Self> {
        if !m.is_square() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected a square matrix of even size, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { n: m.nrows() / 2, m })
    }

    pub fn from_blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> Result<Self> {
        let n = a.nrows();
        for blk in [a, b, c, d] {
            if blk.nrows() != n || blk.ncols() != n {
                return Err(Error::Dimension { expected: n, got: blk.nrows().max(blk.ncols()) });
            }
        }
        let mut m = RMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(a);
        m.view_mut((0, n), (n, n)).copy_from(b);
        m.view_mut((n, 0), (n, n)).copy_from(c);
        m.view_mut((n, n), (n, n)).copy_from(d);
        Ok(Self { n, m })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, m: RMat::identity(2 * n, 2 * n) }
    }

    /// Harmonic rotation by angle `theta` in every degree of freedom:
    /// A = D = cos, B = -sin, C = sin.
    pub fn rotation(n: usize, theta: f64) -> Self {
        let e = RMat::identity(n, n);
        let (s, c) = theta.sin_cos();
        Self::from_blocks(&(&e * c), &(&e * -s), &(&e * s), &(&e * c)).unwrap()
    }

    /// Generator ((-b, -a), (c, b^T)) of the linear flow of the quadratic
    /// Hamiltonian 1/2 q^T a q + q^T b p + 1/2 p^T c p.
    pub fn quadratic_generator(a: &RMat, b: &RMat, c: &RMat) -> Result<RMat> {
        let n = a.nrows();
        if !is_symmetric(a, 1e-14) {
            return Err(Error::NotSymmetric("a"));
        }
        if !is_symmetric(c, 1e-14) {
            return Err(Error::NotSymmetric("c"));
        }
        if b.nrows() != n || c.nrows() != n {
            return Err(Error::Dimension { expected: n, got: b.nrows().max(c.nrows()) });
        }
        let mut k = RMat::zeros(2 * n, 2 * n);
        k.view_mut((0, 0), (n, n)).copy_from(&-b);
        k.view_mut((0, n), (n, n)).copy_from(&-a);
        k.view_mut((n, 0), (n, n)).copy_from(c);
        k.view_mut((n, n), (n, n)).copy_from(&b.transpose());
        Ok(k)
    }

    /// exp(t K) for a Hamiltonian generator K.
    pub fn exp_generator(k: &RMat, t: f64) -> Result<Self> {
        Self::from_matrix((k * t).exp())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn a(&self) -> RMat {
        self.m.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn b(&self) -> RMat {
        self.m.view((0, self.n), (self.n, self.n)).into_owned()
    }

    pub fn c(&self) -> RMat {
        self.m.view((self.n, 0), (self.n, self.n)).into_owned()
    }

    pub fn d(&self) -> RMat {
        self.m.view((self.n, self.n), (self.n, self.n)).into_owned()
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticBlock) -> Self {
        Self { n: self.n, m: &self.m * &other.m }
    }

    /// Inverse via the symplectic identity M^{-1} = -J M^T J.
    pub fn symplectic_inverse(&self) -> Self {
        let j = canonical_j(self.n);
        Self { n: self.n, m: -(&j * self.m.transpose() * &j) }
    }

    /// max-norm of M J M^T - J.
    pub fn defect(&self) -> f64 {
        let j = canonical_j(self.n);
        max_abs(&(&self.m * &j * self.m.transpose() - j))
    }

    /// Defect divided by max(1, |M|_max^2), the attainable floor in floating point.
    pub fn relative_defect(&self) -> f64 {
        self.defect() / max_abs(&self.m).powi(2).max(1.0)
    }

    /// Apply to a phase-space vector given as separate (p, q) parts.
    pub fn apply(&self, p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let v = DMatrix::from_iterator(2 * self.n, 1, p.iter().chain(q.iter()).cloned());
        let w = &self.m * v;
        (w.iter().take(self.n).cloned().collect(), w.iter().skip(self.n).cloned().collect())
    }
}

pub fn is_symplectic(m: &SymplecticBlock, tol: f64) -> bool {
    m.defect() <= tol
}

/// Project a nearly symplectic block back onto the group.
///
/// Uses the first-order correction M(1 + J G / 2) with G = M^T J M - J,
/// iterated until the defect is at rounding level. Defects are measured
/// relative to max(1, |M|^2).
pub fn symplectify(m: &SymplecticBlock) -> Result<SymplecticBlock> {
    let defect = m.relative_defect();
    if defect >= MAX_REPAIRABLE_DEFECT {
        return Err(Error::DefectTooLarge { defect, limit: MAX_REPAIRABLE_DEFECT });
    }
    let n = m.n;
    let j = canonical_j(n);
    let id = RMat::identity(2 * n, 2 * n);
    let mut cur = m.m.clone();
    for _ in 0..8 {
        let g = cur.transpose() * &j * &cur - &j;
        if max_abs(&g) < 1e-15 * max_abs(&cur).powi(2).max(1.0) {
            break;
        }
        cur = &cur * (&id + &j * &g * 0.5);
    }
    let out = SymplecticBlock { n, m: cur };
    if out.relative_defect() > 1e-12 {
        return Err(Error::Convergence(format!("symplectic projection stalled at {:e}", out.relative_defect())));
    }
    Ok(out)
}

/// The generators of Sp(2n, R) that have explicit Weil-representation actions.
#[derive(Debug, Clone, PartialEq)]
pub enum WeilGenerator {
    /// ((E, B), (0, E)) with B symmetric: multiplication by a quadratic phase.
    Shear(RMat),
    /// ((A, 0), (0, A^{-T})) with A invertible: linear change of variables.
    Linear(RMat),
    /// ((0, -E), (E, 0)): the hbar-scaled Fourier transform.
    Fourier,
}

pub fn weil_generator_matrix(kind: &WeilGenerator, n: usize) -> Result<SymplecticBlock> {
    let e = RMat::identity(n, n);
    let z = RMat::zeros(n, n);
    match kind {
        WeilGenerator::Shear(b) => {
            if b.nrows() != n || !is_symmetric(b, 1e-14) {
                return Err(Error::NotSymmetric("B"));
            }
            SymplecticBlock::from_blocks(&e, b, &z, &e)
        }
        WeilGenerator::Linear(a) => {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::Dimension { expected: n, got: a.nrows() });
            }
            let inv_t = a.clone().try_inverse().ok_or(Error::Singular("A"))?.transpose();
            SymplecticBlock::from_blocks(a, &z, &z, &inv_t)
        }
        WeilGenerator::Fourier => SymplecticBlock::from_blocks(&z, &-&e, &e, &z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_and_rotations_are_symplectic() {
        assert!(is_symplectic(&SymplecticBlock::identity(3), 1e-15));
        for k in 0..16 {
            let theta = k as f64 * PI / 7.3;
            assert!(is_symplectic(&SymplecticBlock::rotation(2, theta), 1e-14));
        }
    }

    #[test]
    fn pure_dilation_of_one_block_is_not() {
        let e = RMat::identity(2, 2);
        let z = RMat::zeros(2, 2);
        let m = SymplecticBlock::from_blocks(&(&e * 2.0), &z, &z, &e).unwrap();
        assert!(!is_symplectic(&m, 1e-8));
    }

    #[test]
    fn symplectify_fixed_point_and_refusal() {
        let r = SymplecticBlock::rotation(1, 0.7);
        assert_eq!(symplectify(&r).unwrap().matrix(), r.matrix());
        let mut bad = RMat::identity(2, 2);
        bad[(0, 1)] = 0.1;
        bad[(0, 0)] = 1.1;
        let bad = SymplecticBlock::from_matrix(bad).unwrap();
        assert!(matches!(symplectify(&bad), Err(Error::DefectTooLarge { .. })));
    }

    #[test]
    fn symplectify_small_noise() {
        let r = SymplecticBlock::rotation(2, 1.3);
        let mut m = r.matrix().clone();
        let noise = [3.1, -2.2, 0.4, 1.7, -0.9, 2.8, -1.3, 0.6];
        for (i, v) in m.iter_mut().enumerate() {
            *v += 1e-6 * noise[i % noise.len()] * ((i * 7 % 5) as f64 - 2.0) / 3.0;
        }
        let noisy = SymplecticBlock::from_matrix(m.clone()).unwrap();
        let fixed = symplectify(&noisy).unwrap();
        assert!(fixed.defect() <= 1e-12);
        assert!(max_abs(&(fixed.matrix() - &m)) <= 1e-5);
    }

    #[test]
    fn weil_generators() {
        assert_eq!(
            weil_generator_matrix(&WeilGenerator::Shear(RMat::zeros(2, 2)), 2).unwrap(),
            SymplecticBlock::identity(2)
        );
        assert_eq!(
            weil_generator_matrix(&WeilGenerator::Linear(RMat::identity(2, 2)), 2).unwrap(),
            SymplecticBlock::identity(2)
        );
        let f = weil_generator_matrix(&WeilGenerator::Fourier, 2).unwrap();
        let ff = f.compose(&f);
        assert_eq!(ff.matrix(), &(-RMat::identity(4, 4)));
        let mut b = RMat::zeros(2, 2);
        b[(0, 1)] = 1.0;
        assert!(weil_generator_matrix(&WeilGenerator::Shear(b), 2).is_err());
        assert!(matches!(
            weil_generator_matrix(&WeilGenerator::Linear(RMat::zeros(2, 2)), 2),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn harmonic_generator_exponentiates_to_rotation() {
        let one = RMat::identity(1, 1);
        let k = SymplecticBlock::quadratic_generator(&one, &RMat::zeros(1, 1), &one).unwrap();
        let m = SymplecticBlock::exp_generator(&k, 0.9).unwrap();
        assert!(max_abs(&(m.matrix() - SymplecticBlock::rotation(1, 0.9).matrix())) < 1e-14);
    }

    #[test]
    fn inverse_is_inverse() {
        let k = SymplecticBlock::quadratic_generator(
            &RMat::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]),
            &RMat::from_row_slice(2, 2, &[0.1, -0.3, 0.4, 0.0]),
            &RMat::from_row_slice(2, 2, &[0.7, 0.1, 0.1, 1.2]),
        )
        .unwrap();
        let m = SymplecticBlock::exp_generator(&k, 1.7).unwrap();
        let id = m.compose(&m.symplectic_inverse());
        assert!(max_abs(&(id.matrix() - RMat::identity(4, 4))) < 1e-12);
    }
}
