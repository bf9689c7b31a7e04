use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::{c_one, conj, falling, is_zero, real, to_c64, Coeff};
use crate::error::{Error, Result};

/// Largest supported number of degrees of freedom.
pub const MAX_DOF: usize = 8;
/// Largest supported exponent of a single variable.
pub const MAX_EXPONENT: u32 = 64;

/// A monomial h^hbar * q1^e1 ... qn^en * p1^f1 ... pn^fn.
///
/// Ordering puts lower hbar powers first and, within the same hbar power,
/// lexicographically larger exponent vectors first; this is the print order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub hbar: u32,
    pub exps: Vec<u32>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.hbar.cmp(&other.hbar).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Self { hbar: 0, exps: vec![0; 2 * n] }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            hbar: self.hbar + other.hbar,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Polynomial in (q1..qn, p1..pn) whose coefficients are polynomials in a
/// formal hbar with exact complex rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySymbol {
    n: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PolySymbol {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DOF, "degrees of freedom must be in 1..={MAX_DOF}");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Coeff) -> Self {
        let mut s = Self::zero(n);
        s.add_term(Monomial::one(n), c);
        s
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, c_one())
    }

    /// The coordinate q_i (1-based index).
    pub fn q(n: usize, i: usize) -> Self {
        Self::var(n, i - 1)
    }

    /// The momentum p_i (1-based index).
    pub fn p(n: usize, i: usize) -> Self {
        Self::var(n, n + i - 1)
    }

    /// The formal parameter hbar.
    pub fn hbar(n: usize) -> Self {
        let mut m = Monomial::one(n);
        m.hbar = 1;
        Self::from_terms(n, [(m, c_one())]).unwrap()
    }

    /// Variable with slot index `k` in 0..2n (q's first, then p's).
    pub fn var(n: usize, k: usize) -> Self {
        let mut m = Monomial::one(n);
        m.exps[k] = 1;
        Self::from_terms(n, [(m, c_one())]).unwrap()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(n: usize, terms: I) -> Result<Self> {
        let mut s = Self::zero(n);
        for (m, c) in terms {
            if m.exps.len() != 2 * n {
                return Err(Error::Dimension { expected: 2 * n, got: m.exps.len() });
            }
            if m.exps.iter().any(|&e| e > MAX_EXPONENT) {
                return Err(Error::SizeCap(format!("exponent above {MAX_EXPONENT}")));
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Coeff) {
        if is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + c;
                if is_zero(v) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree in (q, p).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest power of hbar present.
    pub fn hbar_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.hbar).max().unwrap_or(0)
    }

    /// Smallest power of hbar present (0 for the zero symbol).
    pub fn hbar_valuation(&self) -> u32 {
        self.terms.keys().map(|m| m.hbar).min().unwrap_or(0)
    }

    /// The part of the symbol with the given power of hbar, with hbar removed.
    pub fn hbar_part(&self, k: u32) -> PolySymbol {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m.hbar == k {
                out.add_term(Monomial { hbar: 0, exps: m.exps.clone() }, c.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> PolySymbol {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Complex conjugation of coefficients (hbar is real).
    pub fn conj(&self) -> PolySymbol {
        Self { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), conj(c))).collect() }
    }

    /// Re-embed into a larger number of degrees of freedom.
    pub fn with_dim(&self, n: usize) -> Result<PolySymbol> {
        if n < self.n {
            for m in self.terms.keys() {
                if m.exps[n..self.n].iter().any(|&e| e > 0) || m.exps[self.n + n..].iter().any(|&e| e > 0) {
                    return Err(Error::Dimension { expected: self.n, got: n });
                }
            }
        }
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut exps = vec![0; 2 * n];
            for i in 0..self.n.min(n) {
                exps[i] = m.exps[i];
                exps[n + i] = m.exps[self.n + i];
            }
            out.add_term(Monomial { hbar: m.hbar, exps }, c.clone());
        }
        Ok(out)
    }

    /// k-th partial derivative with respect to slot `var` (0..2n).
    pub fn derivative(&self, var: usize, k: u32) -> PolySymbol {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e < k {
                continue;
            }
            let mut mm = m.clone();
            mm.exps[var] = e - k;
            out.add_term(mm, c * real(BigRational::from_integer(falling(e, k))));
        }
        out
    }

    pub(crate) fn check_same_dim(&self, other: &PolySymbol) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// Ordinary (commutative) product.
    pub fn mul_commutative(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.check_same_dim(other)?;
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.try_add(&-other)
    }

    /// Numeric value at (q, p) with a numeric hbar.
    pub fn eval(&self, q: &[f64], p: &[f64], hbar: f64) -> Complex64 {
        self.to_numeric(hbar).eval(q, p)
    }

    /// Substitute a numeric hbar and convert coefficients to floating point.
    pub fn to_numeric(&self, hbar: f64) -> NumericPoly {
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (m, c) in &self.terms {
            *acc.entry(m.exps.clone()).or_insert(Complex64::new(0.0, 0.0)) += to_c64(c) * hbar.powi(m.hbar as i32);
        }
        NumericPoly { n: self.n, terms: acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect() }
    }

    /// Product of rational powers: convenience for tests and parsers.
    pub fn monomial(n: usize, hbar: u32, exps: &[u32], c: Coeff) -> Result<PolySymbol> {
        Self::from_terms(n, [(Monomial { hbar, exps: exps.to_vec() }, c)])
    }

    /// Integer power under the commutative product.
    pub fn pow_commutative(&self, k: u32) -> PolySymbol {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.mul_commutative(self).unwrap();
        }
        out
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        PolySymbol { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Add for &PolySymbol {
    type Output = PolySymbol;
    /// Panics on dimension mismatch; use [`PolySymbol::try_add`] for checked addition.
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl Sub for &PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl Mul<&Coeff> for &PolySymbol {
    type Output = PolySymbol;
    fn mul(self, rhs: &Coeff) -> PolySymbol {
        self.scale(rhs)
    }
}

/// A polynomial in (q, p) with floating-point coefficients, obtained from a
/// [`PolySymbol`] by substituting hbar.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPoly {
    pub n: usize,
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumericPoly {
    pub fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut v = *c;
            for i in 0..self.n {
                v *= q[i].powi(e[i] as i32) * p[i].powi(e[self.n + i] as i32);
            }
            sum += v;
        }
        sum
    }

    /// Derivative with respect to slot `var` (0..2n: q's then p's).
    pub fn derivative(&self, var: usize) -> NumericPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (e2, c * e[var] as f64)
            })
            .collect();
        NumericPoly { n: self.n, terms }
    }

    pub fn max_imag_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0_f64, |a, (_, c)| a.max(c.im.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::coeff::{c_int, rat};

    #[test]
    fn canonical_form_drops_zeros() {
        let q = PolySymbol::q(1, 1);
        let z = q.try_sub(&q).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, PolySymbol::zero(1));
    }

    #[test]
    fn derivatives() {
        let q = PolySymbol::q(1, 1);
        let q3 = q.pow_commutative(3);
        assert_eq!(q3.derivative(0, 2), q.scale(&c_int(6)));
        assert!(q3.derivative(0, 4).is_zero());
        assert!(q3.derivative(1, 1).is_zero());
    }

    #[test]
    fn numeric_evaluation() {
        let n = 2;
        let f = PolySymbol::monomial(n, 1, &[2, 0, 0, 1], real(rat(3, 2))).unwrap();
        let v = f.eval(&[2.0, 5.0], &[0.0, 3.0], 0.5);
        assert!((v.re - 1.5 * 0.5 * 4.0 * 3.0).abs() < 1e-14);
        assert_eq!(f.to_numeric(0.5).derivative(0).terms[0].0, vec![1, 0, 0, 1]);
    }

    #[test]
    fn reembedding() {
        let p1 = PolySymbol::p(1, 1);
        let up = p1.with_dim(3).unwrap();
        assert_eq!(up, PolySymbol::p(3, 1));
        assert_eq!(up.with_dim(1).unwrap(), p1);
        assert!(PolySymbol::q(2, 2).with_dim(1).is_err());
    }
}
