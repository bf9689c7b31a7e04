use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeff::{c_i, coeff, factorial, falling, real, Coeff};
use super::symbol::{Monomial, PolySymbol};
use crate::error::Result;

/// Orientation of the symplectic form used by the star product.
///
/// `Operator` gives q * p - p * q = i hbar, matching q = x and
/// p = -i hbar d/dx. `Reversed` is the opposite orientation, for which the
/// commutator is -i hbar. The Poisson bracket is {q, p} = 1 in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaConvention {
    Reversed,
    #[default]
    Operator,
}

impl OmegaConvention {
    pub fn sign(self) -> i64 {
        match self {
            OmegaConvention::Operator => 1,
            OmegaConvention::Reversed => -1,
        }
    }

    /// Entry omega^{ij} for slots ordered (q1..qn, p1..pn).
    pub fn omega(self, n: usize, i: usize, j: usize) -> i64 {
        let s = self.sign();
        if j >= n && i == j - n {
            s
        } else if i >= n && j == i - n {
            -s
        } else {
            0
        }
    }
}

/// Poisson bracket sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i).
pub fn poisson(f: &PolySymbol, g: &PolySymbol) -> Result<PolySymbol> {
    f.check_same_dim(g)?;
    let n = f.n();
    let mut out = PolySymbol::zero(n);
    for i in 0..n {
        let t1 = f.derivative(i, 1).mul_commutative(&g.derivative(n + i, 1))?;
        let t2 = f.derivative(n + i, 1).mul_commutative(&g.derivative(i, 1))?;
        out = &(&out + &t1) - &t2;
    }
    Ok(out)
}

/// Enumerate all multi-indices bounded componentwise by `bounds`.
fn multi_indices(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for prefix in &out {
            for k in 0..=b {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// (s i / 2)^k as an exact complex rational.
fn half_i_power(s: i64, k: u32) -> Coeff {
    let base = coeff(BigRational::zero(), BigRational::new(BigInt::from(s), BigInt::from(2)));
    let mut out = Coeff::one();
    for _ in 0..k {
        out = out * base.clone();
    }
    out
}

/// Moyal product of two polynomial symbols:
///
/// f * g = sum_{a,b} (s i hbar / 2)^{|a|+|b|} (-1)^{|b|} / (a! b!)
///         (d_q^a d_p^b f)(d_p^a d_q^b g)
///
/// The series terminates for polynomials and is evaluated exactly.
pub fn star(f: &PolySymbol, g: &PolySymbol, conv: OmegaConvention) -> Result<PolySymbol> {
    f.check_same_dim(g)?;
    let n = f.n();
    let s = conv.sign();
    let mut out = PolySymbol::zero(n);
    for (m1, c1) in f.terms() {
        for (m2, c2) in g.terms() {
            // a_i pairs q_i-derivatives of f with p_i-derivatives of g; b_i the reverse.
            let a_bounds: Vec<u32> = (0..n).map(|i| m1.exps[i].min(m2.exps[n + i])).collect();
            let b_bounds: Vec<u32> = (0..n).map(|i| m1.exps[n + i].min(m2.exps[i])).collect();
            let base = c1 * c2;
            for a in multi_indices(&a_bounds) {
                for b in multi_indices(&b_bounds) {
                    let order: u32 = a.iter().sum::<u32>() + b.iter().sum::<u32>();
                    let mut num = BigInt::one();
                    let mut den = BigInt::one();
                    let mut exps = vec![0u32; 2 * n];
                    for i in 0..n {
                        num *= falling(m1.exps[i], a[i]) * falling(m1.exps[n + i], b[i]);
                        num *= falling(m2.exps[n + i], a[i]) * falling(m2.exps[i], b[i]);
                        den *= factorial(a[i]) * factorial(b[i]);
                        exps[i] = m1.exps[i] - a[i] + m2.exps[i] - b[i];
                        exps[n + i] = m1.exps[n + i] - b[i] + m2.exps[n + i] - a[i];
                    }
                    let sign = if b.iter().sum::<u32>() % 2 == 1 { -1 } else { 1 };
                    let factor = real(BigRational::new(num * BigInt::from(sign), den)) * half_i_power(s, order);
                    out.add_term(Monomial { hbar: m1.hbar + m2.hbar + order, exps }, &base * factor);
                }
            }
        }
    }
    Ok(out)
}

/// f * g - g * f.
pub fn commutator(f: &PolySymbol, g: &PolySymbol, conv: OmegaConvention) -> Result<PolySymbol> {
    Ok(&star(f, g, conv)? - &star(g, f, conv)?)
}

/// A generator of the Weyl algebra, with 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Q(usize),
    P(usize),
}

/// Weyl symbol of the ordered operator product of the given word, computed
/// as the star product of the degree-one symbols in word order.
pub fn weyl_order_polynomial(n: usize, word: &[Generator], conv: OmegaConvention) -> Result<PolySymbol> {
    let mut out = PolySymbol::one(n);
    for g in word {
        let sym = match *g {
            Generator::Q(i) => PolySymbol::q(n, i),
            Generator::P(i) => PolySymbol::p(n, i),
        };
        out = star(&out, &sym, conv)?;
    }
    Ok(out)
}

/// i hbar * sign as a symbol; the exact commutator of q and p.
pub fn i_hbar(n: usize, conv: OmegaConvention) -> PolySymbol {
    PolySymbol::hbar(n).scale(&(c_i() * real(BigRational::from_integer(BigInt::from(conv.sign())))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::coeff::{c_int, rat};

    const OP: OmegaConvention = OmegaConvention::Operator;

    fn h_i_half(n: usize) -> PolySymbol {
        PolySymbol::hbar(n).scale(&coeff(BigRational::zero(), rat(1, 2)))
    }

    #[test]
    fn q_star_p() {
        let (q, p) = (PolySymbol::q(1, 1), PolySymbol::p(1, 1));
        let qp = q.mul_commutative(&p).unwrap();
        assert_eq!(star(&q, &p, OP).unwrap(), &qp + &h_i_half(1));
        assert_eq!(star(&p, &q, OP).unwrap(), &qp - &h_i_half(1));
        assert_eq!(commutator(&q, &p, OP).unwrap(), i_hbar(1, OP));
        let rev = OmegaConvention::Reversed;
        assert_eq!(commutator(&q, &p, rev).unwrap(), i_hbar(1, rev));
        assert_eq!(poisson(&q, &p).unwrap(), PolySymbol::one(1));
    }

    #[test]
    fn q2_star_p2() {
        let q2 = PolySymbol::q(1, 1).pow_commutative(2);
        let p2 = PolySymbol::p(1, 1).pow_commutative(2);
        let qp = PolySymbol::q(1, 1).mul_commutative(&PolySymbol::p(1, 1)).unwrap();
        let hb = PolySymbol::hbar(1);
        let expected = &(&q2.mul_commutative(&p2).unwrap() + &qp.mul_commutative(&hb).unwrap().scale(&coeff(BigRational::zero(), rat(2, 1))))
            - &hb.pow_commutative(2).scale(&real(rat(1, 2)));
        assert_eq!(star(&q2, &p2, OP).unwrap(), expected);
        assert_eq!(poisson(&q2, &p2).unwrap(), qp.scale(&c_int(4)));
    }

    #[test]
    fn unit_and_words() {
        let n = 2;
        let f = PolySymbol::q(n, 2).mul_commutative(&PolySymbol::p(n, 1).pow_commutative(3)).unwrap();
        assert_eq!(star(&PolySymbol::one(n), &f, OP).unwrap(), f);
        assert_eq!(star(&f, &PolySymbol::one(n), OP).unwrap(), f);
        let qp = weyl_order_polynomial(1, &[Generator::Q(1), Generator::P(1)], OP).unwrap();
        let pq = weyl_order_polynomial(1, &[Generator::P(1), Generator::Q(1)], OP).unwrap();
        let sym = (&qp + &pq).scale(&real(rat(1, 2)));
        assert_eq!(sym, PolySymbol::q(1, 1).mul_commutative(&PolySymbol::p(1, 1)).unwrap());
        let q4 = weyl_order_polynomial(1, &[Generator::Q(1); 4], OP).unwrap();
        assert_eq!(q4, PolySymbol::q(1, 1).pow_commutative(4));
    }

    #[test]
    fn omega_entries() {
        assert_eq!(OP.omega(2, 0, 2), 1);
        assert_eq!(OP.omega(2, 2, 0), -1);
        assert_eq!(OP.omega(2, 0, 3), 0);
        assert_eq!(OmegaConvention::Reversed.omega(2, 1, 3), -1);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(star(&PolySymbol::q(1, 1), &PolySymbol::q(2, 1), OP).is_err());
        assert!(poisson(&PolySymbol::q(1, 1), &PolySymbol::q(2, 1)).is_err());
    }
}
