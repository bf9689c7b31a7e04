use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::coeff::{is_zero, rat_to_f64, to_c64, Coeff, Rational};
use super::star::OmegaConvention;
use crate::error::{Error, Result};

/// scalar * exp((i / hbar) (phase + a.p + b.q)): the exponential of a linear
/// form with an exact central phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpLinear {
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub scalar: Coeff,
    pub phase: Rational,
}

impl ExpLinear {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>, scalar: Coeff) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Dimension { expected: a.len(), got: b.len() });
        }
        if is_zero(&scalar) {
            return Err(Error::InvalidArgument("exp-linear prefactor must be non-zero".into()));
        }
        Ok(Self { a, b, scalar, phase: Rational::zero() })
    }

    /// The constant 1.
    pub fn one(n: usize) -> Self {
        Self::new(vec![Rational::zero(); n], vec![Rational::zero(); n], num_traits::One::one()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Numeric value at (q, p) for a numeric hbar.
    pub fn eval(&self, q: &[f64], p: &[f64], hbar: f64) -> Complex64 {
        let mut lin = rat_to_f64(&self.phase);
        for i in 0..self.n() {
            lin += rat_to_f64(&self.a[i]) * p[i] + rat_to_f64(&self.b[i]) * q[i];
        }
        to_c64(&self.scalar) * Complex64::from_polar(1.0, lin / hbar)
    }
}

fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).fold(Rational::zero(), |acc, (u, v)| acc + u * v)
}

/// Star product of two exponentials of linear forms. The linear forms add and
/// the central phase gains (s/2)(a1.b2 - b1.a2), the Baker-Campbell-Hausdorff
/// commutator term.
pub fn star_exp_linear(u: &ExpLinear, v: &ExpLinear, conv: OmegaConvention) -> Result<ExpLinear> {
    if u.n() != v.n() {
        return Err(Error::Dimension { expected: u.n(), got: v.n() });
    }
    let half = BigRational::new(conv.sign().into(), 2.into());
    let central = (dot(&u.a, &v.b) - dot(&u.b, &v.a)) * half;
    Ok(ExpLinear {
        a: u.a.iter().zip(&v.a).map(|(x, y)| x + y).collect(),
        b: u.b.iter().zip(&v.b).map(|(x, y)| x + y).collect(),
        scalar: &u.scalar * &v.scalar,
        phase: &u.phase + &v.phase + central,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::coeff::{c_int, int, rat};

    const OP: OmegaConvention = OmegaConvention::Operator;

    #[test]
    fn unit_is_neutral() {
        let v = ExpLinear::new(vec![rat(1, 3), int(2)], vec![int(-1), rat(5, 7)], c_int(3)).unwrap();
        assert_eq!(star_exp_linear(&ExpLinear::one(2), &v, OP).unwrap(), v);
        assert_eq!(star_exp_linear(&v, &ExpLinear::one(2), OP).unwrap(), v);
    }

    #[test]
    fn weyl_commutation_phase() {
        let (a, b) = (rat(3, 2), rat(-2, 5));
        let eq = ExpLinear::new(vec![int(0)], vec![b.clone()], c_int(1)).unwrap();
        let ep = ExpLinear::new(vec![a.clone()], vec![int(0)], c_int(1)).unwrap();
        let qp = star_exp_linear(&eq, &ep, OP).unwrap();
        let pq = star_exp_linear(&ep, &eq, OP).unwrap();
        assert_eq!(qp.a, pq.a);
        assert_eq!(qp.b, pq.b);
        assert_eq!(&qp.phase - &pq.phase, -(a * b));
    }

    #[test]
    fn zero_prefactor_rejected() {
        assert!(ExpLinear::new(vec![int(0)], vec![int(0)], Coeff::zero()).is_err());
    }
}
