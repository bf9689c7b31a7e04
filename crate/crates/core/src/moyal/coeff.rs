//! Exact complex rational coefficients.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type Coeff = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn real(r: Rational) -> Coeff {
    Complex::new(r, Rational::zero())
}

pub fn coeff(re: Rational, im: Rational) -> Coeff {
    Complex::new(re, im)
}

pub fn c_int(v: i64) -> Coeff {
    real(int(v))
}

pub fn c_one() -> Coeff {
    Coeff::one()
}

pub fn c_i() -> Coeff {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn is_zero(c: &Coeff) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

pub fn conj(c: &Coeff) -> Coeff {
    Complex::new(c.re.clone(), -c.im.clone())
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division for numbers outside the f64 fast path.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_c64(c: &Coeff) -> Complex64 {
    Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im))
}

/// Nearest rational with denominator at most `max_den` (continued fractions).
pub fn rat_from_f64(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x.abs();
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let r = BigRational::new(BigInt::from(h1), BigInt::from(k1));
    Some(if x < 0.0 { -r } else { r })
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// n! / (n-k)!
pub fn falling(n: u32, k: u32) -> BigInt {
    (n - k + 1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}
