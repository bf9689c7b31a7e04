use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::moyal::coeff::{self, Coeff};

/// Exact Laurent polynomial in a fixed number of commuting variables with
/// complex rational coefficients.
///
/// The mode algebra uses variable 0 for hbar, variable 1 for mu = 1/(2m) and
/// the remaining ones for phases z_j = exp(i m t_j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Coeff>,
}

impl Laurent {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        let mut out = Self::zero(nvars);
        out.add_term(vec![0; nvars], c);
        out
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, coeff::c_one())
    }

    /// x_i^power.
    pub fn var(nvars: usize, i: usize, power: i32) -> Self {
        let mut e = vec![0; nvars];
        e[i] = power;
        let mut out = Self::zero(nvars);
        out.add_term(e, coeff::c_one());
        out
    }

    pub fn monomial(exps: Vec<i32>, c: Coeff) -> Self {
        let mut out = Self::zero(exps.len());
        out.add_term(exps, c);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Coeff)> {
        self.terms.iter()
    }

    pub(crate) fn add_term(&mut self, exps: Vec<i32>, c: Coeff) {
        if coeff::is_zero(&c) {
            return;
        }
        let key = exps.clone();
        let entry = self.terms.entry(exps).or_insert_with(Coeff::zero);
        *entry += c;
        if coeff::is_zero(entry) {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Laurent) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Laurent) -> Result<Laurent> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Laurent) -> Result<Laurent> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Laurent) -> Result<Laurent> {
        self.check(other)?;
        let mut out = Laurent::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Laurent {
        self.scale(&-coeff::c_one())
    }

    pub fn scale(&self, c: &Coeff) -> Laurent {
        let mut out = Laurent::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Laurent {
        let mut out = Laurent::one(self.nvars);
        for _ in 0..k {
            out = out.try_mul(self).unwrap();
        }
        out
    }

    /// Terms whose exponent of variable `i` equals `power`, with that exponent set to zero.
    pub fn part(&self, i: usize, power: i32) -> Laurent {
        let mut out = Laurent::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == power {
                let mut e = e.clone();
                e[i] = 0;
                out.add_term(e, c.clone());
            }
        }
        out
    }

    /// Smallest and largest exponent of variable `i`, if any term exists.
    pub fn degree_range(&self, i: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(values).fold(coeff::to_c64(c), |acc, (&k, &x)| acc * x.powi(k))
            })
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(e, c)| e.iter().all(|k| *k == 0) && c.re.is_one() && c.im.is_zero())
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({} + {}i)", c.re, c.im)?;
            for (i, k) in e.iter().enumerate() {
                if *k != 0 {
                    write!(f, "*x{i}^{k}")?;
                }
            }
        }
        Ok(())
    }
}
