use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;

use super::laurent::Laurent;
use crate::error::{Error, Result};
use crate::moyal::coeff;

/// Coefficient variable holding hbar.
pub const HBAR_VAR: usize = 0;
/// Coefficient variable holding mu = 1/(2m).
pub const MU_VAR: usize = 1;
/// First coefficient variable holding a phase z_j = exp(i m t_j).
pub const FIRST_PHASE_VAR: usize = 2;

fn binom(n: u32, k: u32) -> BigInt {
    coeff::falling(n, k) / coeff::factorial(k)
}

/// Polynomial in the one-mode amplitudes u+ and u- with exact Laurent
/// coefficients. The key (a, b) stands for the normal-ordered product
/// u+^a * u-^b; products are reduced with [u-, u+] = hbar/(2m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePolynomial {
    nvars: usize,
    terms: BTreeMap<(u32, u32), Laurent>,
}

impl ModePolynomial {
    /// Zero polynomial whose coefficients have `nphases` phase variables.
    pub fn zero(nphases: usize) -> Self {
        Self { nvars: FIRST_PHASE_VAR + nphases, terms: BTreeMap::new() }
    }

    pub fn constant(c: Laurent) -> Self {
        let mut out = Self { nvars: c.nvars(), terms: BTreeMap::new() };
        out.add_term((0, 0), c);
        out
    }

    pub fn one(nphases: usize) -> Self {
        Self::constant(Laurent::one(FIRST_PHASE_VAR + nphases))
    }

    /// Normal-ordered monomial u+^a u-^b with unit coefficient.
    pub fn monomial(nphases: usize, a: u32, b: u32) -> Self {
        let mut out = Self::zero(nphases);
        out.add_term((a, b), Laurent::one(out.nvars));
        out
    }

    pub fn u_plus(nphases: usize) -> Self {
        Self::monomial(nphases, 1, 0)
    }

    pub fn u_minus(nphases: usize) -> Self {
        Self::monomial(nphases, 0, 1)
    }

    /// The free field u(t) = u- exp(-imt) + u+ exp(imt), with exp(imt) the
    /// phase variable number `phase`.
    pub fn field(nphases: usize, phase: usize) -> Result<Self> {
        if phase >= nphases {
            return Err(Error::InvalidArgument(format!("phase variable {phase} out of range")));
        }
        let n = FIRST_PHASE_VAR + nphases;
        let mut out = Self::zero(nphases);
        out.add_term((0, 1), Laurent::var(n, FIRST_PHASE_VAR + phase, -1));
        out.add_term((1, 0), Laurent::var(n, FIRST_PHASE_VAR + phase, 1));
        Ok(out)
    }

    /// kappa = hbar / (2m) = [u-, u+] as a coefficient.
    pub fn kappa(nvars: usize) -> Laurent {
        Laurent::var(nvars, HBAR_VAR, 1).try_mul(&Laurent::var(nvars, MU_VAR, 1)).unwrap()
    }

    pub fn nphases(&self) -> usize {
        self.nvars - FIRST_PHASE_VAR
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Laurent)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Laurent {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| Laurent::zero(self.nvars))
    }

    fn add_term(&mut self, key: (u32, u32), c: Laurent) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&key) {
            Some(old) => old.try_add(&c).unwrap(),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    fn check(&self, other: &ModePolynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ModePolynomial) -> Result<ModePolynomial> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ModePolynomial) -> Result<ModePolynomial> {
        self.try_add(&other.scale(&Laurent::constant(self.nvars, -coeff::c_one())))
    }

    pub fn scale(&self, c: &Laurent) -> ModePolynomial {
        let mut out = Self { nvars: self.nvars, terms: BTreeMap::new() };
        for (k, v) in &self.terms {
            out.add_term(*k, v.try_mul(c).unwrap());
        }
        out
    }

    /// Terms whose coefficient carries hbar^power, with hbar removed.
    pub fn hbar_part(&self, power: i32) -> ModePolynomial {
        let mut out = Self { nvars: self.nvars, terms: BTreeMap::new() };
        for (k, v) in &self.terms {
            out.add_term(*k, v.part(HBAR_VAR, power));
        }
        out
    }

    /// Evaluate with numeric coefficient variables and numeric amplitudes.
    pub fn eval(&self, vars: &[Complex64], u_plus: Complex64, u_minus: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|((a, b), c)| c.eval(vars) * u_plus.powi(*a as i32) * u_minus.powi(*b as i32))
            .sum()
    }

    /// Flatten into numeric terms for repeated evaluation.
    pub fn compile(&self) -> CompiledMode {
        let mut terms = Vec::new();
        for ((a, b), c) in &self.terms {
            for (e, v) in c.terms() {
                terms.push(CompiledTerm { c: coeff::to_c64(v), exps: e.clone(), a: *a, b: *b });
            }
        }
        CompiledMode { terms }
    }
}

impl fmt::Display for ModePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, b), c)| format!("[{c}]*u+^{a}*u-^{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    c: Complex64,
    exps: Vec<i32>,
    a: u32,
    b: u32,
}

/// Numeric form of a [`ModePolynomial`].
#[derive(Debug, Clone)]
pub struct CompiledMode {
    terms: Vec<CompiledTerm>,
}

impl CompiledMode {
    pub fn eval(&self, vars: &[Complex64], u_plus: Complex64, u_minus: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.c * u_plus.powi(t.a as i32) * u_minus.powi(t.b as i32);
                for (k, x) in t.exps.iter().zip(vars) {
                    if *k != 0 {
                        v *= x.powi(*k);
                    }
                }
                v
            })
            .sum()
    }
}

/// Associative product of the one-mode Weyl algebra, using
/// u-^b * u+^c = sum_k C(b,k) C(c,k) k! kappa^k u+^(c-k) u-^(b-k).
pub fn mode_star(f: &ModePolynomial, g: &ModePolynomial) -> Result<ModePolynomial> {
    f.check(g)?;
    let kappa = ModePolynomial::kappa(f.nvars);
    let mut out = ModePolynomial { nvars: f.nvars, terms: BTreeMap::new() };
    for ((a, b), c1) in &f.terms {
        for ((c, d), c2) in &g.terms {
            let base = c1.try_mul(c2)?;
            for k in 0..=(*b).min(*c) {
                let n = binom(*b, k) * binom(*c, k) * coeff::factorial(k);
                let w = Laurent::constant(f.nvars, coeff::real(coeff::Rational::from_integer(n))).try_mul(&kappa.pow(k))?;
                out.add_term((a + c - k, b + d - k), base.try_mul(&w)?);
            }
        }
    }
    Ok(out)
}

pub fn mode_commutator(f: &ModePolynomial, g: &ModePolynomial) -> Result<ModePolynomial> {
    mode_star(f, g)?.try_sub(&mode_star(g, f)?)
}

/// Vacuum functional: <Phi * u-> = <u+ * Phi> = 0 and <1> = 1, i.e. the
/// constant term of the normal-ordered form.
pub fn vacuum_average(f: &ModePolynomial) -> Laurent {
    f.coeff(0, 0)
}

/// Normal-ordered form of the symmetrically ordered monomial u+^a u-^b:
/// sum_k C(a,k) C(b,k) k! (kappa/2)^k u+^(a-k) u-^(b-k).
pub fn weyl_monomial(nphases: usize, a: u32, b: u32) -> ModePolynomial {
    let mut out = ModePolynomial::zero(nphases);
    let nv = out.nvars;
    let half_kappa = ModePolynomial::kappa(nv).scale(&coeff::real(coeff::rat(1, 2)));
    for k in 0..=a.min(b) {
        let n = binom(a, k) * binom(b, k) * coeff::factorial(k);
        let w = Laurent::constant(nv, coeff::real(coeff::Rational::from_integer(n))).try_mul(&half_kappa.pow(k)).unwrap();
        out.add_term((a - k, b - k), w);
    }
    out
}

/// The Weyl symbol u(t)^k of the field power, in normal-ordered form.
pub fn weyl_field_power(nphases: usize, phase: usize, k: u32) -> Result<ModePolynomial> {
    if phase >= nphases {
        return Err(Error::InvalidArgument(format!("phase variable {phase} out of range")));
    }
    let nv = FIRST_PHASE_VAR + nphases;
    let mut out = ModePolynomial::zero(nphases);
    for j in 0..=k {
        // C(k, j) (u+ z)^j (u- / z)^(k-j) as a commuting product
        let c = Laurent::var(nv, FIRST_PHASE_VAR + phase, 2 * j as i32 - k as i32)
            .scale(&coeff::real(coeff::Rational::from_integer(binom(k, j))));
        out = out.try_add(&weyl_monomial(nphases, j, k - j).scale(&c))?;
    }
    Ok(out)
}
