use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, RMat};
use crate::moyal::{NumericPoly, PolySymbol};

/// How gradients and Hessians are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    /// Central differences; `scale` is the typical size of the coordinates.
    FiniteDifference { scale: f64 },
}

/// Second derivatives of H. `qp[(i, j)]` is d^2 H / dq_i dp_j.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    pub pp: RMat,
    pub qp: RMat,
    pub qq: RMat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    /// p^2 / 2m.
    Free { mass: f64 },
    /// p^2 / 2m + m omega^2 q^2 / 2.
    Harmonic { mass: f64, omega: f64 },
    /// p^2 / 2m + lambda q^4 / 4.
    Quartic { mass: f64, lambda: f64 },
    /// p^2 / 2m + m omega^2 (1 - cos q).
    Pendulum { mass: f64, omega: f64 },
    /// 1/2 q.a.q + q.b.p + 1/2 p.c.p.
    Quadratic { a: RMat, b: RMat, c: RMat },
    /// A real polynomial obtained from a symbol with hbar substituted.
    Polynomial { poly: NumericPoly },
}

/// A classical Hamiltonian H(t, p, q) with first and second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    n: usize,
    kind: HamiltonianKind,
    mode: DerivativeMode,
    derivs: Option<PolyDerivs>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PolyDerivs {
    grad: Vec<NumericPoly>,
    hess: Vec<Vec<NumericPoly>>,
}

impl HamiltonianSpec {
    pub fn free(mass: f64) -> Result<Self> {
        positive("mass", mass)?;
        Ok(Self { n: 1, kind: HamiltonianKind::Free { mass }, mode: DerivativeMode::Analytic, derivs: None })
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("omega", omega)?;
        Ok(Self { n: 1, kind: HamiltonianKind::Harmonic { mass, omega }, mode: DerivativeMode::Analytic, derivs: None })
    }

    pub fn quartic(mass: f64, lambda: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("lambda", lambda)?;
        Ok(Self { n: 1, kind: HamiltonianKind::Quartic { mass, lambda }, mode: DerivativeMode::Analytic, derivs: None })
    }

    pub fn pendulum(mass: f64, omega: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("omega", omega)?;
        Ok(Self { n: 1, kind: HamiltonianKind::Pendulum { mass, omega }, mode: DerivativeMode::Analytic, derivs: None })
    }

    pub fn quadratic(a: RMat, b: RMat, c: RMat) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || [&a, &b, &c].iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::Dimension { expected: n, got: b.nrows().max(c.nrows()) });
        }
        if !is_symmetric(&a, 1e-14) {
            return Err(Error::NotSymmetric("a"));
        }
        if !is_symmetric(&c, 1e-14) {
            return Err(Error::NotSymmetric("c"));
        }
        Ok(Self { n, kind: HamiltonianKind::Quadratic { a, b, c }, mode: DerivativeMode::Analytic, derivs: None })
    }

    /// Classical Hamiltonian from a symbol, with hbar replaced by `hbar`. The
    /// resulting coefficients must be real.
    pub fn polynomial(symbol: &PolySymbol, hbar: f64) -> Result<Self> {
        let poly = symbol.to_numeric(hbar);
        if poly.max_imag_coeff() > 1e-14 {
            return Err(Error::InvalidArgument("Hamiltonian symbol has non-real coefficients".into()));
        }
        let poly = NumericPoly {
            n: poly.n,
            terms: poly.terms.into_iter().map(|(e, c)| (e, num_complex::Complex64::new(c.re, 0.0))).collect(),
        };
        let m = 2 * symbol.n();
        let grad: Vec<NumericPoly> = (0..m).map(|k| poly.derivative(k)).collect();
        let hess = (0..m).map(|k| (0..m).map(|l| grad[k].derivative(l)).collect()).collect();
        Ok(Self {
            n: symbol.n(),
            kind: HamiltonianKind::Polynomial { poly },
            mode: DerivativeMode::Analytic,
            derivs: Some(PolyDerivs { grad, hess }),
        })
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    /// `Some((mass, U))` when H = p^2 / 2m + U(q) with one degree of freedom.
    pub fn separable(&self) -> Option<(f64, Box<dyn Fn(f64) -> f64 + Send + Sync>)> {
        match self.kind {
            HamiltonianKind::Free { mass } => Some((mass, Box::new(|_| 0.0))),
            HamiltonianKind::Harmonic { mass, omega } => Some((mass, Box::new(move |q| 0.5 * mass * omega * omega * q * q))),
            HamiltonianKind::Quartic { mass, lambda } => Some((mass, Box::new(move |q| 0.25 * lambda * q.powi(4)))),
            HamiltonianKind::Pendulum { mass, omega } => Some((mass, Box::new(move |q| mass * omega * omega * (1.0 - q.cos())))),
            _ => None,
        }
    }

    fn check(&self, p: &[f64], q: &[f64]) {
        assert!(p.len() == self.n && q.len() == self.n, "phase-space vector has wrong dimension");
    }

    pub fn eval(&self, t: f64, p: &[f64], q: &[f64]) -> f64 {
        let _ = t;
        self.check(p, q);
        match &self.kind {
            HamiltonianKind::Free { mass } => 0.5 * p[0] * p[0] / mass,
            HamiltonianKind::Harmonic { mass, omega } => 0.5 * p[0] * p[0] / mass + 0.5 * mass * omega * omega * q[0] * q[0],
            HamiltonianKind::Quartic { mass, lambda } => 0.5 * p[0] * p[0] / mass + 0.25 * lambda * q[0].powi(4),
            HamiltonianKind::Pendulum { mass, omega } => 0.5 * p[0] * p[0] / mass + mass * omega * omega * (1.0 - q[0].cos()),
            HamiltonianKind::Quadratic { a, b, c } => {
                let (qv, pv) = (RMat::from_column_slice(self.n, 1, q), RMat::from_column_slice(self.n, 1, p));
                (0.5 * qv.transpose() * a * &qv + qv.transpose() * b * &pv + 0.5 * pv.transpose() * c * &pv)[(0, 0)]
            }
            HamiltonianKind::Polynomial { poly } => poly.eval(q, p).re,
        }
    }

    fn analytic_grad(&self, p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            HamiltonianKind::Free { mass } => (vec![p[0] / mass], vec![0.0]),
            HamiltonianKind::Harmonic { mass, omega } => (vec![p[0] / mass], vec![mass * omega * omega * q[0]]),
            HamiltonianKind::Quartic { mass, lambda } => (vec![p[0] / mass], vec![lambda * q[0].powi(3)]),
            HamiltonianKind::Pendulum { mass, omega } => (vec![p[0] / mass], vec![mass * omega * omega * q[0].sin()]),
            HamiltonianKind::Quadratic { a, b, c } => {
                let (qv, pv) = (RMat::from_column_slice(self.n, 1, q), RMat::from_column_slice(self.n, 1, p));
                let hp = b.transpose() * &qv + c * &pv;
                let hq = a * &qv + b * &pv;
                (hp.iter().cloned().collect(), hq.iter().cloned().collect())
            }
            HamiltonianKind::Polynomial { .. } => {
                let d = self.poly_derivs();
                let n = self.n;
                (
                    (0..n).map(|i| d.grad[n + i].eval(q, p).re).collect(),
                    (0..n).map(|i| d.grad[i].eval(q, p).re).collect(),
                )
            }
        }
    }

    fn poly_derivs(&self) -> &PolyDerivs {
        self.derivs.as_ref().expect("polynomial Hamiltonian without cached derivatives")
    }

    fn analytic_hess(&self, p: &[f64], q: &[f64]) -> Hessian {
        let n = self.n;
        let z = RMat::zeros(n, n);
        let one = |v: f64| RMat::from_element(1, 1, v);
        match &self.kind {
            HamiltonianKind::Free { mass } => Hessian { pp: one(1.0 / mass), qp: z.clone(), qq: z },
            HamiltonianKind::Harmonic { mass, omega } => {
                Hessian { pp: one(1.0 / mass), qp: z, qq: one(mass * omega * omega) }
            }
            HamiltonianKind::Quartic { mass, lambda } => {
                Hessian { pp: one(1.0 / mass), qp: z, qq: one(3.0 * lambda * q[0] * q[0]) }
            }
            HamiltonianKind::Pendulum { mass, omega } => {
                Hessian { pp: one(1.0 / mass), qp: z, qq: one(mass * omega * omega * q[0].cos()) }
            }
            HamiltonianKind::Quadratic { a, b, c } => Hessian { pp: c.clone(), qp: b.clone(), qq: a.clone() },
            HamiltonianKind::Polynomial { .. } => {
                let d = self.poly_derivs();
                let at = |k: usize, l: usize| d.hess[k][l].eval(q, p).re;
                Hessian {
                    pp: RMat::from_fn(n, n, |i, j| at(n + i, n + j)),
                    qp: RMat::from_fn(n, n, |i, j| at(i, n + j)),
                    qq: RMat::from_fn(n, n, |i, j| at(i, j)),
                }
            }
        }
    }

    /// (H_p, H_q).
    pub fn grad(&self, t: f64, p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.check(p, q);
        match self.mode {
            DerivativeMode::Analytic => self.analytic_grad(p, q),
            DerivativeMode::FiniteDifference { scale } => {
                let h = f64::EPSILON.cbrt() * scale;
                let n = self.n;
                let mut hp = vec![0.0; n];
                let mut hq = vec![0.0; n];
                for i in 0..n {
                    let (mut pp, mut pm) = (p.to_vec(), p.to_vec());
                    pp[i] += h;
                    pm[i] -= h;
                    hp[i] = (self.eval(t, &pp, q) - self.eval(t, &pm, q)) / (2.0 * h);
                    let (mut qp, mut qm) = (q.to_vec(), q.to_vec());
                    qp[i] += h;
                    qm[i] -= h;
                    hq[i] = (self.eval(t, p, &qp) - self.eval(t, p, &qm)) / (2.0 * h);
                }
                (hp, hq)
            }
        }
    }

    /// Second derivatives; in finite-difference mode these are central
    /// differences of the analytic-or-differenced gradient.
    pub fn hess(&self, t: f64, p: &[f64], q: &[f64]) -> Hessian {
        self.check(p, q);
        match self.mode {
            DerivativeMode::Analytic => self.analytic_hess(p, q),
            DerivativeMode::FiniteDifference { scale } => {
                let n = self.n;
                // Second differences of H need a larger step than first differences.
                let h = f64::EPSILON.powf(0.25) * scale;
                let mut full = RMat::zeros(2 * n, 2 * n);
                for k in 0..2 * n {
                    let shift = |sign: f64| {
                        let (mut pv, mut qv) = (p.to_vec(), q.to_vec());
                        if k < n {
                            qv[k] += sign * h;
                        } else {
                            pv[k - n] += sign * h;
                        }
                        let (gp, gq) = self.grad(t, &pv, &qv);
                        gq.into_iter().chain(gp).collect::<Vec<f64>>()
                    };
                    let (up, dn) = (shift(1.0), shift(-1.0));
                    for l in 0..2 * n {
                        full[(k, l)] = (up[l] - dn[l]) / (2.0 * h);
                    }
                }
                let full = (&full + full.transpose()) * 0.5;
                Hessian {
                    pp: full.view((n, n), (n, n)).into_owned(),
                    qp: full.view((0, n), (n, n)).into_owned(),
                    qq: full.view((0, 0), (n, n)).into_owned(),
                }
            }
        }
    }
}
