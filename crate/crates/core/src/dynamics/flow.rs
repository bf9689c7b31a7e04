use super::hamiltonian::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::symplectic::{symplectify, SymplecticBlock};

/// Integration method for the Hamilton flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with step doubling.
    Rk4Adaptive,
    /// Fixed-step kick-drift-kick for separable H = p^2/2m + U(q).
    Leapfrog { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Local error bound per step (mixed absolute/relative).
    pub tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    /// Escape bound on |(p, q)|.
    pub escape: f64,
    /// Symplectic defect above which the monodromy block is projected back.
    pub symplectify_above: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            h_init: 1e-2,
            h_max: 0.1,
            h_min: 1e-14,
            escape: 1e8,
            symplectify_above: 1e-10,
            max_steps: 2_000_000,
            method: Method::Rk4Adaptive,
        }
    }
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Action accumulated with dS/dt = p.dq/dt - H and S(t0) = 0.
    pub s: f64,
    /// Monodromy from t0, acting on (p, q).
    pub block: SymplecticBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().unwrap()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// The monodromy blocks as a path for branch tracking.
    pub fn block_path(&self) -> Vec<(f64, SymplecticBlock)> {
        self.samples.iter().map(|s| (s.t, s.block.clone())).collect()
    }
}

/// State layout: q (n), p (n), S (1), M (4n^2, column-major).
struct Layout {
    n: usize,
}

impl Layout {
    fn len(&self) -> usize {
        2 * self.n + 1 + 4 * self.n * self.n
    }
    fn s(&self) -> usize {
        2 * self.n
    }
    fn m(&self) -> usize {
        2 * self.n + 1
    }

    fn pack(&self, q: &[f64], p: &[f64], s: f64, m: &RMat) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.len());
        y.extend_from_slice(q);
        y.extend_from_slice(p);
        y.push(s);
        y.extend(m.iter());
        y
    }

    fn block(&self, y: &[f64]) -> RMat {
        RMat::from_column_slice(2 * self.n, 2 * self.n, &y[self.m()..])
    }
}

/// Generator of the variational flow at a point: ((-H_qp, -H_qq), (H_pp, H_qp^T)).
pub fn variational_generator(h: &HamiltonianSpec, t: f64, p: &[f64], q: &[f64]) -> RMat {
    let n = h.n();
    let hs = h.hess(t, p, q);
    let mut k = RMat::zeros(2 * n, 2 * n);
    k.view_mut((0, 0), (n, n)).copy_from(&-&hs.qp);
    k.view_mut((0, n), (n, n)).copy_from(&-&hs.qq);
    k.view_mut((n, 0), (n, n)).copy_from(&hs.pp);
    k.view_mut((n, n), (n, n)).copy_from(&hs.qp.transpose());
    k
}

fn rhs(h: &HamiltonianSpec, lay: &Layout, t: f64, y: &[f64]) -> Vec<f64> {
    let n = lay.n;
    let (q, p) = (&y[..n], &y[n..2 * n]);
    let (hp, hq) = h.grad(t, p, q);
    let energy = h.eval(t, p, q);
    let mut dy = Vec::with_capacity(lay.len());
    dy.extend_from_slice(&hp);
    dy.extend(hq.iter().map(|v| -v));
    dy.push(p.iter().zip(&hp).map(|(a, b)| a * b).sum::<f64>() - energy);
    let k = variational_generator(h, t, p, q);
    dy.extend((k * lay.block(y)).iter());
    dy
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(u, v)| u + a * v).collect()
}

pub(crate) fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64, k1: Option<&[f64]>) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let k1 = match k1 {
        Some(k) => k.to_vec(),
        None => f(t, y),
    };
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Outcome of one adaptive step attempt.
pub(crate) struct Adaptive {
    pub t: f64,
    pub y: Vec<f64>,
    pub h_next: f64,
}

/// Advance by one accepted step of RK4 with step doubling and local
/// extrapolation. `h` is the proposed step; it is clipped to `t_end`.
pub(crate) fn adaptive_step<F>(f: &F, t: f64, y: &[f64], mut h: f64, t_end: f64, ctl: &StepControl) -> Result<Adaptive>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let k1 = f(t, y);
    loop {
        let last = t + h >= t_end;
        let step = if last { t_end - t } else { h };
        let big = rk4_step(f, t, y, step, Some(&k1));
        let half = rk4_step(f, t, y, 0.5 * step, Some(&k1));
        let small = rk4_step(f, t + 0.5 * step, &half, 0.5 * step, None);
        let mut err = 0.0_f64;
        for i in 0..y.len() {
            let sc = ctl.tol * (1.0 + small[i].abs());
            err = err.max((small[i] - big[i]).abs() / 15.0 / sc);
        }
        if !err.is_finite() {
            err = 1e10;
        }
        if err <= 1.0 {
            let y_new: Vec<f64> = small.iter().zip(&big).map(|(s, b)| s + (s - b) / 15.0).collect();
            let grow = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
            let h_next = (step * grow).min(ctl.h_max);
            return Ok(Adaptive { t: if last { t_end } else { t + step }, y: y_new, h_next: if last { h } else { h_next } });
        }
        h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
        if h < ctl.h_min {
            return Err(Error::StepUnderflow { t, h });
        }
    }
}

fn check_escape(lay: &Layout, t: f64, y: &[f64], bound: f64) -> Result<()> {
    let norm = y[..2 * lay.n].iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm <= bound) {
        return Err(Error::Escape { t, norm });
    }
    Ok(())
}

fn sample(lay: &Layout, t: f64, y: &[f64]) -> Result<TrajectorySample> {
    let n = lay.n;
    Ok(TrajectorySample {
        t,
        q: y[..n].to_vec(),
        p: y[n..2 * n].to_vec(),
        s: y[lay.s()],
        block: SymplecticBlock::from_matrix(lay.block(y))?,
    })
}

/// Integrate Hamilton's equations, the action and the variational flow from
/// (q0, p0) at t0 to t1. Every accepted step is recorded as a sample; the last
/// sample is at t1 exactly.
pub fn integrate_flow(
    h: &HamiltonianSpec,
    q0: &[f64],
    p0: &[f64],
    t0: f64,
    t1: f64,
    ctl: &StepControl,
) -> Result<Trajectory> {
    let n = h.n();
    if q0.len() != n || p0.len() != n {
        return Err(Error::Dimension { expected: n, got: q0.len().max(p0.len()) });
    }
    if !(t1 >= t0) {
        return Err(Error::InvalidArgument(format!("t1 = {t1} must not precede t0 = {t0}")));
    }
    let lay = Layout { n };
    let mut y = lay.pack(q0, p0, 0.0, &RMat::identity(2 * n, 2 * n));
    check_escape(&lay, t0, &y, ctl.escape)?;
    let mut samples = vec![sample(&lay, t0, &y)?];
    if t1 == t0 {
        return Ok(Trajectory { n, samples });
    }
    match ctl.method {
        Method::Rk4Adaptive => {
            let f = |t: f64, y: &[f64]| rhs(h, &lay, t, y);
            let (mut t, mut step) = (t0, ctl.h_init.min(t1 - t0));
            let mut count = 0;
            while t < t1 {
                let out = adaptive_step(&f, t, &y, step, t1, ctl)?;
                t = out.t;
                step = out.h_next;
                y = out.y;
                check_escape(&lay, t, &y, ctl.escape)?;
                project_block(&lay, &mut y, ctl)?;
                samples.push(sample(&lay, t, &y)?);
                count += 1;
                if count > ctl.max_steps {
                    return Err(Error::Convergence(format!("more than {} steps", ctl.max_steps)));
                }
            }
        }
        Method::Leapfrog { dt } => {
            let (mass, pot) = h
                .separable()
                .ok_or_else(|| Error::InvalidArgument("leapfrog needs a separable Hamiltonian".into()))?;
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("leapfrog step must be positive".into()));
            }
            let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
            let dt = (t1 - t0) / steps as f64;
            let (mut q, mut p, mut s) = (q0[0], p0[0], 0.0);
            let mut m = RMat::identity(2, 2);
            let force = |q: f64| -h.grad(0.0, &[0.0], &[q]).1[0];
            let curv = |q: f64| h.hess(0.0, &[0.0], &[q]).qq[(0, 0)];
            for k in 1..=steps {
                let kick1 = RMat::from_row_slice(2, 2, &[1.0, -0.5 * dt * curv(q), 0.0, 1.0]);
                let u_old = pot(q);
                p += 0.5 * dt * force(q);
                let drift = RMat::from_row_slice(2, 2, &[1.0, 0.0, dt / mass, 1.0]);
                q += dt * p / mass;
                let kick2 = RMat::from_row_slice(2, 2, &[1.0, -0.5 * dt * curv(q), 0.0, 1.0]);
                s += dt * p * p / (2.0 * mass) - 0.5 * dt * (u_old + pot(q));
                p += 0.5 * dt * force(q);
                m = kick2 * drift * kick1 * m;
                y = lay.pack(&[q], &[p], s, &m);
                check_escape(&lay, t0 + k as f64 * dt, &y, ctl.escape)?;
                samples.push(sample(&lay, if k == steps { t1 } else { t0 + k as f64 * dt }, &y)?);
            }
        }
    }
    Ok(Trajectory { n, samples })
}

fn project_block(lay: &Layout, y: &mut [f64], ctl: &StepControl) -> Result<()> {
    let block = SymplecticBlock::from_matrix(lay.block(y))?;
    if block.relative_defect() > ctl.symplectify_above {
        let fixed = symplectify(&block)?;
        for (dst, v) in y[lay.m()..].iter_mut().zip(fixed.matrix().iter()) {
            *dst = *v;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use std::f64::consts::PI;

    #[test]
    fn free_particle_closed_form() {
        let h = HamiltonianSpec::free(1.0).unwrap();
        let tr = integrate_flow(&h, &[0.0], &[1.0], 0.0, 1.0, &StepControl::default()).unwrap();
        let end = tr.last();
        assert_eq!(end.t, 1.0);
        assert!((end.q[0] - 1.0).abs() < 1e-12);
        assert!((end.p[0] - 1.0).abs() < 1e-12);
        assert!((end.s - 0.5).abs() < 1e-12);
        let expected = RMat::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert!(max_abs(&(end.block.matrix() - expected)) < 1e-12);
    }

    #[test]
    fn harmonic_full_period() {
        let h = HamiltonianSpec::harmonic(1.0, 1.0).unwrap();
        let tr = integrate_flow(&h, &[1.0], &[0.0], 0.0, 2.0 * PI, &StepControl::default()).unwrap();
        let end = tr.last();
        assert!((end.q[0] - 1.0).abs() < 1e-9);
        assert!(end.p[0].abs() < 1e-9);
        assert!(end.s.abs() < 1e-9);
        assert!(max_abs(&(end.block.matrix() - RMat::identity(2, 2))) < 1e-9);
    }

    #[test]
    fn zero_span() {
        let h = HamiltonianSpec::quartic(1.0, 1.0).unwrap();
        let tr = integrate_flow(&h, &[0.3], &[0.2], 1.0, 1.0, &StepControl::default()).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.last().s, 0.0);
        assert_eq!(tr.last().block, SymplecticBlock::identity(1));
    }

    #[test]
    fn escape_is_reported() {
        let h = HamiltonianSpec::polynomial(&crate::moyal::parse("(1/2)*p1^2 - q1^4").unwrap(), 1.0).unwrap();
        let err = integrate_flow(&h, &[1.0], &[1.0], 0.0, 10.0, &StepControl::default()).unwrap_err();
        assert!(matches!(err, Error::Escape { .. } | Error::StepUnderflow { .. }), "{err:?}");
    }

    #[test]
    fn leapfrog_agrees_to_second_order() {
        let h = HamiltonianSpec::quartic(1.0, 1.0).unwrap();
        let exact = integrate_flow(&h, &[1.0], &[0.0], 0.0, 2.0, &StepControl::default()).unwrap();
        let errs: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|&dt| {
                let ctl = StepControl { method: Method::Leapfrog { dt }, ..StepControl::default() };
                let lf = integrate_flow(&h, &[1.0], &[0.0], 0.0, 2.0, &ctl).unwrap();
                assert!(lf.last().block.defect() < 1e-12);
                (lf.last().q[0] - exact.last().q[0]).abs() + (lf.last().s - exact.last().s).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.5 && errs[0] / errs[1] < 4.5, "{errs:?}");
    }
}
