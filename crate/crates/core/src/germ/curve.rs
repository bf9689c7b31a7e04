use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{integrate_flow, HamiltonianSpec, StepControl};
use crate::error::{Error, Result};
use crate::oracle::{inverse_fourier_h, Grid1D, WavefunctionGrid};
use crate::symplectic::{branch_track, moebius_act, SiegelMatrix, MASLOV_INTEGER_TOL};

/// Default bound on |dS/dalpha - p0 dq0/dalpha|.
pub const CURVE_TOL: f64 = 1e-6;
/// Relative change allowed when the alpha resolution of the superposition is halved.
pub const SUPERPOSE_TOL: f64 = 1e-6;
/// Required samples per alpha-width of the packet overlap.
pub const SAMPLES_PER_WIDTH: f64 = 16.0;
/// |dq0/dalpha| relative to |(dq0, dp0)/dalpha| below which a point counts as focal.
pub const FOCAL_TOL: f64 = 1e-3;
/// Samples whose amplitude is below this fraction of the largest one are ignored
/// when checking resolution and focal points.
const NEGLIGIBLE: f64 = 1e-10;

/// One sample of a curve: the phase-space point, the action and the Gaussian
/// envelope f(alpha, x) = amp exp((i/2) z x^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub q0: f64,
    pub p0: f64,
    pub s: f64,
    pub z: Complex64,
    pub amp: Complex64,
}

/// A sampled Lagrangian curve alpha -> (p0, q0) in the plane carrying an
/// action S(alpha) and Gaussian envelopes, on a uniform alpha grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianCurve {
    alpha: Vec<f64>,
    points: Vec<CurvePoint>,
    dq: Vec<f64>,
    dp: Vec<f64>,
    ds: Vec<f64>,
}

fn derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let d = if j >= 2 && j + 2 < n {
                f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]
            } else if j == 0 {
                -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
            } else if j == 1 {
                -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
            } else if j == n - 2 {
                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
            } else {
                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
            };
            d / (12.0 * h)
        })
        .collect()
}

impl LagrangianCurve {
    pub fn new(alpha: Vec<f64>, points: Vec<CurvePoint>, curve_tol: f64) -> Result<Self> {
        if alpha.len() != points.len() {
            return Err(Error::Dimension { expected: alpha.len(), got: points.len() });
        }
        if alpha.len() < 5 {
            return Err(Error::InvalidArgument("a curve needs at least 5 samples".into()));
        }
        let h = (alpha[alpha.len() - 1] - alpha[0]) / (alpha.len() - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("alpha grid must be increasing".into()));
        }
        for (j, a) in alpha.iter().enumerate() {
            if (a - (alpha[0] + h * j as f64)).abs() > 1e-9 * h.max(a.abs()) {
                return Err(Error::InvalidArgument(format!("alpha grid is not uniform at sample {j}")));
            }
        }
        for (j, pt) in points.iter().enumerate() {
            if !(pt.z.im > 0.0) {
                return Err(Error::NotPositiveDefinite { min_eigenvalue: pt.z.im });
            }
            if !(pt.q0.is_finite() && pt.p0.is_finite() && pt.s.is_finite() && pt.amp.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite curve data at sample {j}")));
            }
        }
        let col = |f: fn(&CurvePoint) -> f64| -> Vec<f64> { points.iter().map(f).collect() };
        let dq = derivative(&col(|p| p.q0), h);
        let dp = derivative(&col(|p| p.p0), h);
        let ds = derivative(&col(|p| p.s), h);
        let curve = Self { alpha, points, dq, dp, ds };
        if let Some((index, residual)) = curve
            .lagrangian_residuals()
            .into_iter()
            .enumerate()
            .find(|(_, r)| *r > curve_tol)
        {
            return Err(Error::NotLagrangian { index, residual });
        }
        Ok(curve)
    }

    /// Sample `f` on `len` uniformly spaced parameters in [a0, a1].
    pub fn from_fn<F: Fn(f64) -> CurvePoint>(a0: f64, a1: f64, len: usize, curve_tol: f64, f: F) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidArgument("a curve needs at least 5 samples".into()));
        }
        let alpha: Vec<f64> = (0..len).map(|j| a0 + (a1 - a0) * j as f64 / (len - 1) as f64).collect();
        let points = alpha.iter().map(|&a| f(a)).collect();
        Self::new(alpha, points, curve_tol)
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        self.alpha[1] - self.alpha[0]
    }

    /// Tangent (dq0/dalpha, dp0/dalpha) at sample j.
    pub fn tangent(&self, j: usize) -> (f64, f64) {
        (self.dq[j], self.dp[j])
    }

    /// |dS/dalpha - p0 dq0/dalpha| at every sample.
    pub fn lagrangian_residuals(&self) -> Vec<f64> {
        (0..self.len()).map(|j| (self.ds[j] - self.points[j].p0 * self.dq[j]).abs()).collect()
    }

    fn significant(&self) -> (usize, usize) {
        let peak = self.points.iter().fold(0.0_f64, |m, p| m.max(p.amp.norm()));
        let keep = |p: &CurvePoint| p.amp.norm() > NEGLIGIBLE * peak;
        let lo = self.points.iter().position(keep).unwrap_or(0);
        let hi = self.points.iter().rposition(keep).unwrap_or(self.len() - 1);
        (lo, hi)
    }

    /// Cubic Lagrange stencil for an interior parameter value.
    fn stencil(&self, a0: f64) -> Result<(usize, [f64; 4])> {
        let h = self.spacing();
        let x = (a0 - self.alpha[0]) / h;
        if x < -1e-9 || x > (self.len() - 1) as f64 + 1e-9 {
            return Err(Error::InvalidArgument(format!("alpha0 = {a0} is outside the curve")));
        }
        let j = (x.floor() as isize - 1).clamp(0, self.len() as isize - 4) as usize;
        let u = x - j as f64;
        let mut w = [0.0; 4];
        for (k, wk) in w.iter_mut().enumerate() {
            let mut v = 1.0;
            for m in 0..4 {
                if m != k {
                    v *= (u - m as f64) / (k as f64 - m as f64);
                }
            }
            *wk = v;
        }
        Ok((j, w))
    }

    fn interp<F: Fn(usize) -> Complex64>(j: usize, w: &[f64; 4], f: F) -> Complex64 {
        (0..4).map(|k| f(j + k) * w[k]).sum()
    }

    /// The same superposition seen in the momentum representation: every
    /// packet is mapped by the quarter turn (q, p) -> (p, -q) with its exact
    /// Fourier image, so that the superposition of the result is F_hbar of the
    /// superposition of `self`.
    pub fn rotated(&self) -> LagrangianCurve {
        let points = self
            .points
            .iter()
            .map(|pt| CurvePoint {
                q0: pt.p0,
                p0: -pt.q0,
                s: pt.s - pt.p0 * pt.q0,
                z: -pt.z.inv(),
                amp: pt.amp / (-Complex64::i() * pt.z).sqrt(),
            })
            .collect::<Vec<_>>();
        let h = self.spacing();
        let col = |f: fn(&CurvePoint) -> f64| -> Vec<f64> { points.iter().map(f).collect() };
        LagrangianCurve {
            alpha: self.alpha.clone(),
            dq: derivative(&col(|p| p.q0), h),
            dp: derivative(&col(|p| p.p0), h),
            ds: derivative(&col(|p| p.s), h),
            points,
        }
    }

    /// Move every sample along the Hamiltonian flow from t0 to t1: the point
    /// follows Hamilton's equations, S gains the action, the envelope germ is
    /// transported by the monodromy and the amplitude is divided by the
    /// continuous branch of sqrt det(C Z + D).
    pub fn flow(&self, h: &HamiltonianSpec, t0: f64, t1: f64, ctl: &StepControl, curve_tol: f64) -> Result<LagrangianCurve> {
        if h.n() != 1 {
            return Err(Error::Dimension { expected: 1, got: h.n() });
        }
        let mut points = Vec::with_capacity(self.len());
        for pt in &self.points {
            let traj = integrate_flow(h, &[pt.q0], &[pt.p0], t0, t1, ctl)?;
            let z0 = SiegelMatrix::from_scalar(pt.z)?;
            let path = branch_track(&traj.block_path(), &z0)?;
            let last = traj.last();
            points.push(CurvePoint {
                q0: last.q[0],
                p0: last.p[0],
                s: pt.s + last.s,
                z: moebius_act(&last.block, &z0)?.get(0, 0),
                amp: pt.amp / path.sqrt_value(),
            });
        }
        LagrangianCurve::new(self.alpha.clone(), points, curve_tol)
    }
}

fn superpose_samples(curve: &LagrangianCurve, hbar: f64, grid: &Grid1D, stride: usize) -> Vec<Complex64> {
    let n = curve.len();
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let last = *idx.last().unwrap();
    let dalpha = curve.spacing() * stride as f64;
    let scale = dalpha / hbar.sqrt();
    let xs = grid.points();
    let mut out = vec![Complex64::new(0.0, 0.0); xs.len()];
    for &j in &idx {
        let pt = &curve.points[j];
        let w = if j == 0 || j == last { 0.5 * scale } else { scale };
        let weight = pt.amp * w;
        if weight.norm() == 0.0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(&xs) {
            let d = x - pt.q0;
            let e = Complex64::i() / hbar * (pt.s + pt.p0 * d + 0.5 * pt.z * d * d);
            *o += weight * e.exp();
        }
    }
    out
}

/// Trapezoid quadrature over alpha of the packet superposition
/// psi(x) = int exp((i/hbar)(S + p0 (x - q0))) f(alpha, (x - q0)/sqrt(hbar)) dalpha / sqrt(hbar).
///
/// The alpha spacing must resolve the overlap of neighbouring packets, and
/// the result must be stable when every other sample is dropped.
pub fn canonical_superpose(curve: &LagrangianCurve, hbar: f64, grid: &Grid1D) -> Result<WavefunctionGrid> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let (lo, hi) = curve.significant();
    let h = curve.spacing();
    for j in lo..=hi {
        let pt = &curve.points[j];
        let (q, p) = curve.tangent(j);
        let rate = (Complex64::new(p, 0.0) - pt.z * q).norm();
        let width = (hbar * pt.z.im).sqrt() / rate.max(1e-300);
        if h * SAMPLES_PER_WIDTH > width {
            return Err(Error::Convergence(format!(
                "alpha spacing {h:.3e} too coarse at sample {j}: need at most {:.3e}",
                width / SAMPLES_PER_WIDTH
            )));
        }
    }
    let fine = superpose_samples(curve, hbar, grid, 1);
    if curve.len() % 2 == 1 {
        let coarse = superpose_samples(curve, hbar, grid, 2);
        let peak = fine.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let diff = fine.iter().zip(&coarse).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        if diff > SUPERPOSE_TOL * peak.max(1e-300) {
            return Err(Error::Convergence(format!("halving the alpha resolution changes the result by {diff:.3e}")));
        }
    }
    WavefunctionGrid::new(*grid, fine, hbar)
}

/// Leading stationary-phase term exp(i S/hbar) a at the curve point alpha0:
/// S = S(alpha0) and, for the Gaussian envelope f = A exp((i/2) Z x^2),
/// a = (1/|Q|) int exp(-(i/2)(P/Q) x^2) f(x) dx = (A/|Q|) sqrt(2 pi / (-i (Z - P/Q)))
/// with P = dp0/dalpha, Q = dq0/dalpha.
pub fn stationary_phase_reconstruct(curve: &LagrangianCurve, alpha0: f64, hbar: f64) -> Result<(f64, Complex64)> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let (j, w) = curve.stencil(alpha0)?;
    let pts = &curve.points;
    let s = LagrangianCurve::interp(j, &w, |i| Complex64::new(pts[i].s, 0.0)).re;
    let q = LagrangianCurve::interp(j, &w, |i| Complex64::new(curve.dq[i], 0.0)).re;
    let p = LagrangianCurve::interp(j, &w, |i| Complex64::new(curve.dp[i], 0.0)).re;
    let z = LagrangianCurve::interp(j, &w, |i| pts[i].z);
    let amp = LagrangianCurve::interp(j, &w, |i| pts[i].amp);
    if q.abs() <= FOCAL_TOL * q.hypot(p) {
        return Err(Error::FocalPoint(format!("dq0/dalpha = {q:e} at alpha = {alpha0}")));
    }
    let a = amp / q.abs() * (Complex64::new(2.0 * PI, 0.0) / (-Complex64::i() * (z - p / q))).sqrt();
    Ok((s, a))
}

fn direct_reconstruction(curve: &LagrangianCurve, hbar: f64, grid: &Grid1D) -> Result<WavefunctionGrid> {
    let (lo, hi) = curve.significant();
    let pts = curve.points();
    for j in lo..=hi {
        let (q, p) = curve.tangent(j);
        if q.abs() <= FOCAL_TOL * q.hypot(p) || q.signum() != curve.dq[lo].signum() {
            return Err(Error::FocalPoint(format!("projection to q degenerates at alpha = {}", curve.alpha[j])));
        }
    }
    let increasing = pts[hi].q0 > pts[lo].q0;
    let (qmin, qmax) = if increasing { (pts[lo].q0, pts[hi].q0) } else { (pts[hi].q0, pts[lo].q0) };
    let q_at = |a: f64| -> Result<f64> {
        let (j, w) = curve.stencil(a)?;
        Ok(LagrangianCurve::interp(j, &w, |i| Complex64::new(pts[i].q0, 0.0)).re)
    };
    let mut values = Vec::with_capacity(grid.len());
    for x in grid.points() {
        if x < qmin || x > qmax {
            values.push(Complex64::new(0.0, 0.0));
            continue;
        }
        // bracket on the samples, then bisect on the interpolant
        let (mut j0, mut j1) = (lo, hi);
        while j1 - j0 > 1 {
            let mid = (j0 + j1) / 2;
            if (pts[mid].q0 < x) == increasing {
                j0 = mid;
            } else {
                j1 = mid;
            }
        }
        let (mut a0, mut a1) = (curve.alpha[j0], curve.alpha[j1]);
        let f0 = q_at(a0)? - x;
        for _ in 0..60 {
            let am = 0.5 * (a0 + a1);
            if (q_at(am)? - x).signum() == f0.signum() {
                a0 = am;
            } else {
                a1 = am;
            }
        }
        let (s, a) = stationary_phase_reconstruct(curve, 0.5 * (a0 + a1), hbar)?;
        values.push(a * Complex64::from_polar(1.0, s / hbar));
    }
    WavefunctionGrid::new(*grid, values, hbar)
}

/// Leading-order reconstruction exp(i S(q)/hbar) a(q) on a grid. Where the
/// curve does not project regularly onto q, the reconstruction is done for
/// the rotated curve on the momentum grid and brought back with the inverse
/// hbar-Fourier transform, which restores the caustic phase.
pub fn reconstruct_on_grid(curve: &LagrangianCurve, hbar: f64, grid: &Grid1D) -> Result<WavefunctionGrid> {
    match direct_reconstruction(curve, hbar, grid) {
        Err(Error::FocalPoint(_)) => {
            let rotated = curve.rotated();
            let phi = direct_reconstruction(&rotated, hbar, &grid.dual(hbar))?;
            inverse_fourier_h(&phi, grid)
        }
        other => other,
    }
}

/// Maslov index of a closed curve: the total change of arg(dq0 - i dp0)
/// along the curve divided by pi.
pub fn closed_curve_maslov_index(curve: &LagrangianCurve) -> Result<i64> {
    let first = curve.points[0];
    let last = curve.points[curve.len() - 1];
    let size = first.q0.hypot(first.p0).max(1.0);
    if (first.q0 - last.q0).abs() > 1e-8 * size || (first.p0 - last.p0).abs() > 1e-8 * size {
        return Err(Error::InvalidArgument("curve is not closed".into()));
    }
    let v = |j: usize| Complex64::new(curve.dq[j], -curve.dp[j]);
    let mut total = 0.0;
    for j in 1..curve.len() {
        let step = (v(j) / v(j - 1)).arg();
        if step.abs() > PI / 2.0 {
            return Err(Error::BranchJump { t0: curve.alpha[j - 1], t1: curve.alpha[j], jump: step });
        }
        total += step;
    }
    let k = total / PI;
    if (k - k.round()).abs() > MASLOV_INTEGER_TOL {
        return Err(Error::Inconclusive(format!("winding {k:.4} is not an integer")));
    }
    Ok(k.round() as i64)
}
