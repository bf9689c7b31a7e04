use num_complex::Complex64;

use super::flow::{adaptive_step, StepControl, Trajectory};
use super::hamiltonian::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};
use crate::symplectic::{moebius_act, riccati_rhs, RealLagrangian, SiegelMatrix, PD_TOL};

/// Integrate the germ equation
/// dZ/dt = -(Z H_pp Z + H_qp Z + Z H_qp^T + H_qq)
/// along the trajectory, re-integrating the base point jointly with Z and
/// reporting Z at the trajectory's sample times.
pub fn riccati_integrate(
    traj: &Trajectory,
    h: &HamiltonianSpec,
    z0: &SiegelMatrix,
    ctl: &StepControl,
) -> Result<Vec<(f64, SiegelMatrix)>> {
    let n = traj.n;
    if z0.n() != n || h.n() != n {
        return Err(Error::Dimension { expected: n, got: z0.n() });
    }
    let first = traj.first();
    // State: q (n), p (n), Re Z (n^2), Im Z (n^2), column-major.
    let mut y: Vec<f64> = first.q.iter().chain(&first.p).cloned().collect();
    let zm = z0.matrix();
    y.extend(zm.iter().map(|c| c.re));
    y.extend(zm.iter().map(|c| c.im));
    let unpack_z = |y: &[f64]| {
        CMat::from_fn(n, n, |i, j| Complex64::new(y[2 * n + i + n * j], y[2 * n + n * n + i + n * j]))
    };
    let f = |t: f64, y: &[f64]| -> Vec<f64> {
        let (q, p) = (&y[..n], &y[n..2 * n]);
        let (hp, hq) = h.grad(t, p, q);
        let hs = h.hess(t, p, q);
        let dz = riccati_rhs(&hs.qq, &hs.qp, &hs.pp, &unpack_z(y)).expect("Hessian blocks are symmetric");
        let mut out = hp;
        out.extend(hq.iter().map(|v| -v));
        out.extend(dz.iter().map(|c| c.re));
        out.extend(dz.iter().map(|c| c.im));
        out
    };
    let mut out = vec![(first.t, z0.clone())];
    let mut t = first.t;
    let mut step = ctl.h_init;
    for s in &traj.samples[1..] {
        while t < s.t {
            let adv = adaptive_step(&f, t, &y, step.min(s.t - t).max(ctl.h_min), s.t, ctl)?;
            t = adv.t;
            step = adv.h_next;
            y = adv.y;
        }
        let z = unpack_z(&y);
        let z = SiegelMatrix::new(&z).map_err(|e| match e {
            Error::NotPositiveDefinite { min_eigenvalue } => Error::GermDegenerate { t, min_eigenvalue },
            other => other,
        })?;
        if z.imag_min_eigenvalue() <= PD_TOL {
            return Err(Error::GermDegenerate { t, min_eigenvalue: z.imag_min_eigenvalue() });
        }
        out.push((s.t, z));
    }
    Ok(out)
}

/// The germ transported by the monodromy blocks: Z(t) = M(t) . Z0.
pub fn moebius_germs(traj: &Trajectory, z0: &SiegelMatrix) -> Result<Vec<(f64, SiegelMatrix)>> {
    traj.samples.iter().map(|s| Ok((s.t, moebius_act(&s.block, z0)?))).collect()
}

/// det(C Z + D) along the trajectory for a real Lagrangian graph p = Z q:
/// the Jacobian det(dq(t)/dq(0)) of the projected flow.
pub fn jacobian_determinants(traj: &Trajectory, z_graph: &RealLagrangian) -> Vec<(f64, f64)> {
    traj.samples
        .iter()
        .map(|s| {
            let m: RMat = s.block.c() * z_graph.matrix() + s.block.d();
            (s.t, m.determinant())
        })
        .collect()
}

/// 1 / sqrt det(dq(t)/dq(0)) at the end of the trajectory, on the branch
/// continuous from 1. A vanishing or sign-changing determinant is a focal
/// point and is reported as a caustic.
pub fn jacobian_amplitude(traj: &Trajectory, z_graph: &RealLagrangian) -> Result<Complex64> {
    let dets = jacobian_determinants(traj, z_graph);
    let d0 = dets[0].1;
    for w in dets.windows(2) {
        let (t, d) = w[1];
        if d.abs() < 1e-12 || d.signum() != d0.signum() {
            return Err(Error::Caustic { detail: format!("focal point near t = {t} (det = {d:e})") });
        }
    }
    let d = dets.last().unwrap().1 / d0;
    Ok(Complex64::new(d.sqrt().recip(), 0.0))
}
