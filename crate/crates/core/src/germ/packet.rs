use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{integrate_flow, HamiltonianSpec, StepControl};
use crate::error::{Error, Result};
use crate::linalg::{to_complex, CMat};
use crate::oracle::{Grid1D, WavefunctionGrid};
use crate::symplectic::{branch_track, moebius_act, SiegelMatrix};

/// Number of standard deviations of |psi|^2 that a grid must cover.
pub const COVERAGE_SIGMAS: f64 = 8.0;

/// psi(q) = c exp((i/hbar)(1/2 (q-q0).Z.(q-q0) + p0.(q-q0) + S)).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPacket {
    pub z: SiegelMatrix,
    pub q0: Vec<f64>,
    pub p0: Vec<f64>,
    pub s: f64,
    pub c: Complex64,
    pub hbar: f64,
}

impl GaussianPacket {
    pub fn new(z: SiegelMatrix, q0: Vec<f64>, p0: Vec<f64>, s: f64, c: Complex64, hbar: f64) -> Result<Self> {
        let n = z.n();
        if q0.len() != n || p0.len() != n {
            return Err(Error::Dimension { expected: n, got: q0.len().max(p0.len()) });
        }
        if c.norm() == 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument("packet amplitude must be non-zero".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { z, q0, p0, s, c, hbar })
    }

    /// Packet with unit L2 norm and S = 0.
    pub fn normalized(z: SiegelMatrix, q0: Vec<f64>, p0: Vec<f64>, hbar: f64) -> Result<Self> {
        let n = z.n() as i32;
        let c = (z.imag().determinant() / (PI * hbar).powi(n)).powf(0.25);
        Self::new(z, q0, p0, 0.0, Complex64::new(c, 0.0), hbar)
    }

    pub fn n(&self) -> usize {
        self.z.n()
    }

    pub fn eval(&self, q: &[f64]) -> Complex64 {
        let n = self.n();
        let d: Vec<f64> = (0..n).map(|i| q[i] - self.q0[i]).collect();
        let mut quad = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                quad += self.z.get(i, j) * d[i] * d[j];
            }
        }
        let lin: f64 = (0..n).map(|i| self.p0[i] * d[i]).sum();
        self.c * (Complex64::i() / self.hbar * (0.5 * quad + lin + self.s)).exp()
    }

    /// Analytic L2 norm.
    pub fn norm(&self) -> f64 {
        let n = self.n() as i32;
        self.c.norm() * ((PI * self.hbar).powi(n) / self.z.imag().determinant()).powf(0.25)
    }
}

/// Sample a one-dimensional packet on a grid. The grid must cover
/// `COVERAGE_SIGMAS` standard deviations of |psi|^2 in position and the
/// corresponding range in momentum.
pub fn packet_to_grid(pkt: &GaussianPacket, grid: &Grid1D) -> Result<WavefunctionGrid> {
    if pkt.n() != 1 {
        return Err(Error::InvalidArgument("grid sampling needs a one-dimensional packet".into()));
    }
    let z = pkt.z.get(0, 0);
    let sigma = (pkt.hbar / (2.0 * z.im)).sqrt();
    let (q0, p0) = (pkt.q0[0], pkt.p0[0]);
    if q0 - COVERAGE_SIGMAS * sigma < grid.x_min() || q0 + COVERAGE_SIGMAS * sigma > grid.x(grid.len() - 1) {
        return Err(Error::Coverage(format!(
            "position range [{:.4}, {:.4}] not inside the grid",
            q0 - COVERAGE_SIGMAS * sigma,
            q0 + COVERAGE_SIGMAS * sigma
        )));
    }
    let sigma_p = (pkt.hbar * z.norm_sqr() / (2.0 * z.im)).sqrt();
    let p_nyquist = PI * pkt.hbar / grid.dx();
    if p0.abs() + COVERAGE_SIGMAS * sigma_p > p_nyquist {
        return Err(Error::Coverage(format!(
            "momentum range |p| <= {:.4} exceeds the grid limit {p_nyquist:.4}",
            p0.abs() + COVERAGE_SIGMAS * sigma_p
        )));
    }
    WavefunctionGrid::from_fn(*grid, pkt.hbar, |x| pkt.eval(&[x]))
}

/// A propagated packet at one sample time together with the tracked phase of
/// sqrt det(C Z0 + D).
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSample {
    pub t: f64,
    pub packet: GaussianPacket,
    /// Continuous argument of sqrt det(C Z0 + D), i.e. half the accumulated argument.
    pub maslov_phase: f64,
}

/// Propagate a packet along the classical flow, recording every integrator sample.
///
/// The centre follows Hamilton's equations, S the action, Z the linearised
/// flow acting on the initial germ, and the amplitude is divided by the
/// continuous branch of sqrt det(C Z0 + D).
pub fn propagate_packet_track(
    h: &HamiltonianSpec,
    pkt: &GaussianPacket,
    t0: f64,
    t1: f64,
    ctl: &StepControl,
) -> Result<Vec<PacketSample>> {
    if h.n() != pkt.n() {
        return Err(Error::Dimension { expected: h.n(), got: pkt.n() });
    }
    let traj = integrate_flow(h, &pkt.q0, &pkt.p0, t0, t1, ctl)?;
    let path = branch_track(&traj.block_path(), &pkt.z)?;
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let packet = GaussianPacket {
                z: moebius_act(&s.block, &pkt.z)?,
                q0: s.q.clone(),
                p0: s.p.clone(),
                s: pkt.s + s.s,
                c: pkt.c / path.sqrt_at(i),
                hbar: pkt.hbar,
            };
            Ok(PacketSample { t: s.t, packet, maslov_phase: path.arg_at(i) / 2.0 })
        })
        .collect()
}

pub fn propagate_packet(
    h: &HamiltonianSpec,
    pkt: &GaussianPacket,
    t0: f64,
    t1: f64,
    ctl: &StepControl,
) -> Result<GaussianPacket> {
    Ok(propagate_packet_track(h, pkt, t0, t1, ctl)?.pop().unwrap().packet)
}

/// Complex linear coefficient l = p0 - Z q0 and constant
/// 1/2 q0.Z.q0 - p0.q0 + S of the exponent written as 1/2 q.Z.q + l.q + const.
pub(crate) fn to_polynomial_form(pkt: &GaussianPacket) -> (CMat, Complex64) {
    let n = pkt.n();
    let z = pkt.z.matrix();
    let q0 = to_complex(&crate::linalg::RMat::from_column_slice(n, 1, &pkt.q0));
    let p0 = to_complex(&crate::linalg::RMat::from_column_slice(n, 1, &pkt.p0));
    let l = &p0 - &z * &q0;
    let k = (q0.transpose() * &z * &q0)[(0, 0)] * 0.5 - (p0.transpose() * &q0)[(0, 0)] + pkt.s;
    (l, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fourier_h, l2_error};

    #[test]
    fn unit_norm_on_grid() {
        let pkt = GaussianPacket::normalized(SiegelMatrix::i_identity(1), vec![0.0], vec![0.0], 1.0).unwrap();
        assert!((pkt.c.re - PI.powf(-0.25)).abs() < 1e-15);
        let g = Grid1D::centered(12.0, 256).unwrap();
        let psi = packet_to_grid(&pkt, &g).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        assert!((pkt.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn translation_and_boost() {
        let g = Grid1D::centered(12.0, 256).unwrap();
        let z = SiegelMatrix::from_scalar(Complex64::new(0.4, 1.5)).unwrap();
        let base = GaussianPacket::normalized(z.clone(), vec![0.0], vec![0.0], 0.5).unwrap();
        let shifted = GaussianPacket { q0: vec![1.5], ..base.clone() };
        for x in [-1.0, 0.3, 2.0] {
            assert!((shifted.eval(&[x + 1.5]) - base.eval(&[x])).norm() < 1e-14);
        }
        let boosted = GaussianPacket { p0: vec![2.0], ..base.clone() };
        let phi = fourier_h(&packet_to_grid(&boosted, &g).unwrap()).unwrap();
        let norm: f64 = phi.values.iter().map(|v| v.norm_sqr()).sum();
        let mean: f64 = phi.values.iter().enumerate().map(|(k, v)| phi.grid.x(k) * v.norm_sqr()).sum::<f64>() / norm;
        assert!((mean - 2.0).abs() < 1e-10);
    }

    #[test]
    fn coverage_errors() {
        let pkt = GaussianPacket::normalized(SiegelMatrix::i_identity(1), vec![9.0], vec![0.0], 1.0).unwrap();
        assert!(matches!(packet_to_grid(&pkt, &Grid1D::centered(10.0, 256).unwrap()), Err(Error::Coverage(_))));
        let fast = GaussianPacket { q0: vec![0.0], p0: vec![30.0], ..pkt };
        assert!(matches!(packet_to_grid(&fast, &Grid1D::centered(10.0, 128).unwrap()), Err(Error::Coverage(_))));
    }

    #[test]
    fn harmonic_full_period_phase() {
        let h = HamiltonianSpec::harmonic(1.0, 1.0).unwrap();
        let pkt = GaussianPacket::new(SiegelMatrix::i_identity(1), vec![0.0], vec![0.0], 0.0, Complex64::new(1.0, 0.0), 0.3)
            .unwrap();
        let out = propagate_packet(&h, &pkt, 0.0, 2.0 * PI, &StepControl::default()).unwrap();
        assert!((out.c + Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(out.s.abs() < 1e-9);
        assert!(out.z.distance(&pkt.z) < 1e-9);
    }

    #[test]
    fn free_particle_example() {
        let h = HamiltonianSpec::free(1.0).unwrap();
        let pkt = GaussianPacket::new(SiegelMatrix::i_identity(1), vec![0.0], vec![0.0], 0.0, Complex64::new(1.0, 0.0), 1.0)
            .unwrap();
        let out = propagate_packet(&h, &pkt, 0.0, 1.0, &StepControl::default()).unwrap();
        assert!((out.z.get(0, 0) - Complex64::new(0.5, 0.5)).norm() < 1e-12);
        assert!((out.c - Complex64::new(1.0, 1.0).sqrt().inv()).norm() < 1e-12);
        let same = propagate_packet(&h, &pkt, 0.0, 0.0, &StepControl::default()).unwrap();
        assert_eq!(same, pkt);
        let g = Grid1D::centered(14.0, 256).unwrap();
        assert!(l2_error(&packet_to_grid(&same, &g).unwrap(), &packet_to_grid(&pkt, &g).unwrap(), false).unwrap() == 0.0);
    }
}
