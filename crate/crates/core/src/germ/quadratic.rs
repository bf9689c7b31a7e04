use std::f64::consts::PI;

use num_complex::Complex64;

use super::packet::{to_polynomial_form, GaussianPacket};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, to_complex, RMat};
use crate::symplectic::{branch_track_fn, cz_plus_d, RealLagrangian, SiegelMatrix, SymplecticBlock};

/// Largest change of the generator phase s*|K| between two coarse samples
/// handed to the branch refiner.
const COARSE_STEP: f64 = 0.25;

/// Exact evolution of a Gaussian packet under H = 1/2 q.a.q + q.b.p + 1/2 p.c.p.
///
/// Writing the exponent as 1/2 q.Z.q + l.q + k, the metaplectic operator of
/// the block M = exp(tK) maps Z to (AZ+B)(CZ+D)^{-1}, l to ((CZ+D)^T)^{-1} l,
/// adds -1/2 l.(CZ+D)^{-1}C.l to k and divides the amplitude by
/// sqrt det(CZ+D), continued along s -> exp(sK) for s in [0, t].
pub fn exact_quadratic_propagate(a: &RMat, b: &RMat, c: &RMat, pkt: &GaussianPacket, t: f64) -> Result<GaussianPacket> {
    let n = pkt.n();
    if a.nrows() != n {
        return Err(Error::Dimension { expected: n, got: a.nrows() });
    }
    let k = SymplecticBlock::quadratic_generator(a, b, c)?;
    let block = SymplecticBlock::exp_generator(&k, t)?;

    let pieces = ((max_abs(&k) * t.abs() * 2.0 * n as f64 / COARSE_STEP).ceil() as usize).max(1);
    let times: Vec<f64> = (0..=pieces).map(|i| t * i as f64 / pieces as f64).collect();
    let path = branch_track_fn(|s| SymplecticBlock::exp_generator(&k, s), &times, &pkt.z)?;
    let sqrt_det = path.sqrt_value();

    let zm = pkt.z.matrix();
    let den = cz_plus_d(&block, &zm);
    let den_inv = den.clone().try_inverse().ok_or_else(|| Error::Caustic { detail: "CZ+D is singular".into() })?;
    let z_new = SiegelMatrix::new(&((to_complex(&block.a()) * &zm + to_complex(&block.b())) * &den_inv))?;

    let (l, kappa) = to_polynomial_form(pkt);
    let l_new = den_inv.transpose() * &l;
    let extra = (l.transpose() * &den_inv * to_complex(&block.c()) * &l)[(0, 0)] * -0.5;
    let kappa_new = kappa + extra;

    let im_inv = z_new
        .imag()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: z_new.imag_min_eigenvalue() })?;
    let l_re = l_new.map(|x| x.re);
    let l_im = l_new.map(|x| x.im);
    let q0 = -(&im_inv * &l_im);
    let p0 = &l_re + z_new.real() * &q0;
    let q0c = to_complex(&q0);
    let p0c = to_complex(&p0);
    let rest = kappa_new - ((q0c.transpose() * z_new.matrix() * &q0c)[(0, 0)] * 0.5 - (p0c.transpose() * &q0c)[(0, 0)]);

    let c_new = pkt.c / sqrt_det * (-rest.im / pkt.hbar).exp();
    GaussianPacket::new(z_new, q0.as_slice().to_vec(), p0.as_slice().to_vec(), rest.re, c_new, pkt.hbar)
}

/// Amplitude factor e^{-i pi k/2} / sqrt|det dq(t)/dq(0)| picked up by a WKB
/// amplitude on the Lagrangian graph p = Z q transported along the blocks,
/// with k the Maslov index of the path.
pub fn transport_amplitude(traj_blocks: &[(f64, SymplecticBlock)], z_graph: &RealLagrangian, k: i64) -> Result<Complex64> {
    let (first, last) = match (traj_blocks.first(), traj_blocks.last()) {
        (Some(f), Some(l)) => (&f.1, &l.1),
        _ => return Err(Error::InvalidArgument("empty block path".into())),
    };
    let det_of = |m: &SymplecticBlock| (m.c() * z_graph.matrix() + m.d()).determinant();
    let d0 = det_of(first);
    let d = det_of(last);
    if d0.abs() < 1e-12 || (d / d0).abs() < 1e-12 {
        return Err(Error::Caustic { detail: format!("endpoint Jacobian {:e}", d / d0) });
    }
    Ok(Complex64::from_polar((d / d0).abs().sqrt().recip(), -PI * k as f64 / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_flow, HamiltonianSpec, StepControl};
    use crate::germ::propagate_packet;
    use crate::symplectic::{maslov_index, DEFAULT_EPS_SCHEDULE, HALF_PERIOD_INDEX};

    fn s(x: f64) -> RMat {
        RMat::from_element(1, 1, x)
    }

    fn packet(z: Complex64, q0: f64, p0: f64) -> GaussianPacket {
        GaussianPacket::new(SiegelMatrix::from_scalar(z).unwrap(), vec![q0], vec![p0], 0.3, Complex64::new(0.8, 0.1), 0.7)
            .unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let pkt = packet(Complex64::new(0.3, 1.2), 0.4, -0.6);
        let out = exact_quadratic_propagate(&s(1.3), &s(0.2), &s(0.9), &pkt, 0.0).unwrap();
        assert!(out.z.distance(&pkt.z) < 1e-14);
        assert!((out.q0[0] - 0.4).abs() < 1e-14 && (out.p0[0] + 0.6).abs() < 1e-14);
        assert!((out.s - 0.3).abs() < 1e-14);
        assert!((out.c - pkt.c).norm() < 1e-14);
    }

    #[test]
    fn agrees_with_flow_propagation() {
        let (a, b, c) = (s(1.3), s(0.4), s(0.9));
        let h = HamiltonianSpec::quadratic(a.clone(), b.clone(), c.clone()).unwrap();
        let pkt = packet(Complex64::new(0.3, 1.2), 0.4, -0.6);
        for t in [0.7, 2.5, 6.0] {
            let exact = exact_quadratic_propagate(&a, &b, &c, &pkt, t).unwrap();
            let flow = propagate_packet(&h, &pkt, 0.0, t, &StepControl::with_tol(1e-13)).unwrap();
            assert!(exact.z.distance(&flow.z) < 1e-10, "t={t}");
            assert!((exact.q0[0] - flow.q0[0]).abs() < 1e-10);
            assert!((exact.p0[0] - flow.p0[0]).abs() < 1e-10);
            assert!((exact.s - flow.s).abs() < 1e-10, "{} {}", exact.s, flow.s);
            assert!((exact.c - flow.c).norm() < 1e-10, "{} {}", exact.c, flow.c);
        }
    }

    #[test]
    fn harmonic_full_period() {
        let pkt = GaussianPacket::new(SiegelMatrix::i_identity(1), vec![0.0], vec![0.0], 0.0, Complex64::new(1.0, 0.0), 0.2)
            .unwrap();
        let out = exact_quadratic_propagate(&s(1.0), &s(0.0), &s(1.0), &pkt, 2.0 * PI).unwrap();
        assert!((out.c + 1.0).norm() < 1e-12);
        assert!(out.s.abs() < 1e-12);
    }

    #[test]
    fn transport_examples() {
        let one = transport_amplitude(&[(0.0, SymplecticBlock::identity(1))], &RealLagrangian::zero(1), 0).unwrap();
        assert_eq!(one, Complex64::new(1.0, 0.0));

        let h = HamiltonianSpec::free(1.0).unwrap();
        let tr = integrate_flow(&h, &[0.0], &[0.0], 0.0, 1.0, &StepControl::default()).unwrap();
        let zg = RealLagrangian::new(s(1.0)).unwrap();
        let f = transport_amplitude(&tr.block_path(), &zg, 0).unwrap();
        assert!((f - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-12);

        let h = HamiltonianSpec::harmonic(1.0, 1.0).unwrap();
        let tr = integrate_flow(&h, &[0.0], &[0.0], 0.0, PI, &StepControl::default()).unwrap();
        let z0 = RealLagrangian::zero(1);
        let k = maslov_index(&tr.block_path(), &z0, &DEFAULT_EPS_SCHEDULE).unwrap().k;
        assert_eq!(k, HALF_PERIOD_INDEX);
        let f = transport_amplitude(&tr.block_path(), &z0, k).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-9);
        assert!((f - Complex64::new(0.0, -1.0)).norm() < 1e-9);

        let quarter = integrate_flow(&h, &[0.0], &[0.0], 0.0, PI / 2.0, &StepControl::default()).unwrap();
        assert!(matches!(transport_amplitude(&quarter.block_path(), &z0, 1), Err(Error::Caustic { .. })));
    }
}
