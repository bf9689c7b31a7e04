use complex_germ::germ::{exact_quadratic_propagate, packet_to_grid, propagate_packet, GaussianPacket};
use complex_germ::dynamics::{HamiltonianSpec, StepControl};
use complex_germ::linalg::RMat;
use complex_germ::oracle::Grid1D;
use complex_germ::symplectic::SiegelMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn packet() -> impl Strategy<Value = GaussianPacket> {
    (-0.5..0.5f64, 0.5..2.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.2..1.0f64).prop_map(|(zr, zi, q, p, hbar)| {
        GaussianPacket::normalized(SiegelMatrix::from_scalar(Complex64::new(zr, zi)).unwrap(), vec![q], vec![p], hbar).unwrap()
    })
}

fn s1(x: f64) -> RMat {
    RMat::from_element(1, 1, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalized_packets_have_unit_norm(pkt in packet()) {
        prop_assert!((pkt.norm() - 1.0).abs() < 1e-12);
        let grid = Grid1D::centered(16.0, 1024).unwrap();
        let psi = packet_to_grid(&pkt, &grid).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_propagation_composes(
        pkt in packet(), a in 0.2..1.5f64, b in -0.5..0.5f64, c in 0.5..1.5f64,
        t1 in 0.0..2.0f64, t2 in 0.0..2.0f64,
    ) {
        let (a, b, c) = (s1(a), s1(b), s1(c));
        let once = exact_quadratic_propagate(&a, &b, &c, &pkt, t1 + t2).unwrap();
        let mid = exact_quadratic_propagate(&a, &b, &c, &pkt, t1).unwrap();
        let twice = exact_quadratic_propagate(&a, &b, &c, &mid, t2).unwrap();
        prop_assert!(once.z.distance(&twice.z) < 1e-9);
        prop_assert!((once.q0[0] - twice.q0[0]).abs() < 1e-9);
        prop_assert!((once.p0[0] - twice.p0[0]).abs() < 1e-9);
        let phase = |g: &GaussianPacket| g.c * Complex64::from_polar(1.0, g.s / g.hbar);
        prop_assert!((phase(&once) - phase(&twice)).norm() < 1e-8);
        prop_assert!((once.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flow_propagation_preserves_norm(pkt in packet(), t in 0.1..3.0f64) {
        let h = HamiltonianSpec::quartic(1.0, 1.0).unwrap();
        let out = propagate_packet(&h, &pkt, 0.0, t, &StepControl::default()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-7);
        prop_assert!(out.z.imag_min_eigenvalue() > 0.0);
    }
}
