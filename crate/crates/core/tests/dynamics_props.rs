use complex_germ::dynamics::{integrate_flow, moebius_germs, riccati_integrate, HamiltonianSpec, StepControl};
use complex_germ::symplectic::{is_symplectic, SiegelMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn hamiltonian() -> impl Strategy<Value = HamiltonianSpec> {
    prop_oneof![
        (0.5..2.0f64, 0.5..2.0f64).prop_map(|(m, w)| HamiltonianSpec::harmonic(m, w).unwrap()),
        (0.5..2.0f64, 0.2..1.5f64).prop_map(|(m, l)| HamiltonianSpec::quartic(m, l).unwrap()),
        (0.5..2.0f64, 0.5..1.5f64).prop_map(|(m, w)| HamiltonianSpec::pendulum(m, w).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_conserved(h in hamiltonian(), q in -1.5..1.5f64, p in -1.5..1.5f64, t in 0.1..4.0f64) {
        let traj = integrate_flow(&h, &[q], &[p], 0.0, t, &StepControl::default()).unwrap();
        let e0 = h.eval(0.0, &[p], &[q]);
        let end = traj.last();
        prop_assert!((h.eval(t, &end.p, &end.q) - e0).abs() < 1e-8 * (1.0 + e0.abs()));
        prop_assert!(is_symplectic(&end.block, 1e-8));
    }

    #[test]
    fn momentum_reversal_retraces_the_path(h in hamiltonian(), q in -1.0..1.0f64, p in -1.0..1.0f64, t in 0.1..3.0f64) {
        // all sample Hamiltonians are even in p
        let ctl = StepControl::default();
        let fwd = integrate_flow(&h, &[q], &[p], 0.0, t, &ctl).unwrap();
        let end = fwd.last();
        let back = integrate_flow(&h, &end.q, &[-end.p[0]], 0.0, t, &ctl).unwrap();
        prop_assert!((back.last().q[0] - q).abs() < 1e-8);
        prop_assert!((back.last().p[0] + p).abs() < 1e-8);
        prop_assert!((fwd.last().s - back.last().s).abs() < 1e-8);
    }

    #[test]
    fn riccati_matches_moebius(
        h in hamiltonian(), q in -1.0..1.0f64, p in -1.0..1.0f64,
        zr in -1.0..1.0f64, zi in 0.3..2.0f64, t in 0.1..3.0f64,
    ) {
        let ctl = StepControl::default();
        let traj = integrate_flow(&h, &[q], &[p], 0.0, t, &ctl).unwrap();
        let z0 = SiegelMatrix::from_scalar(Complex64::new(zr, zi)).unwrap();
        let ric = riccati_integrate(&traj, &h, &z0, &ctl).unwrap();
        let moe = moebius_germs(&traj, &z0).unwrap();
        for ((_, a), (_, b)) in ric.iter().zip(&moe) {
            prop_assert!(a.distance(b) < 1e-6);
            prop_assert!(a.imag_min_eigenvalue() > 0.0);
        }
    }
}
