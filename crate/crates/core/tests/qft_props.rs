use complex_germ::qft::{
    enumerate_diagrams, green_function, green_function_symbolic, mode_star, wick_sum_symbolic, ModePolynomial,
    Propagator0p1, PropagatorKind,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn mode_poly() -> impl Strategy<Value = ModePolynomial> {
    prop::collection::vec((0u32..3, 0u32..3), 1..4).prop_map(|ts| {
        ts.into_iter()
            .map(|(a, b)| ModePolynomial::monomial(1, a, b))
            .fold(ModePolynomial::zero(1), |acc, m| acc.try_add(&m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mode_star_is_associative(f in mode_poly(), g in mode_poly(), h in mode_poly()) {
        let l = mode_star(&mode_star(&f, &g).unwrap(), &h).unwrap();
        let r = mode_star(&f, &mode_star(&g, &h).unwrap()).unwrap();
        prop_assert!(l.try_sub(&r).unwrap().is_zero());
    }

    #[test]
    fn time_ordered_products_are_symmetric(times in prop::collection::vec(-2.0..2.0f64, 4), m in 0.5..2.0f64, hbar in 0.1..1.0f64) {
        let g = green_function(&times, m, hbar).unwrap();
        let mut rev = times.clone();
        rev.reverse();
        let h = green_function(&rev, m, hbar).unwrap();
        prop_assert!((g - h).norm() < 1e-12 * (1.0 + g.norm()));
    }

    #[test]
    fn four_point_function_is_wick_sum(times in prop::collection::vec(-2.0..2.0f64, 4)) {
        prop_assert_eq!(green_function_symbolic(&times).unwrap(), wick_sum_symbolic(&times).unwrap());
    }

    #[test]
    fn propagators_are_even(t in 0.0..5.0f64, m in 0.3..3.0f64) {
        for kind in [PropagatorKind::PrincipalValue, PropagatorKind::Feynman] {
            let d = Propagator0p1::new(m, kind).unwrap();
            prop_assert!((d.eval(t) - d.eval(-t)).norm() < 1e-15);
        }
        let dc = Propagator0p1::new(m, PropagatorKind::Feynman).unwrap().eval(t);
        let dpv = Propagator0p1::new(m, PropagatorKind::PrincipalValue).unwrap().eval(t);
        prop_assert!((dc.re - dpv.re).abs() < 1e-15);
        prop_assert!((dc.im + (m * t).cos() / (2.0 * m)).abs() < 1e-15);
        prop_assert!(dc != Complex64::new(0.0, 0.0));
    }
}

#[test]
fn edge_counts_follow_valence() {
    for n in 0..=3usize {
        for l in [0usize, 2, 4].into_iter().filter(|l| *l <= 4 * n) {
            for (d, m) in enumerate_diagrams(n, l).unwrap() {
                let e = d.internal_edges().len();
                assert_eq!(2 * e + l, 4 * n, "{d:?}");
                assert_eq!(d.hbar_power(), e as i32 - n as i32);
                assert_eq!(d.loops() + n, e + d.components());
                assert!(m >= 1);
            }
        }
    }
}
