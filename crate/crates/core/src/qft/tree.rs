use num_complex::Complex64;

use super::laurent::Laurent;
use super::mode::{mode_commutator, weyl_field_power, ModePolynomial, FIRST_PHASE_VAR, HBAR_VAR};
use crate::error::{Error, Result};
use crate::moyal::coeff;
use crate::quad::{integrate, integrate_real, QuadOptions};

/// Both sides of the tree-level comparison for the observable u(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeCheck {
    pub quantum: f64,
    pub classical: f64,
    pub difference: f64,
}

/// Free classical solution with u(0) = u0, u'(0) = v0.
fn free(m: f64, u0: f64, v0: f64, s: f64) -> f64 {
    u0 * (m * s).cos() + v0 / m * (m * s).sin()
}

/// The hbar^0 part of (i/hbar)^k [H(s_k), [..., [H(s_1), u(t)]]] with
/// H(s) = u(s)^4/4! (the coupling g factored out). Phase variables are
/// z_t, z_1, ..., z_k.
pub fn tree_commutator(order: usize) -> Result<ModePolynomial> {
    let nph = order + 1;
    let nv = FIRST_PHASE_VAR + nph;
    let mut x = ModePolynomial::field(nph, 0)?;
    let i_over_hbar = Laurent::var(nv, HBAR_VAR, -1).scale(&coeff::c_i());
    let inv24 = Laurent::constant(nv, coeff::real(coeff::rat(1, 24)));
    for j in 1..=order {
        let h = weyl_field_power(nph, j, 4)?.scale(&inv24);
        x = mode_commutator(&h, &x)?.scale(&i_over_hbar);
    }
    Ok(x.hbar_part(0))
}

/// Compare the g^order term of the Heisenberg-picture series for u(t) in
/// H = p^2/2 + m^2 u^2/2 + g u^4/4!, restricted to hbar^0 (the tree
/// diagrams), with the same-order term of the Picard iteration of
/// u'' + m^2 u = -g u^3/3!.
pub fn tree_series_vs_classical(order: usize, m: f64, g: f64, u0: f64, v0: f64, t: f64, opts: QuadOptions) -> Result<TreeCheck> {
    if order > 2 {
        return Err(Error::InvalidArgument(format!("order {order} above 2")));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    let quantum = quantum_tree(order, m, u0, v0, t, opts)? * g.powi(order as i32);
    let classical = picard_coefficient(order, m, u0, v0, t, opts)? * g.powi(order as i32);
    Ok(TreeCheck { quantum, classical, difference: (quantum - classical).abs() })
}

fn quantum_tree(order: usize, m: f64, u0: f64, v0: f64, t: f64, opts: QuadOptions) -> Result<f64> {
    // u(s) = u- exp(-ims) + u+ exp(ims)
    let u_minus = Complex64::new(u0 / 2.0, v0 / (2.0 * m));
    let u_plus = u_minus.conj();
    let poly = tree_commutator(order)?.compile();
    let phase = |s: f64| Complex64::from_polar(1.0, m * s);
    let mut vars = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0 / (2.0 * m), 0.0), phase(t)];
    let value = match order {
        0 => poly.eval(&vars, u_plus, u_minus),
        1 => {
            vars.push(Complex64::new(0.0, 0.0));
            integrate(
                |s1| {
                    let mut v = vars.clone();
                    v[3] = phase(s1);
                    poly.eval(&v, u_plus, u_minus)
                },
                0.0,
                t,
                opts,
            )?
        }
        _ => {
            vars.extend([Complex64::new(0.0, 0.0); 2]);
            let mut inner_err = None;
            let outer = integrate(
                |s1| {
                    let mut v = vars.clone();
                    v[3] = phase(s1);
                    let r = integrate(
                        |s2| {
                            let mut w = v.clone();
                            w[4] = phase(s2);
                            poly.eval(&w, u_plus, u_minus)
                        },
                        0.0,
                        s1,
                        opts,
                    );
                    r.unwrap_or_else(|e| {
                        inner_err.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    })
                },
                0.0,
                t,
                opts,
            )?;
            if let Some(e) = inner_err {
                return Err(e);
            }
            outer
        }
    };
    Ok(value.re)
}

/// g^order coefficient of the solution of the integral equation
/// u(t) = u_free(t) - (1/3!) int_0^t sin(m(t-s))/m u(s)^3 ds.
fn picard_coefficient(order: usize, m: f64, u0: f64, v0: f64, t: f64, opts: QuadOptions) -> Result<f64> {
    let kernel = |tau: f64| (m * tau).sin() / m;
    let c0 = |s: f64| free(m, u0, v0, s);
    let c1 = |tt: f64| -> Result<f64> { integrate_real(|s| -kernel(tt - s) * c0(s).powi(3) / 6.0, 0.0, tt, opts) };
    match order {
        0 => Ok(c0(t)),
        1 => c1(t),
        _ => {
            let mut err = None;
            let v = integrate_real(
                |s| {
                    let inner = c1(s).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    });
                    -kernel(t - s) * 3.0 * c0(s).powi(2) * inner / 6.0
                },
                0.0,
                t,
                opts,
            )?;
            match err {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_is_free_solution() {
        let c = tree_series_vs_classical(0, 1.0, 0.5, 0.3, -0.4, 1.2, QuadOptions::default()).unwrap();
        assert!((c.quantum - free(1.0, 0.3, -0.4, 1.2)).abs() < 1e-14);
        assert!(c.difference < 1e-14);
    }

    #[test]
    fn first_order_agrees() {
        let c = tree_series_vs_classical(1, 1.0, 1.0, 0.8, 0.2, 1.5, QuadOptions::default()).unwrap();
        assert!(c.difference < 1e-9, "{c:?}");
        assert!(c.quantum.abs() > 1e-3);
    }

    #[test]
    fn loop_terms_are_dropped() {
        // the full first-order commutator has no hbar corrections; at second
        // order the hbar^2 part is the one-loop correction
        let nph = 3;
        let nv = FIRST_PHASE_VAR + nph;
        let i_over_hbar = Laurent::var(nv, HBAR_VAR, -1).scale(&coeff::c_i());
        let inv24 = Laurent::constant(nv, coeff::real(coeff::rat(1, 24)));
        let mut x = ModePolynomial::field(nph, 0).unwrap();
        for j in 1..=2 {
            let h = weyl_field_power(nph, j, 4).unwrap().scale(&inv24);
            x = mode_commutator(&h, &x).unwrap().scale(&i_over_hbar);
        }
        assert!(!x.hbar_part(2).is_zero());
        assert!(x.hbar_part(-1).is_zero() && x.hbar_part(-2).is_zero());
        assert_eq!(x.hbar_part(0), tree_commutator(2).unwrap());
    }
}
