use std::cell::RefCell;

use num_complex::Complex64;

use super::diagram::Diagram;
use super::propagator::{Propagator0p1, PropagatorKind};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, QuadOptions};

/// What an external leg at vertex time s contributes.
#[derive(Debug, Clone, PartialEq)]
pub enum LegFactor {
    /// The free classical solution with u(0) = u0, u'(0) = v0, evaluated at s.
    Classical { u0: f64, v0: f64 },
    /// A propagator i hbar D(t_i - s) to the external time of each leg.
    Propagator { times: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramValue {
    pub value: Complex64,
    /// Power of hbar in `value`.
    pub hbar_power: i32,
}

/// Value of one term of the g^N coefficient of the ordered exponential:
/// g^N / M times (i hbar)^-1 per vertex, i hbar D(s_i - s_j) per internal
/// edge and the leg factors, integrated over every vertex time in `window`.
pub fn evaluate_diagram(
    d: &Diagram,
    legs: &LegFactor,
    m: f64,
    hbar: f64,
    g: f64,
    window: (f64, f64),
    kind: PropagatorKind,
    opts: QuadOptions,
) -> Result<DiagramValue> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let prop = Propagator0p1::new(m, kind)?;
    let ih = Complex64::new(0.0, hbar);
    let mut hbar_power = d.hbar_power();
    if let LegFactor::Propagator { times } = legs {
        if times.len() != d.legs().len() {
            return Err(Error::Dimension { expected: d.legs().len(), got: times.len() });
        }
        hbar_power += times.len() as i32;
    }
    let leg_value = |leg: usize, s: f64| -> Complex64 {
        match legs {
            LegFactor::Classical { u0, v0 } => Complex64::new(u0 * (m * s).cos() + v0 / m * (m * s).sin(), 0.0),
            LegFactor::Propagator { times } => ih * prop.eval(times[leg] - s),
        }
    };
    let integrand = |s: &[f64]| -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for &(a, b) in d.internal_edges() {
            v *= ih * prop.eval(s[a] - s[b]);
        }
        for (leg, &vtx) in d.legs().iter().enumerate() {
            v *= leg_value(leg, s[vtx]);
        }
        v
    };
    let mut ext_breaks = vec![];
    if let LegFactor::Propagator { times } = legs {
        ext_breaks.extend(times.iter().cloned());
    }
    let failure = RefCell::new(None::<Error>);
    let n = d.vertices();
    let integral = if n == 0 {
        integrand(&[])
    } else {
        nested(n, &mut Vec::with_capacity(n), &integrand, window, &ext_breaks, opts, &failure)
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let value = integral * Complex64::new(g, 0.0).powi(n as i32) / ih.powi(n as i32) / d.symmetry_factor() as f64;
    Ok(DiagramValue { value, hbar_power })
}

fn nested<F: Fn(&[f64]) -> Complex64>(
    n: usize,
    s: &mut Vec<f64>,
    f: &F,
    window: (f64, f64),
    ext: &[f64],
    opts: QuadOptions,
    failure: &RefCell<Option<Error>>,
) -> Complex64 {
    if s.len() == n {
        return f(s);
    }
    let mut breaks: Vec<f64> = s.clone();
    breaks.extend_from_slice(ext);
    let depth = s.len();
    let result = integrate_with_breaks(
        |t| {
            if failure.borrow().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            s.truncate(depth);
            s.push(t);
            let v = nested(n, s, f, window, ext, opts, failure);
            s.truncate(depth);
            v
        },
        window.0,
        window.1,
        &breaks,
        opts,
    );
    match result {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadOptions {
        QuadOptions::with_tol(1e-11, 1e-9)
    }

    #[test]
    fn bare_vertex_is_single_integral() {
        let d = Diagram::new(1, vec![], vec![0, 0, 0, 0]).unwrap();
        let legs = LegFactor::Classical { u0: 1.0, v0: 0.0 };
        let v = evaluate_diagram(&d, &legs, 1.0, 0.5, 1.0, (0.0, 1.0), PropagatorKind::PrincipalValue, opts()).unwrap();
        // int_0^1 cos^4 = 3/8 + sin 2/4 + sin 4/32
        let exact = 3.0 / 8.0 + 2f64.sin() / 4.0 + 4f64.sin() / 32.0;
        assert!((v.value - Complex64::new(0.0, -exact / 0.5)).norm() < 1e-10);
        assert_eq!(v.hbar_power, -1);
    }

    #[test]
    fn tadpole_follows_kernel_at_zero() {
        let d = Diagram::new(1, vec![(0, 0)], vec![0, 0]).unwrap();
        let legs = LegFactor::Classical { u0: 1.0, v0: 0.0 };
        let pv = evaluate_diagram(&d, &legs, 1.0, 1.0, 1.0, (0.0, 1.0), PropagatorKind::PrincipalValue, opts()).unwrap();
        assert_eq!(pv.value, Complex64::new(0.0, 0.0));
        let f = evaluate_diagram(&d, &legs, 2.0, 1.0, 1.0, (0.0, 1.0), PropagatorKind::Feynman, opts()).unwrap();
        // (i hbar)^-1 * i hbar D_c(0) / 2 * int cos^2(2s) ds
        let int_cos2 = 0.5 + 4f64.sin() / 8.0;
        let exact = Complex64::new(0.0, -1.0 / 4.0) / 2.0 * int_cos2;
        assert!((f.value - exact).norm() < 1e-10, "{} vs {exact}", f.value);
    }

    #[test]
    fn fish_is_finite_and_scales_with_hbar() {
        let d = Diagram::new(2, vec![(0, 1), (0, 1)], vec![0, 0, 1, 1]).unwrap();
        let legs = LegFactor::Propagator { times: vec![0.2, 0.2, 0.2, 0.2] };
        let a = evaluate_diagram(&d, &legs, 1.0, 1.0, 1.0, (0.0, 1.0), PropagatorKind::Feynman, opts()).unwrap();
        let b = evaluate_diagram(&d, &legs, 1.0, 0.5, 1.0, (0.0, 1.0), PropagatorKind::Feynman, opts()).unwrap();
        assert!(a.value.is_finite());
        assert_eq!(a.hbar_power, 4);
        assert!((b.value * 2f64.powi(4) - a.value).norm() < 1e-9 * a.value.norm());
    }
}
