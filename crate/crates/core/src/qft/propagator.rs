use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_with_breaks, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagatorKind {
    /// Principal value of 1/(w^2 - m^2).
    PrincipalValue,
    /// 1/(w^2 - m^2 + i eps), eps -> 0+.
    Feynman,
}

/// Kernel D(t) = int dw/(2 pi) exp(-i w t) Dtilde(w) of the one-mode theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator0p1 {
    m: f64,
    kind: PropagatorKind,
}

impl Propagator0p1 {
    pub fn new(m: f64, kind: PropagatorKind) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        Ok(Self { m, kind })
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn kind(&self) -> PropagatorKind {
        self.kind
    }

    /// Closed form: -sin(m|t|)/(2m) for the principal value and
    /// -(i/2m) exp(-im|t|) for the Feynman prescription.
    pub fn eval(&self, t: f64) -> Complex64 {
        let m = self.m;
        match self.kind {
            PropagatorKind::PrincipalValue => Complex64::new(-(m * t.abs()).sin() / (2.0 * m), 0.0),
            PropagatorKind::Feynman => Complex64::new(0.0, -1.0 / (2.0 * m)) * Complex64::from_polar(1.0, -m * t.abs()),
        }
    }
}

/// The two tails of int_{2m}^inf cos(wt)/(w^2 - m^2 + i eps) dw, each moved
/// onto a vertical contour where the exponential decays; no pole lies
/// between the real axis and the contour.
fn tail(m: f64, t: f64, eps: f64, opts: QuadOptions) -> Result<Complex64> {
    let t = t.abs();
    let den = |w: Complex64| w * w - m * m + Complex64::new(0.0, eps);
    let map = |s: f64| (s / (1.0 - s), 1.0 / ((1.0 - s) * (1.0 - s)));
    let down = integrate(
        |s| {
            let (y, jac) = map(s);
            let w = Complex64::new(2.0 * m, -y);
            (-Complex64::i() * w * t).exp() / den(w) * Complex64::new(0.0, -jac)
        },
        0.0,
        1.0,
        opts,
    )?;
    let up = integrate(
        |s| {
            let (y, jac) = map(s);
            let w = Complex64::new(2.0 * m, y);
            (Complex64::i() * w * t).exp() / den(w) * Complex64::new(0.0, jac)
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(0.5 * (down + up))
}

/// Principal-value kernel by quadrature: the pole at w = m is removed by
/// subtracting the residue term on the symmetric interval [0, 2m].
pub fn pv_kernel_numeric(m: f64, t: f64, opts: QuadOptions) -> Result<f64> {
    let f = |w: f64| (w * t).cos() / (w + m);
    let fm = f(m);
    let df = |w: f64| (-t * (w * t).sin() * (w + m) - (w * t).cos()) / ((w + m) * (w + m));
    let core = integrate_with_breaks(
        |w| {
            let d = w - m;
            let v = if d.abs() < 1e-7 * m { df(m) } else { (f(w) - fm) / d };
            Complex64::new(v, 0.0)
        },
        0.0,
        2.0 * m,
        &[m],
        opts,
    )?;
    let total = core + tail(m, t, 0.0, opts)?;
    Ok(total.re / PI)
}

/// Kernel of 1/(w^2 - m^2 + i eps) at finite eps by direct quadrature.
pub fn feynman_kernel_numeric(m: f64, t: f64, eps: f64, opts: QuadOptions) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let width = eps / (2.0 * m);
    let breaks = [m - 10.0 * width, m - width, m, m + width, m + 10.0 * width];
    let core = integrate_with_breaks(
        |w| Complex64::new((w * t).cos(), 0.0) / Complex64::new(w * w - m * m, eps),
        0.0,
        2.0 * m,
        &breaks,
        opts,
    )?;
    Ok((core + tail(m, t, eps, opts)?) / PI)
}

/// Feynman kernel as eps -> 0+, by Richardson extrapolation over
/// eps = eps0, eps0/2, ..., eps0/2^(levels-1).
pub fn feynman_kernel_extrapolated(m: f64, t: f64, eps0: f64, levels: usize, opts: QuadOptions) -> Result<Complex64> {
    if levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let mut table: Vec<Complex64> = (0..levels)
        .map(|k| feynman_kernel_numeric(m, t, eps0 / 2f64.powi(k as i32), opts))
        .collect::<Result<_>>()?;
    for j in 1..levels {
        let f = 2f64.powi(j as i32);
        for k in (j..levels).rev() {
            table[k] = (f * table[k] - table[k - 1]) / (f - 1.0);
        }
    }
    Ok(table[levels - 1])
}
