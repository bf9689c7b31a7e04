use complex_germ::germ::{canonical_superpose, reconstruct_on_grid, CurvePoint, LagrangianCurve};
use complex_germ::oracle::l2_error;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::CanonicalConfig;
use crate::error::CliResult;
use crate::output::{parallel_map, OutDir};

#[derive(Debug, Serialize)]
struct HbarResult {
    hbar: f64,
    relative_l2_error: f64,
    error_over_sqrt_hbar: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    runs: Vec<HbarResult>,
    /// err / sqrt(hbar) at the largest hbar.
    fitted_c: f64,
    bound_holds: bool,
}

pub fn build_curve(cfg: &CanonicalConfig) -> CliResult<LagrangianCurve> {
    let c = &cfg.curve;
    let s = c.action_symbol()?;
    let ds = s.derivative(0, 1);
    let z = Complex64::new(c.z[0], c.z[1]);
    let curve = LagrangianCurve::from_fn(c.alpha[0], c.alpha[1], c.samples, c.curve_tol, |a| CurvePoint {
        q0: a,
        p0: ds.eval(&[a], &[0.0], 0.0).re,
        s: s.eval(&[a], &[0.0], 0.0).re,
        z,
        amp: Complex64::new((-(a - c.center).powi(2) / (2.0 * c.width * c.width)).exp(), 0.0),
    })?;
    match &cfg.flow {
        None => Ok(curve),
        Some(f) => {
            let h = f.hamiltonian.classical(1.0)?;
            Ok(curve.flow(&h, 0.0, f.t, &cfg.integrator.control()?, c.curve_tol)?)
        }
    }
}

pub fn run(cfg: &CanonicalConfig, out: &OutDir) -> CliResult<()> {
    cfg.validate()?;
    let curve = build_curve(cfg)?;
    let grid = cfg.grid.grid()?;
    let runs = parallel_map(&cfg.hbar, |&hbar| -> CliResult<_> {
        let sup = canonical_superpose(&curve, hbar, &grid)?;
        let rec = reconstruct_on_grid(&curve, hbar, &grid)?;
        let err = l2_error(&sup, &rec, false)? / rec.norm();
        Ok((sup, rec, HbarResult { hbar, relative_l2_error: err, error_over_sqrt_hbar: err / hbar.sqrt() }))
    });
    let mut results = Vec::new();
    println!("{:>10} {:>14} {:>14}", "hbar", "rel. error", "err/sqrt(h)");
    for (i, r) in runs.into_iter().enumerate() {
        let (sup, rec, res) = r?;
        let rows = grid
            .points()
            .into_iter()
            .zip(sup.values.iter().zip(&rec.values))
            .map(|(x, (a, b))| vec![x, a.re, a.im, b.re, b.im]);
        out.write_csv(&format!("canonical_{i}.csv"), &["x", "re_superposition", "im_superposition", "re_reconstruction", "im_reconstruction"], rows)?;
        println!("{:>10} {:>14.6e} {:>14.6}", res.hbar, res.relative_l2_error, res.error_over_sqrt_hbar);
        results.push(res);
    }
    let largest = results.iter().max_by(|a, b| a.hbar.total_cmp(&b.hbar)).unwrap();
    let fitted_c = largest.error_over_sqrt_hbar;
    let bound_holds = results.iter().all(|r| r.relative_l2_error <= fitted_c * r.hbar.sqrt() * (1.0 + 1e-9));
    out.write_summary("canonical", cfg, Results { runs: results, fitted_c, bound_holds })?;
    Ok(())
}
