use std::f64::consts::PI;

use complex_germ::dynamics::integrate_flow;
use complex_germ::linalg::RMat;
use complex_germ::symplectic::{branch_track, maslov_index, RealLagrangian};
use serde::Serialize;

use crate::config::MaslovConfig;
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

#[derive(Debug, Serialize)]
struct Reading {
    eps: f64,
    accumulated_over_pi: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    k: i64,
    k_mod4: i64,
    phase: [f64; 2],
    readings: Vec<Reading>,
}

pub fn run(cfg: &MaslovConfig, out: &OutDir) -> CliResult<()> {
    cfg.validate()?;
    // only the flow matters here; hbar enters polynomial Hamiltonians through their symbol
    let h = cfg.hamiltonian.classical(1.0)?;
    let ctl = cfg.integrator.control()?;
    let traj = integrate_flow(&h, &[cfg.start.q0], &[cfg.start.p0], cfg.time.t0, cfg.time.t1, &ctl)?;
    let path = traj.block_path();
    let z = RealLagrangian::new(RMat::from_element(1, 1, cfg.z_real)).map_err(|e| CliError::field("z_real", e))?;
    let index = maslov_index(&path, &z, &cfg.eps)?;

    let eps_min = cfg.eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let tracked = branch_track(&path, &z.with_epsilon(eps_min)?)?;
    let rows = (0..tracked.len()).map(|i| {
        let d = tracked.det_at(i);
        vec![tracked.samples()[i].0, tracked.arg_at(i) / PI, d.re, d.im]
    });
    out.write_csv("maslov.csv", &["t", "arg_over_pi", "re_det", "im_det"], rows)?;

    let phase = num_complex::Complex64::from_polar(1.0, -PI * index.k as f64 / 2.0);
    println!("k = {} (mod 4: {})", index.k, index.mod4());
    println!("phase exp(-i pi k / 2) = {:.6} {:+.6}i", phase.re, phase.im);
    println!("{:>10} {:>14}", "eps", "arg / pi");
    for (eps, v) in &index.readings {
        println!("{eps:>10.1e} {v:>14.6}");
    }
    let results = Results {
        k: index.k,
        k_mod4: index.mod4(),
        phase: [phase.re, phase.im],
        readings: index.readings.iter().map(|&(eps, v)| Reading { eps, accumulated_over_pi: v }).collect(),
    };
    out.write_summary("maslov", cfg, results)?;
    Ok(())
}
