use complex_germ::germ::{packet_to_grid, propagate_packet_track, PacketSample};
use complex_germ::oracle::{evolve_schrodinger, l2_error};
use serde::Serialize;

use crate::config::PropagateConfig;
use crate::error::{CliError, CliResult};
use crate::output::{parallel_map, OutDir};

pub const TRAJECTORY_COLUMNS: [&str; 9] = ["t", "q0", "p0", "re_z", "im_z", "s", "re_amp", "im_amp", "maslov_phase"];

#[derive(Debug, Serialize)]
pub struct HbarResult {
    pub hbar: f64,
    pub l2_error: f64,
    pub oracle_error_estimate: f64,
    pub oracle_steps: usize,
    pub samples: usize,
    pub final_maslov_phase: f64,
}

/// Everything computed for one hbar; files are written afterwards in order.
pub struct Run {
    pub result: HbarResult,
    pub samples: Vec<PacketSample>,
    pub packet_grid: complex_germ::oracle::WavefunctionGrid,
    pub oracle_grid: complex_germ::oracle::WavefunctionGrid,
}

pub fn run_one(cfg: &PropagateConfig, hbar: f64) -> CliResult<Run> {
    let h = cfg.hamiltonian.classical(hbar)?;
    let qh = cfg.hamiltonian.quantum(hbar)?;
    let pkt = cfg.packet.packet(hbar)?;
    let grid = cfg.grid.grid()?;
    let ctl = cfg.integrator.control()?;
    let samples = propagate_packet_track(&h, &pkt, cfg.time.t0, cfg.time.t1, &ctl)?;
    let last = samples.last().ok_or_else(|| CliError::Internal("empty trajectory".into()))?;
    let psi0 = packet_to_grid(&pkt, &grid)?;
    let oracle = evolve_schrodinger(&qh, &psi0, cfg.time.t1 - cfg.time.t0, &cfg.oracle.options()?)?;
    let packet_grid = packet_to_grid(&last.packet, &grid)?;
    let err = l2_error(&packet_grid, &oracle.psi, false)?;
    let result = HbarResult {
        hbar,
        l2_error: err,
        oracle_error_estimate: oracle.error_estimate,
        oracle_steps: oracle.steps,
        samples: samples.len(),
        final_maslov_phase: last.maslov_phase,
    };
    Ok(Run { result, samples, packet_grid, oracle_grid: oracle.psi })
}

pub fn trajectory_rows(samples: &[PacketSample]) -> impl Iterator<Item = Vec<f64>> + '_ {
    samples.iter().map(|s| {
        let p = &s.packet;
        let z = p.z.get(0, 0);
        vec![s.t, p.q0[0], p.p0[0], z.re, z.im, p.s, p.c.re, p.c.im, s.maslov_phase]
    })
}

/// Measured orders log2(err(h) / err(h')) / log2(h / h') between consecutive entries.
pub fn measured_orders(results: &[HbarResult]) -> Vec<f64> {
    results
        .windows(2)
        .map(|w| (w[0].l2_error / w[1].l2_error).ln() / (w[0].hbar / w[1].hbar).ln())
        .collect()
}

#[derive(Debug, Serialize)]
struct Results {
    runs: Vec<HbarResult>,
    measured_orders: Vec<f64>,
    tol: Option<f64>,
    pass: Option<bool>,
}

pub fn run(cfg: &PropagateConfig, out: &OutDir, tol: Option<f64>) -> CliResult<()> {
    cfg.validate()?;
    let runs: Vec<Run> = parallel_map(&cfg.hbar, |&h| run_one(cfg, h)).into_iter().collect::<CliResult<_>>()?;
    println!("{:>10} {:>14} {:>8}", "hbar", "L2 error", "samples");
    let mut results = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        out.write_csv(&format!("trajectory_{i}.csv"), &TRAJECTORY_COLUMNS, trajectory_rows(&r.samples))?;
        if cfg.snapshots {
            out.write_snapshot(&format!("packet_{i}.csv"), &r.packet_grid)?;
            out.write_snapshot(&format!("oracle_{i}.csv"), &r.oracle_grid)?;
        }
        println!("{:>10} {:>14.6e} {:>8}", r.result.hbar, r.result.l2_error, r.result.samples);
        results.push(r.result);
    }
    let pass = tol.map(|t| results.iter().all(|r| r.l2_error <= t));
    let orders = measured_orders(&results);
    let worst = results.iter().map(|r| r.l2_error).fold(0.0, f64::max);
    out.write_summary("propagate", cfg, Results { runs: results, measured_orders: orders, tol, pass })?;
    if pass == Some(false) {
        return Err(CliError::Numerical(format!("L2 error {worst:e} above tolerance {:e}", tol.unwrap())));
    }
    Ok(())
}
