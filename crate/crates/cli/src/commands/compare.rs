use complex_germ::germ::{exact_quadratic_propagate, packet_to_grid};
use complex_germ::linalg::RMat;
use complex_germ::oracle::{evolve_schrodinger, l2_error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::propagate::{measured_orders, run_one, HbarResult};
use crate::config::{GridConfig, HamiltonianConfig, OracleConfig, PacketConfig, PropagateConfig};
use crate::error::{CliError, CliResult};
use crate::output::{parallel_map, OutDir};

#[derive(Debug, Serialize)]
struct SweepResults {
    runs: Vec<HbarResult>,
    measured_orders: Vec<f64>,
    strictly_decreasing: bool,
    tol: Option<f64>,
    pass: Option<bool>,
}

/// Packet vs oracle for every hbar of a config, with grid snapshots of both.
pub fn run(cfg: &PropagateConfig, out: &OutDir, tol: Option<f64>) -> CliResult<()> {
    cfg.validate()?;
    let runs = parallel_map(&cfg.hbar, |&h| run_one(cfg, h)).into_iter().collect::<CliResult<Vec<_>>>()?;
    let mut results = Vec::new();
    println!("{:>10} {:>14}", "hbar", "L2 error");
    for (i, r) in runs.into_iter().enumerate() {
        let rows = r
            .packet_grid
            .grid
            .points()
            .into_iter()
            .zip(r.packet_grid.values.iter().zip(&r.oracle_grid.values))
            .map(|(x, (a, b))| vec![x, a.re, a.im, b.re, b.im]);
        out.write_csv(&format!("compare_{i}.csv"), &["x", "re_packet", "im_packet", "re_oracle", "im_oracle"], rows)?;
        println!("{:>10} {:>14.6e}", r.result.hbar, r.result.l2_error);
        results.push(r.result);
    }
    let orders = measured_orders(&results);
    for o in &orders {
        println!("measured order {o:.4}");
    }
    let strictly_decreasing = results.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
    let pass = tol.map(|t| results.iter().all(|r| r.l2_error <= t));
    let worst = results.iter().map(|r| r.l2_error).fold(0.0, f64::max);
    out.write_summary(
        "compare-oracle",
        cfg,
        SweepResults { runs: results, measured_orders: orders, strictly_decreasing, tol, pass },
    )?;
    if pass == Some(false) {
        return Err(CliError::Numerical(format!("L2 error {worst:e} above tolerance {:e}", tol.unwrap())));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RandomCase {
    hamiltonian: HamiltonianConfig,
    packet: PacketConfig,
    l2_error: f64,
}

#[derive(Debug, Serialize)]
struct RandomConfig {
    cases: usize,
    seed: u64,
    t: f64,
    hbar: f64,
    grid: GridConfig,
    oracle: OracleConfig,
}

#[derive(Debug, Serialize)]
struct RandomResults {
    cases: Vec<RandomCase>,
    max_l2_error: f64,
    tol: f64,
    pass: bool,
}

/// Random quadratic Hamiltonians with coefficients k/8, compared at t = 1
/// between the exact metaplectic propagation and the oracle.
pub fn run_random(cases: usize, seed: u64, out: &OutDir, tol: Option<f64>) -> CliResult<()> {
    let cfg = RandomConfig {
        cases,
        seed,
        t: 1.0,
        hbar: 1.0,
        grid: GridConfig { half_width: 16.0, points: 512 },
        oracle: OracleConfig { steps: 8, tol: 1e-10, max_doublings: 8 },
    };
    let tol = tol.unwrap_or(1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(HamiltonianConfig, PacketConfig)> = (0..cases)
        .map(|_| {
            let h = HamiltonianConfig::Quadratic {
                a: rng.random_range(2..=12) as f64 / 8.0,
                b: rng.random_range(-4..=4) as f64 / 8.0,
                c: rng.random_range(4..=12) as f64 / 8.0,
            };
            let p = PacketConfig {
                q0: rng.random_range(-1.0..1.0),
                p0: rng.random_range(-1.0..1.0),
                z: [rng.random_range(-0.5..0.5), rng.random_range(0.5..2.0)],
            };
            (h, p)
        })
        .collect();
    let grid = cfg.grid.grid()?;
    let opts = cfg.oracle.options()?;
    let errors = parallel_map(&specs, |(h, p)| -> CliResult<f64> {
        let HamiltonianConfig::Quadratic { a, b, c } = h else { unreachable!() };
        let s1 = |x: f64| RMat::from_element(1, 1, x);
        let pkt = p.packet(cfg.hbar)?;
        let exact = exact_quadratic_propagate(&s1(*a), &s1(*b), &s1(*c), &pkt, cfg.t)?;
        let psi0 = packet_to_grid(&pkt, &grid)?;
        let oracle = evolve_schrodinger(&h.quantum(cfg.hbar)?, &psi0, cfg.t, &opts)?;
        Ok(l2_error(&packet_to_grid(&exact, &grid)?, &oracle.psi, true)?)
    });
    let mut out_cases = Vec::new();
    for ((h, p), e) in specs.into_iter().zip(errors) {
        out_cases.push(RandomCase { hamiltonian: h, packet: p, l2_error: e? });
    }
    let max = out_cases.iter().map(|c| c.l2_error).fold(0.0, f64::max);
    let pass = max <= tol;
    println!("{cases} random quadratic cases (seed {seed}): max L2 error {max:.3e}, tolerance {tol:e}");
    out.write_summary("compare-oracle", &cfg, RandomResults { cases: out_cases, max_l2_error: max, tol, pass })?;
    if !pass {
        return Err(CliError::Numerical(format!("max L2 error {max:e} above tolerance {tol:e}")));
    }
    Ok(())
}
