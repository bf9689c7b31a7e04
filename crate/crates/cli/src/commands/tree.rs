use complex_germ::qft::tree_series_vs_classical;
use complex_germ::quad::QuadOptions;
use serde::Serialize;

use crate::config::TreeConfig;
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

/// Default tolerance per order when --tol is not given.
fn default_tol(order: usize) -> f64 {
    if order <= 1 {
        1e-6
    } else {
        1e-5
    }
}

#[derive(Debug, Serialize)]
struct Row {
    order: usize,
    t: f64,
    quantum: f64,
    classical: f64,
    difference: f64,
    tol: f64,
}

#[derive(Debug, Serialize)]
struct Results {
    rows: Vec<Row>,
    pass: bool,
}

pub fn run(cfg: &TreeConfig, out: &OutDir, tol: Option<f64>) -> CliResult<()> {
    cfg.validate()?;
    let opts = QuadOptions::with_tol(1e-12, 1e-11);
    let mut rows = Vec::new();
    println!("{:>5} {:>6} {:>16} {:>16} {:>10}", "order", "t", "quantum", "classical", "diff");
    for &order in &cfg.orders {
        for &t in &cfg.times {
            let c = tree_series_vs_classical(order, cfg.m, cfg.g, cfg.u0, cfg.v0, t, opts)?;
            println!("{order:>5} {t:>6} {:>16.10e} {:>16.10e} {:>10.2e}", c.quantum, c.classical, c.difference);
            rows.push(Row {
                order,
                t,
                quantum: c.quantum,
                classical: c.classical,
                difference: c.difference,
                tol: tol.unwrap_or_else(|| default_tol(order)),
            });
        }
    }
    let csv_rows = rows.iter().map(|r| vec![r.order as f64, r.t, r.quantum, r.classical, r.difference]);
    out.write_csv("tree_check.csv", &["order", "t", "quantum", "classical", "difference"], csv_rows)?;
    let pass = rows.iter().all(|r| r.difference <= r.tol);
    let worst = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
    out.write_summary("tree-check", cfg, Results { rows, pass })?;
    if !pass {
        return Err(CliError::Numerical(format!("tree-level difference {worst:e} above tolerance")));
    }
    Ok(())
}
