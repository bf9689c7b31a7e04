use complex_germ::qft::{enumerate_diagrams, evaluate_diagram, Diagram, LegFactor, PropagatorKind};
use complex_germ::quad::QuadOptions;
use serde::Serialize;

use crate::config::{DiagramEvalConfig, LegConfig, PropagatorChoice};
use crate::error::{CliError, CliResult};
use crate::output::OutDir;

#[derive(Debug, Serialize)]
struct Entry {
    diagram: Diagram,
    symmetry_factor: u64,
    loops: usize,
    components: usize,
    hbar_power: i32,
    /// Real and imaginary part, when evaluated.
    value: Option<[f64; 2]>,
    value_hbar_power: Option<i32>,
}

#[derive(Debug, Serialize)]
struct Request<'a> {
    vertices: usize,
    legs: usize,
    evaluation: Option<&'a DiagramEvalConfig>,
}

#[derive(Debug, Serialize)]
struct Results {
    count: usize,
    diagrams: Vec<Entry>,
}

pub fn run(vertices: usize, legs: usize, eval: Option<&DiagramEvalConfig>, out: &OutDir) -> CliResult<()> {
    if let Some(e) = eval {
        e.validate()?;
        if let LegConfig::Propagator { times } = &e.legs {
            if times.len() != legs {
                return Err(CliError::Config(format!("legs.times has {} entries for {legs} legs", times.len())));
            }
        }
    }
    let listed = enumerate_diagrams(vertices, legs)?;
    let mut entries = Vec::new();
    for (d, m) in listed {
        let (value, value_hbar_power) = match eval {
            None => (None, None),
            Some(e) => {
                let kind = match e.propagator {
                    PropagatorChoice::Feynman => PropagatorKind::Feynman,
                    PropagatorChoice::PrincipalValue => PropagatorKind::PrincipalValue,
                };
                let leg = match &e.legs {
                    LegConfig::Classical { u0, v0 } => LegFactor::Classical { u0: *u0, v0: *v0 },
                    LegConfig::Propagator { times } => LegFactor::Propagator { times: times.clone() },
                };
                let opts = QuadOptions::with_tol(e.quad_tol, e.quad_tol);
                let v = evaluate_diagram(&d, &leg, e.m, e.hbar, e.g, (e.window[0], e.window[1]), kind, opts)?;
                (Some([v.value.re, v.value.im]), Some(v.hbar_power))
            }
        };
        entries.push(Entry {
            symmetry_factor: m,
            loops: d.loops(),
            components: d.components(),
            hbar_power: d.hbar_power(),
            diagram: d,
            value,
            value_hbar_power,
        });
    }
    println!("{} diagram classes with {vertices} vertices and {legs} legs", entries.len());
    for e in &entries {
        print!("M = {:>4}  loops = {}  edges = {:?}  legs = {:?}", e.symmetry_factor, e.loops, e.diagram.internal_edges(), e.diagram.legs());
        match e.value {
            Some([re, im]) => println!("  value = {re:.6e} {im:+.6e}i"),
            None => println!(),
        }
    }
    let request = Request { vertices, legs, evaluation: eval };
    out.write_summary("diagrams", &request, Results { count: entries.len(), diagrams: entries })?;
    Ok(())
}
