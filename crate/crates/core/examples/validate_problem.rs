//! Loads a problem file and prints the structural checks.
//!
//! cargo run --example validate_problem -- crates/core/examples/data/flip_z2.json

use graph_dilation::linalg::Tolerance;
use graph_dilation::problem::Problem;
use graph_dilation::representation::{row_contraction_check, validate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/flip_z2.json").into());
    let problem = Problem::load(&path)?;
    let tol = problem.tolerance.apply(Tolerance::default())?;
    let g = &problem.graph;
    println!("{path}: {} vertices, {} edges, V_fin = {:?}", g.vertex_count(), g.edge_count(), g.finite_receivers());
    if let Some(action) = &problem.action {
        let check = action.verify(&tol);
        println!("action of order {}: passes {}", action.group().order(), check.passed());
    }
    let Some(rep) = &problem.representation else {
        println!("no representation given");
        return Ok(());
    };
    print!("{}", validate(rep, &tol)?);
    for r in row_contraction_check(rep, &tol) {
        println!("row at `{}`: margin {:.2e}, passed {}", g.vertex_id(r.vertex), r.margin, r.passed);
    }
    Ok(())
}
