//! The regular covariant representation induced from a plain one, for `Z_2`
//! swapping the two vertices of a 2-cycle.

use std::sync::Arc;

use graph_dilation::gauge::{FiniteGroup, GaugeAction};
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{real_matrix, Tolerance};
use graph_dilation::representation::{covariance_defect, induced_regular_rep, validate, GraphRep};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let g = Arc::new(DirectedGraph::new(["v", "w"], [("e", "v", "w"), ("f", "w", "v")])?);
    let action = Arc::new(GaugeAction::from_permutations(
        FiniteGroup::cyclic(2),
        Arc::clone(&g),
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![0, 1], vec![1, 0]],
    )?);
    // Not covariant by itself: the two edges have different weights.
    let rep = GraphRep::new(
        g,
        2,
        vec![real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0])],
        vec![real_matrix(2, 2, &[0.0, 0.0, 0.7, 0.0]), real_matrix(2, 2, &[0.0, 0.2, 0.0, 0.0])],
    )?;

    let induced = induced_regular_rep(&rep, &action, &tol)?;
    println!("dimension {} → {}", rep.dim(), induced.dim());
    println!("covariance defect {:.2e}", covariance_defect(&induced)?);
    for check in validate(&induced, &tol)?.checks {
        println!("  {:<22} {:.2e}", check.name, check.defect);
    }
    Ok(())
}
