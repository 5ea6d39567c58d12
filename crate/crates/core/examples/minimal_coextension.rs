//! The minimal isometric coextension of a weighted loop, and its invariance
//! under relabelling edges: the moment tables agree.

use std::sync::Arc;

use graph_dilation::dilation::{iterate_coextension, moment_signature};
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{real_matrix, Tolerance};
use graph_dilation::representation::GraphRep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let g = Arc::new(DirectedGraph::new(["v", "w"], [("a", "v", "w"), ("b", "w", "v"), ("c", "w", "w")])?);
    let pv = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let pw = real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let ops = vec![
        real_matrix(2, 2, &[0.0, 0.0, 0.6, 0.0]),
        real_matrix(2, 2, &[0.0, 0.5, 0.0, 0.0]),
        real_matrix(2, 2, &[0.0, 0.0, 0.0, 0.3]),
    ];
    let rep = GraphRep::new(Arc::clone(&g), 2, vec![pv.clone(), pw.clone()], ops.clone())?;
    let swapped = g.with_edge_order(&[2, 0, 1])?;
    let other = GraphRep::new(Arc::new(swapped), 2, vec![pv, pw], vec![ops[2].clone(), ops[0].clone(), ops[1].clone()])?;

    let a = iterate_coextension(&rep, 3, &tol)?;
    let b = iterate_coextension(&other, 3, &tol)?;
    println!("minimal coextension dims: {} and {}", a.final_dim(), b.final_dim());
    let ta = moment_signature(&a.final_rep, &a.embed, 3)?;
    let tb = moment_signature(&b.final_rep, &b.embed, 3)?;
    println!("{} moments, max difference {:?}", ta.len(), ta.max_difference(&tb));
    Ok(())
}
