//! Alternating Cuntz–Krieger and isometric steps on a row contraction of the
//! Cuntz-2 graph until both relations hold on the original space.

use std::sync::Arc;

use graph_dilation::dilation::cp_dilate;
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{real_matrix, CMatrix, Tolerance};
use graph_dilation::representation::GraphRep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let g = Arc::new(DirectedGraph::cuntz(2));
    let t1 = real_matrix(2, 2, &[0.3, 0.2, 0.0, 0.4]);
    let t2 = real_matrix(2, 2, &[0.1, 0.0, 0.5, 0.2]);
    let rep = GraphRep::new(g, 2, vec![CMatrix::identity(2, 2)], vec![t1, t2])?;

    let report = cp_dilate(&rep, 6, &tol)?;
    println!("{:>5} {:>12} {:>5} {:>12} {:>12}", "round", "step", "dim", "toeplitz|H", "ck|H");
    for s in &report.stages {
        println!(
            "{:>5} {:>12} {:>5} {:>12.2e} {:>12.2e}",
            s.round,
            s.kind.as_str(),
            s.new_dim,
            s.compressed_toeplitz,
            s.compressed_ck
        );
    }
    println!("converged {} after {} round(s), final dim {}", report.converged, report.rounds, report.final_dim());
    Ok(())
}
