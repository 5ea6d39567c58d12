//! Iterated isometric steps for a single contraction reproduce the Schäffer
//! isometry: the compressions of `V^k` agree with `T^k`.

use std::sync::Arc;

use graph_dilation::dilation::iterate_coextension;
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{op_norm, real_matrix, CMatrix, Tolerance};
use graph_dilation::representation::GraphRep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    let t = real_matrix(2, 2, &[0.5, 0.4, 0.0, 0.3]);
    let loop_graph = Arc::new(DirectedGraph::cuntz(1));
    let rep = GraphRep::new(loop_graph, 2, vec![CMatrix::identity(2, 2)], vec![t.clone()])?;

    for n in 1..=4 {
        let report = iterate_coextension(&rep, n, &tol)?;
        let v = report.final_rep.edge_op(0);
        let e = &report.embed;
        let mut vk = e.clone();
        let mut tk = CMatrix::identity(2, 2);
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            vk = v * vk;
            tk = &tk * &t;
            worst = worst.max(op_norm(&(e.adjoint() * &vk - &tk)));
        }
        println!(
            "{n} step(s): dim {:>2}, max ‖P V^k|_H − T^k‖ = {worst:.2e}, converged {}",
            report.final_dim(),
            report.converged
        );
    }
    Ok(())
}
