//! The Möbius map on the disc algebra does not extend to the cover
//! `C(T) ⊕ M_2`: the matrix parts of `z − z²z*` and its image have
//! different norms.
//!
//! cargo run --example counterexample [degree] [grid]

use graph_dilation::disc::{admissibility_gap, DEFAULT_DEGREE, DEFAULT_GRID};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let degree = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_DEGREE);
    let grid = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_GRID);

    let gap = admissibility_gap(degree, grid)?;
    let (image, source) = gap.pair();
    println!("truncation degree {degree}, grid {grid}");
    println!("‖D_0‖ on M_2 = {source:.12}");
    println!("‖D_1‖ on M_2 = {image:.12}   (3√10/16 = {:.12})", 3.0 * 10f64.sqrt() / 16.0);
    println!("function-part residuals: {:.2e}, {:.2e}", gap.d0_residual, gap.d1_residual);
    println!("D_1 matrix part:\n{:.6}", gap.d1.mat_part.map(|z| z.re));
    println!("extension ruled out: {}", gap.obstructs(1e-8));
    Ok(())
}
