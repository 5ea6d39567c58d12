mod common;

use std::sync::Arc;

use common::*;
use graph_dilation::dilation::{
    ck_step_defect, corner_identity_defect, cp_dilate, iterate_coextension, one_step_ck,
    one_step_isometric,
};
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{op_norm, CMatrix, Tolerance, C64};
use graph_dilation::representation::{
    ck_defect, covariance_defect, induced_regular_rep, toeplitz_defect, validate, GraphRep,
};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// `(I − R R*)^{1/2}` for the row `R = [T_1 … T_n]`, built from the SVD of
/// `R` rather than from an eigen-decomposition.
fn row_defect_by_svd(row: &CMatrix) -> CMatrix {
    let d = row.nrows();
    let svd = row.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let mut scaled = u.clone();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        scaled.column_mut(k).scale_mut((1.0 - s * s).max(0.0).sqrt());
    }
    // Left singular vectors past the rank carry defect 1.
    let mut out = &scaled * u.adjoint();
    let extra = CMatrix::identity(d, d) - &u * u.adjoint();
    out += extra;
    out
}

#[test]
fn ck_step_matches_cuntz3_oracle() {
    let mut rng = rng(33);
    let g = Arc::new(DirectedGraph::cuntz(3));
    for case in 0..20 {
        let d = 1 + case % 4;
        let ts: Vec<CMatrix> = (0..3).map(|_| random_matrix(&mut rng, d, d)).collect();
        let mut row = CMatrix::zeros(d, 3 * d);
        for (i, t) in ts.iter().enumerate() {
            row.view_mut((0, i * d), (d, d)).copy_from(t);
        }
        let scale = 0.9 / op_norm(&row);
        let ts: Vec<CMatrix> = ts.into_iter().map(|t| t * C64::new(scale, 0.0)).collect();
        let row = row * C64::new(scale, 0.0);
        let rep = GraphRep::new(Arc::clone(&g), d, vec![CMatrix::identity(d, d)], ts.clone()).unwrap();

        let step = one_step_ck(&rep, &tol()).unwrap();
        assert_eq!(step.new_dim, 4 * d);
        let delta = row_defect_by_svd(&row) * C64::new(1.0 / 3f64.sqrt(), 0.0);
        for (i, t) in ts.iter().enumerate() {
            let mut expected = CMatrix::zeros(4 * d, 4 * d);
            expected.view_mut((0, 0), (d, d)).copy_from(t);
            expected.view_mut((0, d + i * d), (d, d)).copy_from(&delta);
            let got = step.rep_after.edge_op(i);
            // The step may pick a different basis of each copy; compare
            // through the top block row, which is basis independent up to a
            // unitary on the copy, via T_1 T_1*.
            let lhs = got * got.adjoint();
            let rhs = &expected * expected.adjoint();
            assert!(op_norm(&(lhs - rhs)) < 1e-9, "case {case}, edge {i}");
        }
        assert!(ck_step_defect(&rep, &step) < 1e-9);
    }
}

#[test]
fn ck_step_keeps_complex_phase_covariance() {
    let tol = tol();
    let mut rng = rng(40);
    let action = z3_phase_cuntz3();
    for _ in 0..5 {
        let base = random_cc_rep(&mut rng, Arc::clone(action.graph()), 2);
        let rep = induced_regular_rep(&base, &action, &tol).unwrap();
        let step = one_step_ck(&rep, &tol).unwrap();
        assert!(covariance_defect(&step.rep_after).unwrap() < 1e-10);
    }
}

#[test]
fn cp_dilation_of_cuntz_rep_is_cuntz() {
    let tol = tol();
    let mut rng = rng(41);
    let g = Arc::new(DirectedGraph::cuntz(2));
    for _ in 0..5 {
        let rep = random_cc_rep_with(&mut rng, Arc::clone(&g), &[3]);
        let report = cp_dilate(&rep, 5, &tol).unwrap();
        assert!(report.converged);
        let out = &report.final_rep;
        // No finite-dimensional Cuntz family exists, so the relations can
        // only hold compressed to the space the last round started from.
        let last = report.last().unwrap();
        assert!(last.compressed_toeplitz <= tol.eps && last.compressed_ck <= tol.eps);
        assert!(toeplitz_defect(out) > tol.eps || ck_defect(out) > tol.eps);
        // The original operators sit in the corner.
        let e = &report.embed;
        for k in 0..2 {
            let corner = e.adjoint() * out.edge_op(k) * e;
            assert!(op_norm(&(corner - rep.edge_op(k))) < 1e-9);
        }
    }
}

#[test]
fn zero_rep_dilates_in_one_round() {
    let g = Arc::new(DirectedGraph::cuntz(2));
    let rep = GraphRep::zero(Arc::clone(&g), &[1]).unwrap();
    let report = cp_dilate(&rep, 4, &tol()).unwrap();
    assert!(report.converged);
    assert_eq!(report.rounds, 1);
}

#[test]
fn coextension_reports_resource_cap() {
    let g = Arc::new(DirectedGraph::cuntz(3));
    let mut rng = rng(42);
    let rep = random_cc_rep_with(&mut rng, g, &[4]);
    let small = Tolerance::new(1e-8, 1e-10, 20).unwrap();
    match iterate_coextension(&rep, 3, &small) {
        Ok(report) => assert!(report.resource_limit.is_some()),
        Err(err) => assert!(matches!(err, graph_dilation::error::Error::ResourceCap { .. }), "{err}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn isometric_step_on_random_graphs(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rep = random_case(&mut rng);
        let step = one_step_isometric(&rep, &tol()).unwrap();
        prop_assert!(corner_identity_defect(&rep, &step) < 1e-9);
        prop_assert!(validate(&step.rep_after, &tol()).unwrap().passed());
        let e = &step.embed;
        for k in 0..rep.graph().edge_count() {
            let corner = e.adjoint() * step.rep_after.edge_op(k) * e;
            prop_assert!(op_norm(&(corner - rep.edge_op(k))) < 1e-12);
        }
    }

    #[test]
    fn ck_step_on_random_graphs(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rep = random_case(&mut rng);
        let step = one_step_ck(&rep, &tol()).unwrap();
        prop_assert!(ck_step_defect(&rep, &step) < 1e-7);
        prop_assert!(validate(&step.rep_after, &tol()).unwrap().passed());
    }

    #[test]
    fn steps_preserve_covariance(seed in any::<u64>(), which in 0usize..6) {
        let tol = tol();
        let mut rng = rng(seed);
        let (_, action) = z2_actions().into_iter().chain(z3_actions()).nth(which).unwrap();
        let base = random_cc_rep(&mut rng, Arc::clone(action.graph()), 2);
        let rep = induced_regular_rep(&base, &action, &tol).unwrap();
        let iso = one_step_isometric(&rep, &tol).unwrap();
        let ck = one_step_ck(&rep, &tol).unwrap();
        prop_assert!(covariance_defect(&iso.rep_after).unwrap() < 1e-10);
        prop_assert!(covariance_defect(&ck.rep_after).unwrap() < 1e-10);
    }
}
