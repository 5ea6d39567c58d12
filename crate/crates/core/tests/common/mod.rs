//! Random generators and fixed actions shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use graph_dilation::gauge::{FiniteGroup, GaugeAction};
use graph_dilation::graph::DirectedGraph;
use graph_dilation::linalg::{op_norm, CMatrix, C64};
use graph_dilation::representation::GraphRep;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).qr().q()
}

/// Random Hermitian PSD matrix `A A*` with `A` of size `n × rank`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> CMatrix {
    let a = random_matrix(rng, n, rank);
    &a * a.adjoint()
}

/// Random matrix rescaled to operator norm `r`.
pub fn random_contraction(rng: &mut impl Rng, n: usize, r: f64) -> CMatrix {
    let m = random_matrix(rng, n, n);
    let norm = op_norm(&m);
    m * C64::new(r / norm, 0.0)
}

/// Graph on `1..=max_v` vertices with `1..=max_e` random edges.
pub fn random_graph(rng: &mut impl Rng, max_v: usize, max_e: usize) -> DirectedGraph {
    let nv = rng.gen_range(1..=max_v);
    let ne = rng.gen_range(1..=max_e);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..ne)
        .map(|i| {
            let s = rng.gen_range(0..nv);
            let d = rng.gen_range(0..nv);
            (format!("e{i}"), vertices[s].clone(), vertices[d].clone())
        })
        .collect();
    DirectedGraph::new(vertices.clone(), edges).unwrap()
}

/// Completely contractive representation with `H_v` of dimension `mult[v]`,
/// rotated by a random unitary so that no coordinate structure survives.
///
/// Each row `[t(e)]_{e ∈ r^{-1}(v)}` is scaled to norm `c ∈ [0.2, 1]`, with
/// `c = 1` (a coisometric row) a quarter of the time.
pub fn random_cc_rep_with(rng: &mut impl Rng, graph: Arc<DirectedGraph>, mult: &[usize]) -> GraphRep {
    let dim: usize = mult.iter().sum();
    let w = random_unitary(rng, dim);
    let mut bases = Vec::new();
    let mut offset = 0;
    for &m in mult {
        bases.push(w.columns(offset, m).into_owned());
        offset += m;
    }
    let proj: Vec<CMatrix> = bases.iter().map(|b| b * b.adjoint()).collect();
    let mut edge_op: Vec<CMatrix> = graph
        .edges()
        .iter()
        .map(|e| {
            let x = random_matrix(rng, mult[e.dst], mult[e.src]);
            &bases[e.dst] * x * bases[e.src].adjoint()
        })
        .collect();
    for v in 0..graph.vertex_count() {
        let fiber = graph.fiber(v);
        if fiber.is_empty() {
            continue;
        }
        let mut row = CMatrix::zeros(dim, dim * fiber.len());
        for (i, &e) in fiber.iter().enumerate() {
            row.view_mut((0, i * dim), (dim, dim)).copy_from(&edge_op[e]);
        }
        let norm = op_norm(&row);
        if norm == 0.0 {
            continue;
        }
        let c = if rng.gen_bool(0.25) { 1.0 } else { rng.gen_range(0.2..1.0) };
        for &e in fiber {
            edge_op[e] *= C64::new(c / norm, 0.0);
        }
    }
    GraphRep::new(graph, dim, proj, edge_op).unwrap()
}

/// As [`random_cc_rep_with`], multiplicities drawn from `1..=max_mult`.
pub fn random_cc_rep(rng: &mut impl Rng, graph: Arc<DirectedGraph>, max_mult: usize) -> GraphRep {
    let mult: Vec<usize> = (0..graph.vertex_count())
        .map(|_| rng.gen_range(1..=max_mult))
        .collect();
    random_cc_rep_with(rng, graph, &mult)
}

/// Random graph (≤ 4 vertices, ≤ 6 edges) with a random CC representation of
/// dimension ≤ 8; sometimes one vertex is flagged as truncated.
pub fn random_case(rng: &mut impl Rng) -> GraphRep {
    let mut g = random_graph(rng, 4, 6);
    if rng.gen_bool(0.2) {
        let v = rng.gen_range(0..g.vertex_count());
        let id = g.vertex_id(v).to_string();
        g = g.with_truncated([id]).unwrap();
    }
    random_cc_rep(rng, Arc::new(g), 2)
}

/// `Z_2` swapping the two vertices and edges of the 2-cycle.
pub fn z2_swap_two_cycle() -> Arc<GaugeAction> {
    let g = Arc::new(DirectedGraph::new(["v", "w"], [("e", "v", "w"), ("f", "w", "v")]).unwrap());
    Arc::new(
        GaugeAction::from_permutations(
            FiniteGroup::cyclic(2),
            g,
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap(),
    )
}

/// `Z_2` fixing the vertex of Cuntz-2 and acting on the bucket by a
/// non-permutation reflection.
pub fn z2_reflection_cuntz2() -> Arc<GaugeAction> {
    let g = Arc::new(DirectedGraph::cuntz(2));
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let refl = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(c, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-c, 0.0)],
    );
    let buckets = vec![
        BTreeMap::from([((0, 0), CMatrix::identity(2, 2))]),
        BTreeMap::from([((0, 0), refl)]),
    ];
    Arc::new(GaugeAction::new(FiniteGroup::cyclic(2), g, vec![vec![0], vec![0]], buckets).unwrap())
}

/// `Z_2` swapping two vertices joined by two parallel edges each way; the
/// buckets are mixed by a complex unitary `H` and its adjoint.
pub fn z2_swap_mixing() -> Arc<GaugeAction> {
    let g = Arc::new(
        DirectedGraph::new(
            ["v", "w"],
            [("a1", "v", "w"), ("a2", "v", "w"), ("b1", "w", "v"), ("b2", "w", "v")],
        )
        .unwrap(),
    );
    let s = 0.5f64.sqrt();
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, s), C64::new(s, 0.0)],
    );
    let (v, w) = (0, 1);
    let id = BTreeMap::from([((w, v), CMatrix::identity(2, 2)), ((v, w), CMatrix::identity(2, 2))]);
    let flip = BTreeMap::from([((w, v), h.clone()), ((v, w), h.adjoint())]);
    Arc::new(
        GaugeAction::new(FiniteGroup::cyclic(2), g, vec![vec![0, 1], vec![1, 0]], vec![id, flip]).unwrap(),
    )
}

/// `Z_3` rotating the 3-cycle.
pub fn z3_rotate_cycle() -> Arc<GaugeAction> {
    let g = Arc::new(DirectedGraph::cycle(3));
    let rot = |k: usize| (0..3).map(|i| (i + k) % 3).collect::<Vec<_>>();
    Arc::new(
        GaugeAction::from_permutations(
            FiniteGroup::cyclic(3),
            g,
            vec![rot(0), rot(1), rot(2)],
            vec![rot(0), rot(1), rot(2)],
        )
        .unwrap(),
    )
}

/// `Z_3` acting on the Cuntz-3 bucket by the phases `diag(1, ω^k, ω^{2k})`.
pub fn z3_phase_cuntz3() -> Arc<GaugeAction> {
    let g = Arc::new(DirectedGraph::cuntz(3));
    let buckets = (0..3)
        .map(|k| {
            let d = CMatrix::from_fn(3, 3, |i, j| {
                if i == j {
                    C64::from_polar(1.0, 2.0 * PI * (k * i) as f64 / 3.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            BTreeMap::from([((0, 0), d)])
        })
        .collect();
    Arc::new(GaugeAction::new(FiniteGroup::cyclic(3), g, vec![vec![0]; 3], buckets).unwrap())
}

/// `Z_3` cyclically permuting the edges of Cuntz-3.
pub fn z3_permute_cuntz3() -> Arc<GaugeAction> {
    let g = Arc::new(DirectedGraph::cuntz(3));
    let rot = |k: usize| (0..3).map(|i| (i + k) % 3).collect::<Vec<_>>();
    Arc::new(
        GaugeAction::from_permutations(FiniteGroup::cyclic(3), g, vec![vec![0]; 3], vec![rot(0), rot(1), rot(2)])
            .unwrap(),
    )
}

pub fn z2_actions() -> Vec<(&'static str, Arc<GaugeAction>)> {
    vec![
        ("Z2 vertex swap", z2_swap_two_cycle()),
        ("Z2 bucket reflection", z2_reflection_cuntz2()),
        ("Z2 swap with mixing", z2_swap_mixing()),
    ]
}

pub fn z3_actions() -> Vec<(&'static str, Arc<GaugeAction>)> {
    vec![
        ("Z3 cycle rotation", z3_rotate_cycle()),
        ("Z3 phases", z3_phase_cuntz3()),
        ("Z3 edge permutation", z3_permute_cuntz3()),
    ]
}

/// `‖A − B‖` entrywise maximum.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `(I − T*T)^{1/2}` through the SVD `T = U Σ V*`: `V (I − Σ²)^{1/2} V*`.
pub fn svd_defect(t: &CMatrix) -> CMatrix {
    let svd = t.clone().svd(true, true);
    let v = svd.v_t.expect("v requested").adjoint();
    let n = t.ncols();
    let mut scaled = v.clone();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let d = (1.0 - s * s).max(0.0).sqrt();
        scaled.column_mut(k).scale_mut(d);
    }
    // Columns beyond the singular values (none here, T is square).
    debug_assert_eq!(svd.singular_values.len(), n);
    scaled * v.adjoint()
}

/// The classical Schäffer matrix truncated to `n + 1` blocks:
///
/// ```text
/// [ T    0  0 … ]
/// [ D_T  0  0 … ]
/// [ 0    I  0 … ]
/// [ 0    0  I … ]
/// ```
///
/// `V^k` restricted to the first block is exact for `k ≤ n`.
pub fn schaffer_matrix(t: &CMatrix, n: usize) -> CMatrix {
    let d = t.nrows();
    let size = d * (n + 1);
    let mut v = CMatrix::zeros(size, size);
    v.view_mut((0, 0), (d, d)).copy_from(t);
    if n >= 1 {
        v.view_mut((d, 0), (d, d)).copy_from(&svd_defect(t));
    }
    for k in 2..=n {
        v.view_mut((k * d, (k - 1) * d), (d, d))
            .copy_from(&CMatrix::identity(d, d));
    }
    v
}
