//! Finite groups acting on a graph correspondence by generalized gauge
//! actions: a vertex permutation together with unitaries carrying each edge
//! bucket `[E(v, w)]` onto `[E(α_g v, α_g w)]`.
//!
//! Bucket matrices use the column convention: entry `(j, i)` of the matrix
//! for `g` on bucket `E(v, w) = [e_1, …, e_n]` is the coefficient of `f_j` in
//! `α_g(δ_{e_i})`, where `E(α_g v, α_g w) = [f_1, …, f_n]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::correspondence::{same_graph, CoeffElement, CorrElement};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::{op_norm, CMatrix, CVector, Tolerance, C64};

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// Outcome of [`FiniteGroup::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCheck {
    pub problems: Vec<String>,
}

impl GroupCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

impl FiniteGroup {
    /// Stores a table without checking the axioms; see [`FiniteGroup::verify`].
    pub fn new(table: Vec<Vec<usize>>, identity: usize, inverse: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Structure("group must have at least one element".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::Structure("multiplication table is not n×n over 0..n".into()));
        }
        if identity >= n || inverse.len() != n || inverse.iter().any(|&x| x >= n) {
            return Err(Error::Structure("identity or inverse map out of range".into()));
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z_n` with element `k` standing for `k mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inverse = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup {
            table,
            identity: 0,
            inverse,
        }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inverse
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    fn check_element(&self, g: usize) -> Result<()> {
        if g < self.order() {
            Ok(())
        } else {
            Err(Error::Lookup {
                kind: "group element",
                id: g.to_string(),
            })
        }
    }

    /// Checks identity, inverses and associativity.
    pub fn verify(&self) -> GroupCheck {
        let n = self.order();
        let e = self.identity;
        let mut problems = Vec::new();
        for a in 0..n {
            if self.table[e][a] != a || self.table[a][e] != a {
                problems.push(format!("{e} is not a two-sided identity for {a}"));
            }
            let ai = self.inverse[a];
            if self.table[a][ai] != e || self.table[ai][a] != e {
                problems.push(format!("{ai} is not an inverse of {a}"));
            }
        }
        'assoc: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        problems.push(format!("associativity fails at ({a}, {b}, {c})"));
                        break 'assoc;
                    }
                }
            }
        }
        GroupCheck { problems }
    }
}

/// A generalized gauge action of a finite group on a graph correspondence.
#[derive(Debug, Clone)]
pub struct GaugeAction {
    group: FiniteGroup,
    graph: Arc<DirectedGraph>,
    vertex_perm: Vec<Vec<usize>>,
    buckets: Vec<BTreeMap<(usize, usize), CMatrix>>,
    edge_maps: Vec<CMatrix>,
}

/// Outcome of [`GaugeAction::verify`], with the measured defects.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionCheck {
    pub unitary_defect: f64,
    pub homomorphism_defect: f64,
    pub identity_defect: f64,
    pub problems: Vec<String>,
}

impl ActionCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

impl GaugeAction {
    /// Builds an action from per-element vertex permutations (by index) and
    /// bucket matrices keyed by `(range, source)` vertex indices.
    ///
    /// Shapes are checked here; unitarity and the homomorphism law are left
    /// to [`GaugeAction::verify`].
    pub fn new(
        group: FiniteGroup,
        graph: Arc<DirectedGraph>,
        vertex_perm: Vec<Vec<usize>>,
        buckets: Vec<BTreeMap<(usize, usize), CMatrix>>,
    ) -> Result<Self> {
        let n = group.order();
        let nv = graph.vertex_count();
        if vertex_perm.len() != n || buckets.len() != n {
            return Err(Error::Structure(format!(
                "action data for {} / {} elements, group has {n}",
                vertex_perm.len(),
                buckets.len()
            )));
        }
        for (g, perm) in vertex_perm.iter().enumerate() {
            let mut seen = vec![false; nv];
            if perm.len() != nv {
                return Err(Error::Structure(format!("vertex map of element {g} has wrong length")));
            }
            for &w in perm {
                if w >= nv || std::mem::replace(&mut seen[w], true) {
                    return Err(Error::Structure(format!(
                        "vertex map of element {g} is not a permutation"
                    )));
                }
            }
        }
        let nonempty = graph.nonempty_buckets();
        let mut edge_maps = Vec::with_capacity(n);
        for g in 0..n {
            let perm = &vertex_perm[g];
            let mut full = CMatrix::zeros(graph.edge_count(), graph.edge_count());
            for &(v, w) in &nonempty {
                let src = graph.bucket(v, w);
                let dst = graph.bucket(perm[v], perm[w]);
                let m = buckets[g].get(&(v, w)).ok_or_else(|| {
                    Error::Structure(format!(
                        "element {g} has no matrix for bucket E({}, {})",
                        graph.vertex_id(v),
                        graph.vertex_id(w)
                    ))
                })?;
                if dst.len() != src.len() || m.shape() != (dst.len(), src.len()) {
                    return Err(Error::Structure(format!(
                        "element {g}: bucket E({}, {}) has {} edges, image bucket {}, matrix {}x{}",
                        graph.vertex_id(v),
                        graph.vertex_id(w),
                        src.len(),
                        dst.len(),
                        m.nrows(),
                        m.ncols()
                    )));
                }
                for (i, &e) in src.iter().enumerate() {
                    for (j, &f) in dst.iter().enumerate() {
                        full[(f, e)] = m[(j, i)];
                    }
                }
            }
            for key in buckets[g].keys() {
                if !nonempty.contains(key) {
                    return Err(Error::Structure(format!(
                        "element {g} has a matrix for empty bucket E({}, {})",
                        graph.vertex_id(key.0),
                        graph.vertex_id(key.1)
                    )));
                }
            }
            edge_maps.push(full);
        }
        Ok(GaugeAction {
            group,
            graph,
            vertex_perm,
            buckets,
            edge_maps,
        })
    }

    /// The trivial group acting trivially.
    pub fn trivial(graph: Arc<DirectedGraph>) -> Self {
        let nv = graph.vertex_count();
        let buckets = graph
            .nonempty_buckets()
            .into_iter()
            .map(|(v, w)| {
                let k = graph.bucket(v, w).len();
                ((v, w), CMatrix::identity(k, k))
            })
            .collect();
        Self::new(FiniteGroup::trivial(), graph, vec![(0..nv).collect()], vec![buckets])
            .expect("trivial action is well formed")
    }

    /// An action in which every element permutes vertices and edges.
    /// `edge_perm[g][e]` is the index of `α_g(e)`; bucket matrices are the
    /// induced permutation matrices.
    pub fn from_permutations(
        group: FiniteGroup,
        graph: Arc<DirectedGraph>,
        vertex_perm: Vec<Vec<usize>>,
        edge_perm: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut buckets = Vec::with_capacity(group.order());
        for (g, eperm) in edge_perm.iter().enumerate() {
            if eperm.len() != graph.edge_count() {
                return Err(Error::Structure(format!("edge map of element {g} has wrong length")));
            }
            let vp = vertex_perm
                .get(g)
                .ok_or_else(|| Error::Structure("missing vertex map".into()))?;
            let mut map = BTreeMap::new();
            for (v, w) in graph.nonempty_buckets() {
                let src = graph.bucket(v, w);
                let dst = graph.bucket(vp[v], vp[w]);
                let mut m = CMatrix::zeros(dst.len(), src.len());
                for (i, &e) in src.iter().enumerate() {
                    let target = eperm[e];
                    let j = dst.iter().position(|&f| f == target).ok_or_else(|| {
                        Error::Structure(format!(
                            "element {g} sends edge `{}` outside the image bucket",
                            graph.edge(e).id
                        ))
                    })?;
                    m[(j, i)] = C64::new(1.0, 0.0);
                }
                map.insert((v, w), m);
            }
            buckets.push(map);
        }
        Self::new(group, graph, vertex_perm, buckets)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    /// Index of `α_g(v)`.
    pub fn vertex_image(&self, g: usize, v: usize) -> usize {
        self.vertex_perm[g][v]
    }

    pub fn vertex_perms(&self) -> &[Vec<usize>] {
        &self.vertex_perm
    }

    pub fn bucket_matrices(&self, g: usize) -> &BTreeMap<(usize, usize), CMatrix> {
        &self.buckets[g]
    }

    /// The matrix of `α_g` on `X` in the edge basis (column `e` is `α_g(δ_e)`).
    pub fn edge_map(&self, g: usize) -> &CMatrix {
        &self.edge_maps[g]
    }

    /// Checks unitarity of bucket matrices, the homomorphism law
    /// `α_{gh} = α_g ∘ α_h` and that the identity acts trivially.
    pub fn verify(&self, tol: &Tolerance) -> ActionCheck {
        let mut problems = Vec::new();
        let group_check = self.group.verify();
        problems.extend(group_check.problems.iter().map(|p| format!("group: {p}")));

        let mut unitary_defect: f64 = 0.0;
        for (g, map) in self.buckets.iter().enumerate() {
            for (&(v, w), m) in map {
                let k = m.ncols();
                let d = op_norm(&(m.adjoint() * m - CMatrix::identity(k, k)))
                    .max(op_norm(&(m * m.adjoint() - CMatrix::identity(k, k))));
                if d > tol.eps {
                    problems.push(format!(
                        "element {g}: bucket matrix on E({}, {}) is not unitary (defect {d:e})",
                        self.graph.vertex_id(v),
                        self.graph.vertex_id(w)
                    ));
                }
                unitary_defect = unitary_defect.max(d);
            }
        }

        let n = self.group.order();
        let mut homomorphism_defect: f64 = 0.0;
        if group_check.passed() {
            for g in 0..n {
                for h in 0..n {
                    let gh = self.group.mul(g, h);
                    let composed: Vec<usize> = (0..self.graph.vertex_count())
                        .map(|v| self.vertex_perm[g][self.vertex_perm[h][v]])
                        .collect();
                    if composed != self.vertex_perm[gh] {
                        problems.push(format!("vertex maps: α_{g}∘α_{h} ≠ α_{gh}"));
                        homomorphism_defect = f64::INFINITY;
                        continue;
                    }
                    let d = op_norm(&(&self.edge_maps[g] * &self.edge_maps[h] - &self.edge_maps[gh]));
                    if d > tol.eps {
                        problems.push(format!("bucket maps: α_{g}∘α_{h} ≠ α_{gh} (defect {d:e})"));
                    }
                    homomorphism_defect = homomorphism_defect.max(d);
                }
            }
        }

        for (g, perm) in self.vertex_perm.iter().enumerate() {
            for (v, &w) in perm.iter().enumerate() {
                if self.graph.is_truncated(v) != self.graph.is_truncated(w) {
                    problems.push(format!(
                        "element {g} maps `{}` to `{}` but only one of them is truncated",
                        self.graph.vertex_id(v),
                        self.graph.vertex_id(w)
                    ));
                }
            }
        }

        let e = self.group.identity();
        let ne = self.graph.edge_count();
        let mut identity_defect = op_norm(&(&self.edge_maps[e] - CMatrix::identity(ne, ne)));
        if self.vertex_perm[e].iter().enumerate().any(|(i, &j)| i != j) {
            identity_defect = f64::INFINITY;
        }
        if identity_defect > tol.eps {
            problems.push(format!("identity element acts nontrivially (defect {identity_defect:e})"));
        }
        ActionCheck {
            unitary_defect,
            homomorphism_defect,
            identity_defect,
            problems,
        }
    }

    /// `α_g(x)`.
    pub fn act_on_element(&self, g: usize, x: &CorrElement) -> Result<CorrElement> {
        self.group.check_element(g)?;
        same_graph(&self.graph, x.graph())?;
        let v = CVector::from_column_slice(x.coeffs());
        let image = &self.edge_maps[g] * v;
        CorrElement::from_dense(&self.graph, image.iter().copied().collect())
    }

    /// `α_g(c)`, i.e. `(α_g c)(α_g v) = c(v)`.
    pub fn act_on_coeff(&self, g: usize, c: &CoeffElement) -> Result<CoeffElement> {
        self.group.check_element(g)?;
        same_graph(&self.graph, c.graph())?;
        let mut out = vec![C64::new(0.0, 0.0); self.graph.vertex_count()];
        for (v, &z) in c.coeffs().iter().enumerate() {
            out[self.vertex_perm[g][v]] = z;
        }
        CoeffElement::from_dense(&self.graph, out)
    }
}
