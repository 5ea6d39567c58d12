//! Finite directed graphs `(E, V, s, r)` and the combinatorial predicates
//! used by the correspondence and dilation code.
//!
//! Edge order is the construction order and fixes every basis convention
//! downstream. Infinite graphs are modelled as finite truncations in which
//! some vertices carry a `truncated` flag: their true range fiber may be
//! infinite, so they never count as finite receivers.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    /// Index of `s(e)`.
    pub src: usize,
    /// Index of `r(e)`.
    pub dst: usize,
}

#[derive(Debug, Clone)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    truncated: Vec<bool>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    fibers: Vec<Vec<usize>>,
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.truncated == other.truncated
    }
}

impl DirectedGraph {
    /// Builds a graph from vertex ids and `(edge id, source, range)` triples.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::Structure(format!("duplicate vertex id `{v}`")));
            }
        }
        let mut edge_list = Vec::new();
        let mut edge_index = HashMap::new();
        for (id, src, dst) in edges {
            let (id, src, dst): (String, String, String) = (id.into(), src.into(), dst.into());
            let s = *vertex_index
                .get(&src)
                .ok_or_else(|| Error::unknown_vertex(&src))?;
            let r = *vertex_index
                .get(&dst)
                .ok_or_else(|| Error::unknown_vertex(&dst))?;
            if edge_index.insert(id.clone(), edge_list.len()).is_some() {
                return Err(Error::Structure(format!("duplicate edge id `{id}`")));
            }
            edge_list.push(Edge { id, src: s, dst: r });
        }
        let mut fibers = vec![Vec::new(); vertices.len()];
        for (i, e) in edge_list.iter().enumerate() {
            fibers[e.dst].push(i);
        }
        Ok(DirectedGraph {
            truncated: vec![false; vertices.len()],
            vertices,
            edges: edge_list,
            vertex_index,
            edge_index,
            fibers,
        })
    }

    /// Marks vertices whose range fiber was cut by truncation.
    pub fn with_truncated<I, S>(mut self, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for id in ids {
            let i = self.vertex(id.as_ref())?;
            self.truncated[i] = true;
        }
        Ok(self)
    }

    /// One vertex `v` with loops `e1, …, en` (the Cuntz graph).
    pub fn cuntz(n: usize) -> Self {
        let edges: Vec<(String, String, String)> = (1..=n)
            .map(|i| (format!("e{i}"), "v".to_string(), "v".to_string()))
            .collect();
        Self::new(["v"], edges).expect("cuntz graph is well formed")
    }

    /// Cycle `v0 → v1 → … → v{n-1} → v0` with edge `ei: vi → v(i+1)`.
    pub fn cycle(n: usize) -> Self {
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(String, String, String)> = (0..n)
            .map(|i| (format!("e{i}"), format!("v{i}"), format!("v{}", (i + 1) % n)))
            .collect();
        Self::new(vertices, edges).expect("cycle graph is well formed")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn is_truncated(&self, v: usize) -> bool {
        self.truncated[v]
    }

    pub fn truncated_ids(&self) -> Vec<&str> {
        (0..self.vertices.len())
            .filter(|&i| self.truncated[i])
            .map(|i| self.vertices[i].as_str())
            .collect()
    }

    /// Index of a vertex id.
    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::unknown_vertex(id))
    }

    /// Index of an edge id.
    pub fn edge_ix(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::unknown_edge(id))
    }

    /// Edge indices with range `v`, in edge order.
    pub fn fiber(&self, v: usize) -> &[usize] {
        &self.fibers[v]
    }

    /// Edge indices with `r(e) = v` and `s(e) = w`, in edge order.
    pub fn bucket(&self, v: usize, w: usize) -> Vec<usize> {
        self.fibers[v]
            .iter()
            .copied()
            .filter(|&e| self.edges[e].src == w)
            .collect()
    }

    /// All nonempty buckets `(range, source)`, in lexicographic index order.
    pub fn nonempty_buckets(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            self.edges.iter().map(|e| (e.dst, e.src)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `r^{-1}(v)` as edge ids.
    pub fn range_fiber(&self, v: &str) -> Result<Vec<&str>> {
        let v = self.vertex(v)?;
        Ok(self.fibers[v]
            .iter()
            .map(|&e| self.edges[e].id.as_str())
            .collect())
    }

    /// `E(v, w)`: edges from `w` into `v`, as ids in edge order.
    pub fn edge_bucket(&self, v: &str, w: &str) -> Result<Vec<&str>> {
        let (v, w) = (self.vertex(v)?, self.vertex(w)?);
        Ok(self
            .bucket(v, w)
            .into_iter()
            .map(|e| self.edges[e].id.as_str())
            .collect())
    }

    /// Whether `v` receives at least one and finitely many edges.
    pub fn is_finite_receiver(&self, v: usize) -> bool {
        !self.truncated[v] && !self.fibers[v].is_empty()
    }

    /// Vertex indices with `1 ≤ |r^{-1}(v)| < ∞`.
    pub fn finite_receiver_indices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.is_finite_receiver(v))
            .collect()
    }

    /// `V_fin` as vertex ids.
    pub fn finite_receivers(&self) -> Vec<&str> {
        self.finite_receiver_indices()
            .into_iter()
            .map(|v| self.vertices[v].as_str())
            .collect()
    }

    /// Whether the Katsura ideal acts non-degenerately: every edge ends in a
    /// finite receiver.
    pub fn satisfies_hyperrigidity_criterion(&self) -> bool {
        self.edges.iter().all(|e| self.is_finite_receiver(e.dst))
    }

    /// A copy with the edge list permuted: `order[k]` is the old index of the
    /// new `k`-th edge. Vertex order and flags are kept.
    pub fn with_edge_order(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.edges.len()];
        if order.len() != self.edges.len() {
            return Err(Error::Structure("edge order has the wrong length".into()));
        }
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Structure("edge order is not a permutation".into()));
            }
        }
        let edges: Vec<(String, String, String)> = order
            .iter()
            .map(|&i| {
                let e = &self.edges[i];
                (
                    e.id.clone(),
                    self.vertices[e.src].clone(),
                    self.vertices[e.dst].clone(),
                )
            })
            .collect();
        let g = Self::new(self.vertices.clone(), edges)?;
        g.with_truncated(self.truncated_ids())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_vertex() -> DirectedGraph {
        DirectedGraph::new(["v", "w"], [("e", "v", "w")]).unwrap()
    }

    #[test]
    fn range_fiber_examples() {
        let g = DirectedGraph::new(["v"], [("l", "v", "v")]).unwrap();
        assert_eq!(g.range_fiber("v").unwrap(), vec!["l"]);
        assert_eq!(DirectedGraph::cuntz(4).range_fiber("v").unwrap().len(), 4);
        assert!(two_vertex().range_fiber("v").unwrap().is_empty());
        assert!(matches!(g.range_fiber("x"), Err(Error::Lookup { .. })));
    }

    #[test]
    fn edge_bucket_examples() {
        let g = DirectedGraph::new(["v", "w"], [("a", "w", "v"), ("x", "v", "v"), ("b", "w", "v")])
            .unwrap();
        assert_eq!(g.edge_bucket("v", "w").unwrap(), vec!["a", "b"]);
        assert!(g.edge_bucket("w", "v").unwrap().is_empty());
        assert_eq!(g.edge_bucket("v", "v").unwrap(), vec!["x"]);
        assert!(g.edge_bucket("v", "nope").is_err());
    }

    #[test]
    fn finite_receiver_examples() {
        assert_eq!(DirectedGraph::cuntz(2).finite_receivers(), vec!["v"]);
        assert_eq!(two_vertex().finite_receivers(), vec!["w"]);
        let empty = DirectedGraph::new(["a", "b"], Vec::<(&str, &str, &str)>::new()).unwrap();
        assert!(empty.finite_receivers().is_empty());
    }

    #[test]
    fn hyperrigidity_examples() {
        assert!(DirectedGraph::cycle(3).satisfies_hyperrigidity_criterion());
        let cut = two_vertex().with_truncated(["w"]).unwrap();
        assert!(!cut.satisfies_hyperrigidity_criterion());
        assert!(cut.finite_receivers().is_empty());
        let empty = DirectedGraph::new(["a"], Vec::<(&str, &str, &str)>::new()).unwrap();
        assert!(empty.satisfies_hyperrigidity_criterion());
    }

    #[test]
    fn construction_errors() {
        assert!(DirectedGraph::new(["v", "v"], Vec::<(&str, &str, &str)>::new()).is_err());
        assert!(DirectedGraph::new(["v"], [("e", "v", "u")]).is_err());
        assert!(DirectedGraph::new(["v"], [("e", "v", "v"), ("e", "v", "v")]).is_err());
    }

    #[test]
    fn fibers_partition_and_buckets_refine() {
        let g = DirectedGraph::new(
            ["a", "b", "c"],
            [
                ("1", "a", "b"),
                ("2", "b", "b"),
                ("3", "a", "b"),
                ("4", "c", "a"),
                ("5", "b", "c"),
            ],
        )
        .unwrap();
        let total: usize = (0..3).map(|v| g.fiber(v).len()).sum();
        assert_eq!(total, g.edge_count());
        for v in 0..3 {
            let mut union: Vec<usize> = (0..3).flat_map(|w| g.bucket(v, w)).collect();
            union.sort_unstable();
            assert_eq!(union, g.fiber(v).to_vec());
        }
    }
}
