//! The graph correspondence `(X, C, φ_X)`.
//!
//! `C = c_0(V)` and `X = c_c(E)` are stored densely over the (finite) vertex
//! and edge lists. The module structure is
//!
//! * `⟨x, y⟩(v) = Σ_{s(e) = v} conj(x(e))·y(e)`,
//! * `(x·c)(e) = x(e)·c(s(e))`,
//! * `(φ_X(c)x)(e) = c(r(e))·x(e)`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::C64;

pub(crate) fn same_graph(a: &Arc<DirectedGraph>, b: &Arc<DirectedGraph>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GraphMismatch)
    }
}

/// A function on vertices (an element of `c_0(V)`).
#[derive(Debug, Clone)]
pub struct CoeffElement {
    graph: Arc<DirectedGraph>,
    coeffs: Vec<C64>,
}

/// A function on edges (an element of `X`).
#[derive(Debug, Clone)]
pub struct CorrElement {
    graph: Arc<DirectedGraph>,
    coeffs: Vec<C64>,
}

macro_rules! element_common {
    ($ty:ident, $count:ident, $lookup:ident) => {
        impl $ty {
            pub fn zero(graph: &Arc<DirectedGraph>) -> Self {
                $ty {
                    graph: Arc::clone(graph),
                    coeffs: vec![C64::new(0.0, 0.0); graph.$count()],
                }
            }

            pub fn from_dense(graph: &Arc<DirectedGraph>, coeffs: Vec<C64>) -> Result<Self> {
                if coeffs.len() != graph.$count() {
                    return Err(Error::Dimension(format!(
                        "{} coefficients for {} slots",
                        coeffs.len(),
                        graph.$count()
                    )));
                }
                Ok($ty {
                    graph: Arc::clone(graph),
                    coeffs,
                })
            }

            /// Builds an element from `(id, value)` pairs; repeated ids add up.
            pub fn from_pairs<'a, I>(graph: &Arc<DirectedGraph>, pairs: I) -> Result<Self>
            where
                I: IntoIterator<Item = (&'a str, C64)>,
            {
                let mut out = Self::zero(graph);
                for (id, z) in pairs {
                    let i = graph.$lookup(id)?;
                    out.coeffs[i] += z;
                }
                Ok(out)
            }

            pub fn graph(&self) -> &Arc<DirectedGraph> {
                &self.graph
            }

            pub fn coeffs(&self) -> &[C64] {
                &self.coeffs
            }

            pub fn get(&self, i: usize) -> C64 {
                self.coeffs[i]
            }

            pub fn scale(&self, z: C64) -> Self {
                $ty {
                    graph: Arc::clone(&self.graph),
                    coeffs: self.coeffs.iter().map(|&a| a * z).collect(),
                }
            }

            /// Largest coefficient modulus.
            pub fn sup_norm(&self) -> f64 {
                self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }

            /// Sup-norm distance; errors on graph mismatch.
            pub fn distance(&self, other: &Self) -> Result<f64> {
                same_graph(&self.graph, &other.graph)?;
                Ok(self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max))
            }

            fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
                same_graph(&self.graph, &other.graph)?;
                Ok($ty {
                    graph: Arc::clone(&self.graph),
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(&other.coeffs)
                        .map(|(&a, &b)| f(a, b))
                        .collect(),
                })
            }

            pub fn try_add(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a + b)
            }

            pub fn try_sub(&self, other: &Self) -> Result<Self> {
                self.zip_with(other, |a, b| a - b)
            }
        }

        impl Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: &$ty) -> $ty {
                self.try_add(rhs).expect("elements over the same graph")
            }
        }

        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: &$ty) -> $ty {
                self.try_sub(rhs).expect("elements over the same graph")
            }
        }
    };
}

element_common!(CoeffElement, vertex_count, vertex);
element_common!(CorrElement, edge_count, edge_ix);

impl CoeffElement {
    /// `δ_v`.
    pub fn delta(graph: &Arc<DirectedGraph>, v: &str) -> Result<Self> {
        Self::from_pairs(graph, [(v, C64::new(1.0, 0.0))])
    }

    /// The constant function 1 (the unit of `C` for a finite graph).
    pub fn one(graph: &Arc<DirectedGraph>) -> Self {
        CoeffElement {
            graph: Arc::clone(graph),
            coeffs: vec![C64::new(1.0, 0.0); graph.vertex_count()],
        }
    }

    pub fn conj(&self) -> Self {
        CoeffElement {
            graph: Arc::clone(&self.graph),
            coeffs: self.coeffs.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Pointwise product in `C`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }
}

impl Mul for &CoeffElement {
    type Output = CoeffElement;
    fn mul(self, rhs: &CoeffElement) -> CoeffElement {
        self.try_mul(rhs).expect("elements over the same graph")
    }
}

impl CorrElement {
    /// `δ_e`.
    pub fn delta(graph: &Arc<DirectedGraph>, e: &str) -> Result<Self> {
        Self::from_pairs(graph, [(e, C64::new(1.0, 0.0))])
    }

    pub(crate) fn delta_ix(graph: &Arc<DirectedGraph>, e: usize) -> Self {
        let mut out = Self::zero(graph);
        out.coeffs[e] = C64::new(1.0, 0.0);
        out
    }

    /// Nonzero coefficients as `(edge index, value)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.coeffs
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, z)| *z != C64::new(0.0, 0.0))
    }
}

/// `⟨x, y⟩(v) = Σ_{s(e) = v} conj(x(e))·y(e)`.
pub fn inner_product(x: &CorrElement, y: &CorrElement) -> Result<CoeffElement> {
    same_graph(&x.graph, &y.graph)?;
    let mut out = CoeffElement::zero(&x.graph);
    for (i, e) in x.graph.edges().iter().enumerate() {
        out.coeffs[e.src] += x.coeffs[i].conj() * y.coeffs[i];
    }
    Ok(out)
}

/// `(x·c)(e) = x(e)·c(s(e))`.
pub fn right_action(x: &CorrElement, c: &CoeffElement) -> Result<CorrElement> {
    same_graph(&x.graph, &c.graph)?;
    let coeffs = x
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| x.coeffs[i] * c.coeffs[e.src])
        .collect();
    Ok(CorrElement {
        graph: Arc::clone(&x.graph),
        coeffs,
    })
}

/// `(φ_X(c)x)(e) = c(r(e))·x(e)`.
pub fn left_action(c: &CoeffElement, x: &CorrElement) -> Result<CorrElement> {
    same_graph(&x.graph, &c.graph)?;
    let coeffs = x
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| c.coeffs[e.dst] * x.coeffs[i])
        .collect();
    Ok(CorrElement {
        graph: Arc::clone(&x.graph),
        coeffs,
    })
}

/// Vertices whose point masses span the Katsura ideal
/// `J_X = φ_X^{-1}(K(X)) ∩ (ker φ_X)^⊥`.
///
/// For a graph, `φ_X(δ_v)` is compact iff `r^{-1}(v)` is finite and
/// `δ_v ∈ ker φ_X` iff `r^{-1}(v)` is empty, so this is `V_fin`.
pub fn katsura_ideal_support(g: &DirectedGraph) -> Vec<&str> {
    g.finite_receivers()
}

/// A finite sum of rank-one operators `θ_{x,y}(z) = x⟨y, z⟩`, kept symbolic.
#[derive(Debug, Clone)]
pub struct FiniteRankOp {
    graph: Arc<DirectedGraph>,
    terms: Vec<(CorrElement, CorrElement)>,
}

impl FiniteRankOp {
    pub fn new(graph: &Arc<DirectedGraph>) -> Self {
        FiniteRankOp {
            graph: Arc::clone(graph),
            terms: Vec::new(),
        }
    }

    /// `θ_{x,y}`.
    pub fn rank_one(x: CorrElement, y: CorrElement) -> Result<Self> {
        let mut op = FiniteRankOp::new(x.graph());
        op.push(x, y)?;
        Ok(op)
    }

    pub fn push(&mut self, x: CorrElement, y: CorrElement) -> Result<()> {
        same_graph(&self.graph, &x.graph)?;
        same_graph(&self.graph, &y.graph)?;
        self.terms.push((x, y));
        Ok(())
    }

    /// `Σ_{e ∈ r^{-1}(v)} θ_{δ_e, δ_e}`, which equals `φ_X(δ_v)` for `v ∈ V_fin`.
    pub fn left_action_of_vertex(graph: &Arc<DirectedGraph>, v: &str) -> Result<Self> {
        let vi = graph.vertex(v)?;
        let mut op = FiniteRankOp::new(graph);
        for &e in graph.fiber(vi) {
            let d = CorrElement::delta_ix(graph, e);
            op.push(d.clone(), d)?;
        }
        Ok(op)
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn terms(&self) -> &[(CorrElement, CorrElement)] {
        &self.terms
    }

    /// Evaluates the operator on `z`: `Σ x·⟨y, z⟩`.
    pub fn apply(&self, z: &CorrElement) -> Result<CorrElement> {
        let mut out = CorrElement::zero(&self.graph);
        for (x, y) in &self.terms {
            out = out.try_add(&right_action(x, &inner_product(y, z)?)?)?;
        }
        Ok(out)
    }
}
