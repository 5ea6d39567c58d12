//! Finite-dimensional covariant representations `(ρ, t, u, H)` of a graph
//! correspondence dynamical system, with the defect measurements used to
//! certify Toeplitz, Cuntz–Krieger and covariance relations.

use std::fmt;
use std::sync::Arc;

use crate::correspondence::{same_graph, CoeffElement, CorrElement, FiniteRankOp};
use crate::error::{Error, Result};
use crate::gauge::GaugeAction;
use crate::graph::DirectedGraph;
use crate::linalg::{direct_sum, eig_extremes, op_norm, span_residual, CMatrix, Tolerance, C64};

/// A representation on `H = C^dim`.
///
/// `proj[v]` is `ρ(δ_v)`, `edge_op[e]` is `t(δ_e)`, and `unitaries[g]` is
/// `u(g)` for the group of the attached action. Vertex and edge indices follow
/// the graph's order.
#[derive(Debug, Clone)]
pub struct GraphRep {
    graph: Arc<DirectedGraph>,
    action: Option<Arc<GaugeAction>>,
    dim: usize,
    proj: Vec<CMatrix>,
    edge_op: Vec<CMatrix>,
    unitaries: Option<Vec<CMatrix>>,
}

fn check_square(m: &CMatrix, dim: usize, what: impl FnOnce() -> String) -> Result<()> {
    if m.shape() == (dim, dim) {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{} is {}x{}, expected {dim}x{dim}",
            what(),
            m.nrows(),
            m.ncols()
        )))
    }
}

impl GraphRep {
    pub fn new(
        graph: Arc<DirectedGraph>,
        dim: usize,
        proj: Vec<CMatrix>,
        edge_op: Vec<CMatrix>,
    ) -> Result<Self> {
        if proj.len() != graph.vertex_count() {
            return Err(Error::Structure(format!(
                "{} projections for {} vertices",
                proj.len(),
                graph.vertex_count()
            )));
        }
        if edge_op.len() != graph.edge_count() {
            return Err(Error::Structure(format!(
                "{} edge operators for {} edges",
                edge_op.len(),
                graph.edge_count()
            )));
        }
        for (v, p) in proj.iter().enumerate() {
            check_square(p, dim, || format!("projection for `{}`", graph.vertex_id(v)))?;
        }
        for (e, t) in edge_op.iter().enumerate() {
            check_square(t, dim, || format!("edge operator for `{}`", graph.edge(e).id))?;
        }
        Ok(GraphRep {
            graph,
            action: None,
            dim,
            proj,
            edge_op,
            unitaries: None,
        })
    }

    /// The representation with `H_v = C^{mult[v]}` stacked in vertex order and
    /// all edge operators zero.
    pub fn zero(graph: Arc<DirectedGraph>, mult: &[usize]) -> Result<Self> {
        if mult.len() != graph.vertex_count() {
            return Err(Error::Structure("one multiplicity per vertex required".into()));
        }
        let dim: usize = mult.iter().sum();
        let mut proj = Vec::with_capacity(mult.len());
        let mut offset = 0;
        for &m in mult {
            let mut p = CMatrix::zeros(dim, dim);
            for i in offset..offset + m {
                p[(i, i)] = C64::new(1.0, 0.0);
            }
            offset += m;
            proj.push(p);
        }
        let edge_op = vec![CMatrix::zeros(dim, dim); graph.edge_count()];
        Self::new(graph, dim, proj, edge_op)
    }

    /// Attaches a gauge action (without unitaries).
    pub fn with_action(mut self, action: Arc<GaugeAction>) -> Result<Self> {
        same_graph(&self.graph, action.graph())?;
        self.action = Some(action);
        self.unitaries = None;
        Ok(self)
    }

    /// Attaches a gauge action together with its implementing unitaries,
    /// one per group element in table order.
    pub fn with_covariance(
        mut self,
        action: Arc<GaugeAction>,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        same_graph(&self.graph, action.graph())?;
        if unitaries.len() != action.group().order() {
            return Err(Error::Structure(format!(
                "{} unitaries for a group of order {}",
                unitaries.len(),
                action.group().order()
            )));
        }
        for (g, u) in unitaries.iter().enumerate() {
            check_square(u, self.dim, || format!("unitary for element {g}"))?;
        }
        self.action = Some(action);
        self.unitaries = Some(unitaries);
        Ok(self)
    }

    /// Attaches the trivial group with `u = I`.
    pub fn with_trivial_action(self) -> Self {
        let action = Arc::new(GaugeAction::trivial(Arc::clone(&self.graph)));
        let id = CMatrix::identity(self.dim, self.dim);
        self.with_covariance(action, vec![id]).expect("trivial action fits")
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn action(&self) -> Option<&Arc<GaugeAction>> {
        self.action.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn proj(&self, v: usize) -> &CMatrix {
        &self.proj[v]
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.proj
    }

    pub fn edge_op(&self, e: usize) -> &CMatrix {
        &self.edge_op[e]
    }

    pub fn edge_ops(&self) -> &[CMatrix] {
        &self.edge_op
    }

    pub fn unitaries(&self) -> Option<&[CMatrix]> {
        self.unitaries.as_deref()
    }

    pub fn proj_of(&self, v: &str) -> Result<&CMatrix> {
        Ok(&self.proj[self.graph.vertex(v)?])
    }

    pub fn edge_op_of(&self, e: &str) -> Result<&CMatrix> {
        Ok(&self.edge_op[self.graph.edge_ix(e)?])
    }

    fn require_covariance(&self) -> Result<(&Arc<GaugeAction>, &[CMatrix])> {
        match (&self.action, &self.unitaries) {
            (Some(a), Some(u)) => Ok((a, u)),
            (None, _) => Err(Error::Configuration("representation has no gauge action".into())),
            (Some(_), None) => Err(Error::Configuration(
                "representation has no implementing unitaries".into(),
            )),
        }
    }

    /// `t(x) = Σ_e x(e)·t(δ_e)`.
    pub fn apply_t(&self, x: &CorrElement) -> Result<CMatrix> {
        same_graph(&self.graph, x.graph())?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (e, z) in x.support() {
            out += &self.edge_op[e] * z;
        }
        Ok(out)
    }

    /// `ρ(c) = Σ_v c(v)·ρ(δ_v)`.
    pub fn apply_rho(&self, c: &CoeffElement) -> Result<CMatrix> {
        same_graph(&self.graph, c.graph())?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (v, &z) in c.coeffs().iter().enumerate() {
            if z != C64::new(0.0, 0.0) {
                out += &self.proj[v] * z;
            }
        }
        Ok(out)
    }

    /// `t(α_g δ_e)`.
    pub(crate) fn transformed_edge_op(&self, action: &GaugeAction, g: usize, e: usize) -> CMatrix {
        let column = action.edge_map(g).column(e);
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (f, &z) in column.iter().enumerate() {
            if z != C64::new(0.0, 0.0) {
                out += &self.edge_op[f] * z;
            }
        }
        out
    }

    /// `B*·X·B` for every operator, with `B` an isometry `C^k → H`.
    ///
    /// This is the restriction to `range(B)` when that range reduces the
    /// representation.
    pub fn compress(&self, basis: &CMatrix) -> Result<GraphRep> {
        if basis.nrows() != self.dim {
            return Err(Error::Dimension(format!(
                "isometry into C^{} used on a representation of dimension {}",
                basis.nrows(),
                self.dim
            )));
        }
        let adj = basis.adjoint();
        let squeeze = |m: &CMatrix| &adj * m * basis;
        Ok(GraphRep {
            graph: Arc::clone(&self.graph),
            action: self.action.clone(),
            dim: basis.ncols(),
            proj: self.proj.iter().map(squeeze).collect(),
            edge_op: self.edge_op.iter().map(squeeze).collect(),
            unitaries: self
                .unitaries
                .as_ref()
                .map(|us| us.iter().map(squeeze).collect()),
        })
    }

    pub(crate) fn from_parts(
        graph: Arc<DirectedGraph>,
        action: Option<Arc<GaugeAction>>,
        dim: usize,
        proj: Vec<CMatrix>,
        edge_op: Vec<CMatrix>,
        unitaries: Option<Vec<CMatrix>>,
    ) -> GraphRep {
        GraphRep {
            graph,
            action,
            dim,
            proj,
            edge_op,
            unitaries,
        }
    }
}

/// One named defect measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectCheck {
    pub name: String,
    pub defect: f64,
    pub threshold: f64,
}

impl DefectCheck {
    pub fn new(name: impl Into<String>, defect: f64, threshold: f64) -> Self {
        DefectCheck {
            name: name.into(),
            defect,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.defect <= self.threshold
    }
}

/// A list of defect measurements; passes iff every check does.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DefectReport {
    pub checks: Vec<DefectCheck>,
}

impl DefectReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(DefectCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&DefectCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn defect(&self, name: &str) -> Option<f64> {
        self.get(name).map(|c| c.defect)
    }
}

impl fmt::Display for DefectReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<24} {:>12.3e}  (≤ {:.1e})  {}",
                c.name,
                c.defect,
                c.threshold,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Structural validation: projections, their orthogonality and sum, module
/// covariance of the edge operators, and (when present) unitarity and
/// multiplicativity of `u`.
pub fn validate(rep: &GraphRep, tol: &Tolerance) -> Result<DefectReport> {
    let n = rep.dim;
    let id = CMatrix::identity(n, n);
    let mut projection: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    let mut sum = CMatrix::zeros(n, n);
    for (v, p) in rep.proj.iter().enumerate() {
        projection = projection
            .max(op_norm(&(p - p.adjoint())))
            .max(op_norm(&(p * p - p)));
        for q in &rep.proj[v + 1..] {
            orthogonality = orthogonality.max(op_norm(&(p * q)));
        }
        sum += p;
    }
    let nondegeneracy = op_norm(&(sum - &id));

    let mut module: f64 = 0.0;
    for (e, t) in rep.edge_op.iter().enumerate() {
        let edge = rep.graph.edge(e);
        module = module
            .max(op_norm(&(&rep.proj[edge.dst] * t - t)))
            .max(op_norm(&(t * &rep.proj[edge.src] - t)));
    }

    let mut checks = vec![
        DefectCheck::new("projection", projection, tol.eps),
        DefectCheck::new("orthogonality", orthogonality, tol.eps),
        DefectCheck::new("non-degeneracy", nondegeneracy, tol.eps),
        DefectCheck::new("module covariance", module, tol.eps),
    ];

    if let (Some(action), Some(us)) = (&rep.action, &rep.unitaries) {
        let group = action.group();
        let mut unitary: f64 = 0.0;
        for u in us {
            unitary = unitary
                .max(op_norm(&(u.adjoint() * u - &id)))
                .max(op_norm(&(u * u.adjoint() - &id)));
        }
        let mut mult: f64 = 0.0;
        for g in 0..group.order() {
            for h in 0..group.order() {
                mult = mult.max(op_norm(&(&us[g] * &us[h] - &us[group.mul(g, h)])));
            }
        }
        checks.push(DefectCheck::new("unitary", unitary, tol.eps));
        checks.push(DefectCheck::new("multiplicativity", mult, tol.eps));
    }
    Ok(DefectReport { checks })
}

/// Row-contraction data at one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct RowContraction {
    pub vertex: usize,
    /// Largest eigenvalue of `[t(e)*t(f)] − ⊕_e ρ(δ_{s(e)})` over `e, f ∈ r^{-1}(v)`.
    pub margin: f64,
    /// Smallest eigenvalue of `ρ(δ_v) − Σ_e t(e)t(e)*`.
    pub coisometric_gap: f64,
    pub passed: bool,
}

/// Checks, at each vertex with a nonempty range fiber, that the block matrix
/// `[t(e)*t(f)]_{e,f ∈ r^{-1}(v)}` is dominated by `⊕_e ρ(δ_{s(e)})`.
///
/// A vertex passes when the margin is at most `tol.eig_clip`.
pub fn row_contraction_check(rep: &GraphRep, tol: &Tolerance) -> Vec<RowContraction> {
    let n = rep.dim;
    let mut out = Vec::new();
    for v in 0..rep.graph.vertex_count() {
        let fiber = rep.graph.fiber(v);
        if fiber.is_empty() {
            continue;
        }
        let k = fiber.len();
        let mut block = CMatrix::zeros(k * n, k * n);
        for (i, &e) in fiber.iter().enumerate() {
            let te_adj = rep.edge_op[e].adjoint();
            for (j, &f) in fiber.iter().enumerate() {
                let mut entry = &te_adj * &rep.edge_op[f];
                if i == j {
                    entry -= &rep.proj[rep.graph.edge(e).src];
                }
                block.view_mut((i * n, j * n), (n, n)).copy_from(&entry);
            }
        }
        let margin = eig_extremes(&block).1;
        let mut gap = rep.proj[v].clone();
        for &e in fiber {
            gap -= &rep.edge_op[e] * rep.edge_op[e].adjoint();
        }
        let coisometric_gap = eig_extremes(&gap).0;
        out.push(RowContraction {
            vertex: v,
            margin,
            coisometric_gap,
            passed: margin <= tol.eig_clip,
        });
    }
    out
}

/// Whether every vertex passes [`row_contraction_check`].
pub fn is_completely_contractive(rep: &GraphRep, tol: &Tolerance) -> bool {
    row_contraction_check(rep, tol).iter().all(|r| r.passed)
}

fn toeplitz_terms(rep: &GraphRep) -> impl Iterator<Item = CMatrix> + '_ {
    let ne = rep.graph.edge_count();
    (0..ne).flat_map(move |e| {
        (0..ne).map(move |f| {
            let mut d = rep.edge_op[e].adjoint() * &rep.edge_op[f];
            if e == f {
                d -= &rep.proj[rep.graph.edge(e).src];
            }
            d
        })
    })
}

/// `max_{e,f} ‖t(δ_e)*t(δ_f) − ρ(⟨δ_e, δ_f⟩)‖`.
pub fn toeplitz_defect(rep: &GraphRep) -> f64 {
    toeplitz_terms(rep).map(|d| op_norm(&d)).fold(0.0, f64::max)
}

/// Toeplitz defect compressed to `range(embed)`: `max ‖E*(t_e*t_f − ρ(⟨e,f⟩))E‖`.
pub fn compressed_toeplitz_defect(rep: &GraphRep, embed: &CMatrix) -> f64 {
    let adj = embed.adjoint();
    toeplitz_terms(rep)
        .map(|d| op_norm(&(&adj * d * embed)))
        .fold(0.0, f64::max)
}

fn ck_terms(rep: &GraphRep) -> impl Iterator<Item = CMatrix> + '_ {
    rep.graph.finite_receiver_indices().into_iter().map(move |v| {
        let mut d = rep.proj[v].clone();
        for &e in rep.graph.fiber(v) {
            d -= &rep.edge_op[e] * rep.edge_op[e].adjoint();
        }
        d
    })
}

/// `max_{v ∈ V_fin} ‖ρ(δ_v) − Σ_{e ∈ r^{-1}(v)} t(δ_e)t(δ_e)*‖`.
///
/// Vertices outside `V_fin` (sources and truncated vertices) impose nothing.
pub fn ck_defect(rep: &GraphRep) -> f64 {
    ck_terms(rep).map(|d| op_norm(&d)).fold(0.0, f64::max)
}

/// Cuntz–Krieger defect compressed to `range(embed)`.
pub fn compressed_ck_defect(rep: &GraphRep, embed: &CMatrix) -> f64 {
    let adj = embed.adjoint();
    ck_terms(rep)
        .map(|d| op_norm(&(&adj * d * embed)))
        .fold(0.0, f64::max)
}

/// `max_{g,e,v}` of `‖u(g)t(δ_e) − t(α_g δ_e)u(g)‖` and `‖u(g)ρ(δ_v) − ρ(δ_{α_g v})u(g)‖`.
pub fn covariance_defect(rep: &GraphRep) -> Result<f64> {
    let (action, us) = rep.require_covariance()?;
    let mut worst: f64 = 0.0;
    for (g, u) in us.iter().enumerate() {
        for e in 0..rep.graph.edge_count() {
            let lhs = u * &rep.edge_op[e];
            let rhs = rep.transformed_edge_op(action, g, e) * u;
            worst = worst.max(op_norm(&(lhs - rhs)));
        }
        for v in 0..rep.graph.vertex_count() {
            let lhs = u * &rep.proj[v];
            let rhs = &rep.proj[action.vertex_image(g, v)] * u;
            worst = worst.max(op_norm(&(lhs - rhs)));
        }
    }
    Ok(worst)
}

/// `ψ_t(Σ θ_{x,y}) = Σ t(x)t(y)*`.
pub fn psi_t(rep: &GraphRep, k: &FiniteRankOp) -> Result<CMatrix> {
    same_graph(&rep.graph, k.graph())?;
    let mut out = CMatrix::zeros(rep.dim, rep.dim);
    for (x, y) in k.terms() {
        out += rep.apply_t(x)? * rep.apply_t(y)?.adjoint();
    }
    Ok(out)
}

/// The regular representation induced by `rep` along the action: on
/// `ℓ²(G) ⊗ H` (blocks in table order),
///
/// * `ρ'(δ_v) = ⊕_g ρ(δ_{α_{g⁻¹} v})`,
/// * `t'(δ_e) = ⊕_g t(α_{g⁻¹} δ_e)`,
/// * `u'(s)` moves block `s⁻¹g` to block `g`.
///
/// The result is covariant by construction and its identity block is `rep`.
pub fn induced_regular_rep(
    rep: &GraphRep,
    action: &Arc<GaugeAction>,
    tol: &Tolerance,
) -> Result<GraphRep> {
    same_graph(&rep.graph, action.graph())?;
    let group = action.group();
    let n = group.order();
    let d = rep.dim;
    let big = d * n;
    tol.check_dim(big)?;

    let block_diag = |blocks: Vec<CMatrix>| -> CMatrix {
        let mut out = CMatrix::zeros(big, big);
        for (g, b) in blocks.iter().enumerate() {
            out.view_mut((g * d, g * d), (d, d)).copy_from(b);
        }
        out
    };

    let proj = (0..rep.graph.vertex_count())
        .map(|v| {
            block_diag(
                (0..n)
                    .map(|g| rep.proj[action.vertex_image(group.inv(g), v)].clone())
                    .collect(),
            )
        })
        .collect();
    let edge_op = (0..rep.graph.edge_count())
        .map(|e| {
            block_diag(
                (0..n)
                    .map(|g| rep.transformed_edge_op(action, group.inv(g), e))
                    .collect(),
            )
        })
        .collect();
    let unitaries = (0..n)
        .map(|s| {
            let mut u = CMatrix::zeros(big, big);
            let s_inv = group.inv(s);
            for g in 0..n {
                let src = group.mul(s_inv, g);
                u.view_mut((g * d, src * d), (d, d))
                    .copy_from(&CMatrix::identity(d, d));
            }
            u
        })
        .collect();
    Ok(GraphRep::from_parts(
        Arc::clone(&rep.graph),
        Some(Arc::clone(action)),
        big,
        proj,
        edge_op,
        Some(unitaries),
    ))
}

/// Isometry onto the identity block of an induced representation.
pub fn induced_identity_block(dim: usize, action: &GaugeAction) -> CMatrix {
    let n = action.group().order();
    let e = action.group().identity();
    let mut b = CMatrix::zeros(dim * n, dim);
    b.view_mut((e * dim, 0), (dim, dim))
        .copy_from(&CMatrix::identity(dim, dim));
    b
}

/// `Σ_s t(f(s))·u(s)` for a finitely supported `f: G → X`.
pub fn integrated_form(rep: &GraphRep, f: &[(usize, CorrElement)]) -> Result<CMatrix> {
    let (action, us) = rep.require_covariance()?;
    let mut out = CMatrix::zeros(rep.dim, rep.dim);
    for (s, x) in f {
        if *s >= action.group().order() {
            return Err(Error::Lookup {
                kind: "group element",
                id: s.to_string(),
            });
        }
        out += rep.apply_t(x)? * &us[*s];
    }
    Ok(out)
}

/// Distance (Frobenius) from `m` to `span{ρ(δ_v)·u(s)}`.
///
/// Membership is necessary, not sufficient, for `m` to come from the
/// crossed product of the coefficient algebra.
pub fn coefficient_crossed_residual(rep: &GraphRep, m: &CMatrix, tol: &Tolerance) -> Result<f64> {
    let (_, us) = rep.require_covariance()?;
    let spanning: Vec<CMatrix> = us
        .iter()
        .flat_map(|u| rep.proj.iter().map(move |p| p * u))
        .collect();
    span_residual(m, &spanning, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// `N×N` truncated forward shift `e_i ↦ e_{i+1}`, `e_{N−1} ↦ 0`.
    Truncated,
    /// `N×N` cyclic permutation `e_i ↦ e_{i+1 mod N}`.
    Cyclic,
}

/// Tensors every edge operator with an `N×N` shift; projections and
/// unitaries are tensored with `I_N`.
pub fn shift_ampliation(rep: &GraphRep, n: usize, mode: ShiftMode) -> Result<GraphRep> {
    if n < 2 {
        return Err(Error::Configuration(format!("shift size must be at least 2, got {n}")));
    }
    let mut shift = CMatrix::zeros(n, n);
    for i in 0..n - 1 {
        shift[(i + 1, i)] = C64::new(1.0, 0.0);
    }
    if mode == ShiftMode::Cyclic {
        shift[(0, n - 1)] = C64::new(1.0, 0.0);
    }
    let id = CMatrix::identity(n, n);
    Ok(GraphRep::from_parts(
        Arc::clone(&rep.graph),
        rep.action.clone(),
        rep.dim * n,
        rep.proj.iter().map(|p| p.kronecker(&id)).collect(),
        rep.edge_op.iter().map(|t| t.kronecker(&shift)).collect(),
        rep.unitaries
            .as_ref()
            .map(|us| us.iter().map(|u| u.kronecker(&id)).collect()),
    ))
}

/// `A ⊕ B` representation-wise helper used by tests and examples.
pub fn direct_sum_rep(a: &GraphRep, b: &GraphRep) -> Result<GraphRep> {
    same_graph(&a.graph, &b.graph)?;
    let zip = |x: &[CMatrix], y: &[CMatrix]| -> Vec<CMatrix> {
        x.iter().zip(y).map(|(p, q)| direct_sum(p, q)).collect()
    };
    GraphRep::new(
        Arc::clone(&a.graph),
        a.dim + b.dim,
        zip(&a.proj, &b.proj),
        zip(&a.edge_op, &b.edge_op),
    )
}
