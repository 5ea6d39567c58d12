use std::sync::Arc;

use super::{DilationStep, StepKind};
use crate::error::{Error, Result};
use crate::linalg::{
    defect_sqrt, direct_sum, op_norm, orthonormal_closure, projection_range_basis, psd_sqrt,
    CMatrix, Subspace, Tolerance, C64,
};
use crate::representation::{row_contraction_check, DefectCheck, DefectReport, GraphRep};

pub(crate) fn require_completely_contractive(rep: &GraphRep, tol: &Tolerance) -> Result<()> {
    let failures: Vec<String> = row_contraction_check(rep, tol)
        .into_iter()
        .filter(|r| !r.passed)
        .map(|r| format!("`{}` (margin {:.3e})", rep.graph().vertex_id(r.vertex), r.margin))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "row contraction fails at {}",
            failures.join(", ")
        )))
    }
}

/// Orthonormal bases of `H_v = range ρ(δ_v)`.
fn vertex_bases(rep: &GraphRep) -> Vec<CMatrix> {
    rep.projections().iter().map(projection_range_basis).collect()
}

fn identity_block(m: &mut CMatrix, offset: usize, size: usize) {
    for i in offset..offset + size {
        m[(i, i)] = C64::new(1.0, 0.0);
    }
}

/// One isometric dilation step on `H_1 = H ⊕ H^X`.
///
/// `H^X = X ⊗_ρ H` is realised as `⊕_e H_{s(e)}` in edge order: since
/// `⟨δ_e, δ_f⟩ = δ_{e,f} δ_{s(e)}`, the vector `δ_e ⊗ h` only depends on
/// `ρ(δ_{s(e)})h`. With `t̃(δ_e ⊗ h) = t(δ_e)h` and `σ(ξ)h = ξ ⊗ h`,
///
/// ```text
/// t_1(ξ) = [ t(ξ)                 0 ]     ρ_1(c) = ρ(c) ⊕ ρ̃(c)
///          [ (I − t̃*t̃)^{1/2} σ(ξ)  0 ]     u_1(g) = u(g) ⊕ ũ(g)
/// ```
///
/// where `ρ̃(c)(ξ ⊗ h) = φ_X(c)ξ ⊗ h` and `ũ(g)(ξ ⊗ h) = α_g(ξ) ⊗ u(g)h`.
pub fn one_step_isometric(rep: &GraphRep, tol: &Tolerance) -> Result<DilationStep> {
    require_completely_contractive(rep, tol)?;
    let graph = rep.graph();
    let n = rep.dim();
    let bases = vertex_bases(rep);

    let mut offsets = Vec::with_capacity(graph.edge_count());
    let mut extra = 0;
    for e in graph.edges() {
        offsets.push(extra);
        extra += bases[e.src].ncols();
    }
    let total = n + extra;
    tol.check_dim(total)?;
    let size = |e: usize| bases[graph.edge(e).src].ncols();

    let mut t_tilde = CMatrix::zeros(n, extra);
    for (e, edge) in graph.edges().iter().enumerate() {
        t_tilde
            .view_mut((0, offsets[e]), (n, size(e)))
            .copy_from(&(rep.edge_op(e) * &bases[edge.src]));
    }
    let defect = defect_sqrt(&t_tilde, tol).map_err(|err| match err {
        Error::Contractivity { norm } => {
            Error::Precondition(format!("t̃ has norm {norm}, not a contraction"))
        }
        other => other,
    })?;

    let edge_op = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut t1 = CMatrix::zeros(total, total);
            t1.view_mut((0, 0), (n, n)).copy_from(rep.edge_op(e));
            let lower = defect.columns(offsets[e], size(e)) * bases[edge.src].adjoint();
            t1.view_mut((n, 0), (extra, n)).copy_from(&lower);
            t1
        })
        .collect();

    let proj = (0..graph.vertex_count())
        .map(|v| {
            let mut tilde = CMatrix::zeros(extra, extra);
            for (e, edge) in graph.edges().iter().enumerate() {
                if edge.dst == v {
                    identity_block(&mut tilde, offsets[e], size(e));
                }
            }
            direct_sum(rep.proj(v), &tilde)
        })
        .collect();

    let unitaries = match (rep.action(), rep.unitaries()) {
        (Some(action), Some(us)) => Some(
            us.iter()
                .enumerate()
                .map(|(g, u)| {
                    let map = action.edge_map(g);
                    let mut tilde = CMatrix::zeros(extra, extra);
                    for (e, ee) in graph.edges().iter().enumerate() {
                        for (f, ef) in graph.edges().iter().enumerate() {
                            let z = map[(f, e)];
                            if z == C64::new(0.0, 0.0) {
                                continue;
                            }
                            let block = bases[ef.src].adjoint() * u * &bases[ee.src] * z;
                            tilde
                                .view_mut((offsets[f], offsets[e]), (size(f), size(e)))
                                .copy_from(&block);
                        }
                    }
                    direct_sum(u, &tilde)
                })
                .collect(),
        ),
        _ => None,
    };

    Ok(DilationStep {
        kind: StepKind::Isometric,
        old_dim: n,
        new_dim: total,
        embed: CMatrix::identity(total, n),
        rep_after: GraphRep::from_parts(
            Arc::clone(graph),
            rep.action().cloned(),
            total,
            proj,
            edge_op,
            unitaries,
        ),
        subspace: None,
    })
}

/// One Cuntz–Krieger dilation step.
///
/// For `v ∈ V_fin` let `Δ_v = |r^{-1}(v)|^{-1/2} (ρ(δ_v) − Σ_{e ∈ r^{-1}(v)} t(e)t(e)*)^{1/2}`.
/// The new space adds, for every edge `e` with `r(e) ∈ V_fin` (edge order),
/// a copy of `H_{r(e)}`; the copies for `e ∈ E(v, w)` form
/// `H_{v,w} = H_v ⊗ [E(v, w)]` and belong to `ρ_1(δ_w)`. Then
///
/// * `t_1(δ_e) = [t(δ_e)  Δ_v τ(e)]` where `τ(e)` maps the copy for `e`
///   identically onto `H_v`;
/// * `u_1(g)` acts on the copies by `h ⊗ ξ ↦ u(g)h ⊗ ᾱ_g(ξ)`, the entrywise
///   conjugate of the edge matrix, because the copies feed the domain of `t`.
///
/// Edges into vertices outside `V_fin` keep `t_1(e) = t(e)`.
pub fn one_step_ck(rep: &GraphRep, tol: &Tolerance) -> Result<DilationStep> {
    require_completely_contractive(rep, tol)?;
    let graph = rep.graph();
    let n = rep.dim();
    let bases = vertex_bases(rep);

    // Row contraction was checked against eig_clip on the column side; the
    // coisometric gap may round slightly below that.
    let relaxed = Tolerance {
        eig_clip: tol.eig_clip.max(tol.eps),
        ..*tol
    };
    let mut deltas: Vec<Option<CMatrix>> = vec![None; graph.vertex_count()];
    for v in graph.finite_receiver_indices() {
        let fiber = graph.fiber(v);
        let mut gap = rep.proj(v).clone();
        for &e in fiber {
            gap -= rep.edge_op(e) * rep.edge_op(e).adjoint();
        }
        let root = psd_sqrt(&gap, &relaxed).map_err(|err| {
            Error::Precondition(format!(
                "ρ(δ_v) − Σ t t* is not positive at `{}`: {err}",
                graph.vertex_id(v)
            ))
        })?;
        deltas[v] = Some(root.unscale((fiber.len() as f64).sqrt()));
    }

    let mut copies: Vec<Option<(usize, usize)>> = vec![None; graph.edge_count()];
    let mut extra = 0;
    for (e, edge) in graph.edges().iter().enumerate() {
        if deltas[edge.dst].is_some() {
            let size = bases[edge.dst].ncols();
            copies[e] = Some((extra, size));
            extra += size;
        }
    }
    let total = n + extra;
    tol.check_dim(total)?;

    let edge_op = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut t1 = CMatrix::zeros(total, total);
            t1.view_mut((0, 0), (n, n)).copy_from(rep.edge_op(e));
            if let (Some((off, size)), Some(delta)) = (copies[e], &deltas[edge.dst]) {
                t1.view_mut((0, n + off), (n, size))
                    .copy_from(&(delta * &bases[edge.dst]));
            }
            t1
        })
        .collect();

    let proj = (0..graph.vertex_count())
        .map(|w| {
            let mut p = CMatrix::zeros(total, total);
            p.view_mut((0, 0), (n, n)).copy_from(rep.proj(w));
            for (e, edge) in graph.edges().iter().enumerate() {
                if let (true, Some((off, size))) = (edge.src == w, copies[e]) {
                    identity_block(&mut p, n + off, size);
                }
            }
            p
        })
        .collect();

    let unitaries = match (rep.action(), rep.unitaries()) {
        (Some(action), Some(us)) => {
            let mut out = Vec::with_capacity(us.len());
            for (g, u) in us.iter().enumerate() {
                let map = action.edge_map(g);
                let mut u1 = CMatrix::zeros(total, total);
                u1.view_mut((0, 0), (n, n)).copy_from(u);
                for (e, ee) in graph.edges().iter().enumerate() {
                    let Some((off_e, size_e)) = copies[e] else { continue };
                    for (f, ef) in graph.edges().iter().enumerate() {
                        let z = map[(f, e)];
                        if z == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let Some((off_f, size_f)) = copies[f] else {
                            return Err(Error::Precondition(format!(
                                "action moves edge `{}` into a vertex outside V_fin",
                                ee.id
                            )));
                        };
                        // The copies sit on the domain side of t(e), so the
                        // coefficient enters conjugated.
                        let block = bases[ef.dst].adjoint() * u * &bases[ee.dst] * z.conj();
                        u1.view_mut((n + off_f, n + off_e), (size_f, size_e))
                            .copy_from(&block);
                    }
                }
                out.push(u1);
            }
            Some(out)
        }
        _ => None,
    };

    Ok(DilationStep {
        kind: StepKind::CuntzKrieger,
        old_dim: n,
        new_dim: total,
        embed: CMatrix::identity(total, n),
        rep_after: GraphRep::from_parts(
            Arc::clone(graph),
            rep.action().cloned(),
            total,
            proj,
            edge_op,
            unitaries,
        ),
        subspace: None,
    })
}

/// Compresses `rep` to the smallest subspace containing `seed` that reduces
/// every `t(δ_e)`, `ρ(δ_v)` and `u(g)`.
pub fn minimal_reduce(rep: &GraphRep, seed: &Subspace, tol: &Tolerance) -> Result<DilationStep> {
    if seed.ambient_dim() != rep.dim() {
        return Err(Error::Dimension(format!(
            "seed lives in C^{}, representation in C^{}",
            seed.ambient_dim(),
            rep.dim()
        )));
    }
    let mut generators: Vec<CMatrix> = Vec::new();
    for t in rep.edge_ops() {
        generators.push(t.clone());
        generators.push(t.adjoint());
    }
    generators.extend(rep.projections().iter().cloned());
    if let Some(us) = rep.unitaries() {
        for u in us {
            generators.push(u.clone());
            generators.push(u.adjoint());
        }
    }
    let reduced = orthonormal_closure(rep.dim(), &seed.basis_vectors(), &generators, tol)?;
    let rep_after = rep.compress(reduced.basis())?;
    let embed = reduced.basis().adjoint() * seed.basis();
    Ok(DilationStep {
        kind: StepKind::Compression,
        old_dim: rep.dim(),
        new_dim: reduced.dim(),
        embed,
        rep_after,
        subspace: Some(reduced),
    })
}

/// Dilation contract of `after` over `before` along `embed`:
///
/// * `compression`: `max_e ‖E*·t_1(e)·E − t(e)‖`,
/// * `reducing projections`: `max_v ‖ρ_1(δ_v)·E − E·ρ(δ_v)‖`,
/// * `reducing unitaries`: `max_g ‖u_1(g)·E − E·u(g)‖` (when both carry unitaries),
/// * `isometric embedding`: `‖E*E − I‖`.
pub fn contract_defects(
    before: &GraphRep,
    after: &GraphRep,
    embed: &CMatrix,
    tol: &Tolerance,
) -> Result<DefectReport> {
    if embed.shape() != (after.dim(), before.dim()) {
        return Err(Error::Dimension(format!(
            "embedding is {}x{}, expected {}x{}",
            embed.nrows(),
            embed.ncols(),
            after.dim(),
            before.dim()
        )));
    }
    let adj = embed.adjoint();
    let compression = (0..before.graph().edge_count())
        .map(|e| op_norm(&(&adj * after.edge_op(e) * embed - before.edge_op(e))))
        .fold(0.0, f64::max);
    let reducing = (0..before.graph().vertex_count())
        .map(|v| op_norm(&(after.proj(v) * embed - embed * before.proj(v))))
        .fold(0.0, f64::max);
    let k = before.dim();
    let isometric = op_norm(&(&adj * embed - CMatrix::identity(k, k)));
    let mut checks = vec![
        DefectCheck::new("compression", compression, tol.eps),
        DefectCheck::new("reducing projections", reducing, tol.eps),
    ];
    if let (Some(ua), Some(ub)) = (after.unitaries(), before.unitaries()) {
        let d = ua
            .iter()
            .zip(ub)
            .map(|(a, b)| op_norm(&(a * embed - embed * b)))
            .fold(0.0, f64::max);
        checks.push(DefectCheck::new("reducing unitaries", d, tol.eps));
    }
    checks.push(DefectCheck::new("isometric embedding", isometric, tol.eps));
    Ok(DefectReport { checks })
}

/// `max_{e,f} ‖t_1(δ_e)*t_1(δ_f) − E·ρ(⟨δ_e, δ_f⟩)·E*‖` over the whole new space.
pub fn corner_identity_defect(before: &GraphRep, step: &DilationStep) -> f64 {
    let after = &step.rep_after;
    let graph = before.graph();
    let ne = graph.edge_count();
    let mut worst: f64 = 0.0;
    for e in 0..ne {
        let te_adj = after.edge_op(e).adjoint();
        for f in 0..ne {
            let mut d = &te_adj * after.edge_op(f);
            if e == f {
                d -= &step.embed * before.proj(graph.edge(e).src) * step.embed.adjoint();
            }
            worst = worst.max(op_norm(&d));
        }
    }
    worst
}

/// `max_{v ∈ V_fin} ‖E·ρ(δ_v)·E* − Σ_{e ∈ r^{-1}(v)} t_1(δ_e)t_1(δ_e)*‖`.
pub fn ck_step_defect(before: &GraphRep, step: &DilationStep) -> f64 {
    let after = &step.rep_after;
    let graph = before.graph();
    graph
        .finite_receiver_indices()
        .into_iter()
        .map(|v| {
            let mut d = &step.embed * before.proj(v) * step.embed.adjoint();
            for &e in graph.fiber(v) {
                d -= after.edge_op(e) * after.edge_op(e).adjoint();
            }
            op_norm(&d)
        })
        .fold(0.0, f64::max)
}
