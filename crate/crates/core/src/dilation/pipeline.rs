use super::steps::{minimal_reduce, one_step_ck, one_step_isometric, require_completely_contractive};
use super::{DilationStep, StepKind};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Subspace, Tolerance};
use crate::representation::{
    ck_defect, compressed_ck_defect, compressed_toeplitz_defect, covariance_defect,
    toeplitz_defect, GraphRep,
};

/// Defects recorded after one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub round: usize,
    pub kind: StepKind,
    pub new_dim: usize,
    pub toeplitz_defect: f64,
    pub ck_defect: f64,
    /// `None` when the representation carries no unitaries.
    pub covariance_defect: Option<f64>,
    /// Toeplitz defect compressed to the space the current round started from.
    pub compressed_toeplitz: f64,
    /// Cuntz–Krieger defect compressed to the same space.
    pub compressed_ck: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub stages: Vec<StageRecord>,
    pub rounds: usize,
    pub converged: bool,
    pub final_rep: GraphRep,
    /// Isometry from the original space into the final one.
    pub embed: CMatrix,
    /// Set when a step would have exceeded `max_dim`; the report then holds
    /// everything computed before the cap.
    pub resource_limit: Option<String>,
}

impl PipelineReport {
    fn start(rep: &GraphRep) -> Self {
        PipelineReport {
            stages: Vec::new(),
            rounds: 0,
            converged: false,
            final_rep: rep.clone(),
            embed: CMatrix::identity(rep.dim(), rep.dim()),
            resource_limit: None,
        }
    }

    pub fn final_dim(&self) -> usize {
        self.final_rep.dim()
    }

    pub fn last(&self) -> Option<&StageRecord> {
        self.stages.last()
    }
}

fn record(round: usize, step: &DilationStep, round_embed: &CMatrix) -> StageRecord {
    let rep = &step.rep_after;
    StageRecord {
        round,
        kind: step.kind,
        new_dim: step.new_dim,
        toeplitz_defect: toeplitz_defect(rep),
        ck_defect: ck_defect(rep),
        covariance_defect: covariance_defect(rep).ok(),
        compressed_toeplitz: compressed_toeplitz_defect(rep, round_embed),
        compressed_ck: compressed_ck_defect(rep, round_embed),
    }
}

/// Runs a step, turning a dimension cap into `Ok(None)`.
fn capped(
    report: &mut PipelineReport,
    step: Result<DilationStep>,
) -> Result<Option<DilationStep>> {
    match step {
        Ok(s) => Ok(Some(s)),
        Err(err @ Error::ResourceCap { .. }) => {
            report.resource_limit = Some(err.to_string());
            Ok(None)
        }
        Err(err) => Err(err),
    }
}

/// `n_steps` isometric steps followed by compression to the smallest reducing
/// subspace containing the original space: the minimal isometric
/// coextension up to level `n_steps`.
///
/// `converged` reports whether the compressed Toeplitz defect on the original
/// space is within `tol.eps`.
pub fn iterate_coextension(rep: &GraphRep, n_steps: usize, tol: &Tolerance) -> Result<PipelineReport> {
    require_completely_contractive(rep, tol)?;
    let mut report = PipelineReport::start(rep);
    let mut cur = rep.clone();
    for round in 1..=n_steps {
        let Some(step) = capped(&mut report, one_step_isometric(&cur, tol))? else {
            return Ok(report);
        };
        report.embed = &step.embed * &report.embed;
        report.stages.push(record(round, &step, &step.embed));
        report.rounds = round;
        cur = step.rep_after;
        report.final_rep = cur.clone();
    }
    let seed = Subspace::from_orthonormal_unchecked(cur.dim(), report.embed.clone());
    let reduced = minimal_reduce(&cur, &seed, tol)?;
    report.embed = reduced.embed.clone();
    report
        .stages
        .push(record(report.rounds, &reduced, &reduced.embed));
    report.final_rep = reduced.rep_after;
    report.converged = compressed_toeplitz_defect(&report.final_rep, &report.embed) <= tol.eps;
    Ok(report)
}

/// [`cp_dilate_with`] with one coextension step per round.
pub fn cp_dilate(rep: &GraphRep, max_rounds: usize, tol: &Tolerance) -> Result<PipelineReport> {
    cp_dilate_with(rep, max_rounds, 1, tol)
}

/// Alternates a Cuntz–Krieger step with `coext_steps` isometric steps.
///
/// After each round the Toeplitz and Cuntz–Krieger defects are measured on
/// the space the round started from; the pipeline stops once both are within
/// `tol.eps`. A representation that already satisfies both relations exactly
/// converges after zero rounds.
pub fn cp_dilate_with(
    rep: &GraphRep,
    max_rounds: usize,
    coext_steps: usize,
    tol: &Tolerance,
) -> Result<PipelineReport> {
    require_completely_contractive(rep, tol)?;
    let mut report = PipelineReport::start(rep);
    if toeplitz_defect(rep) <= tol.eps && ck_defect(rep) <= tol.eps {
        report.converged = true;
        return Ok(report);
    }
    let mut cur = rep.clone();
    for round in 1..=max_rounds {
        let Some(ck) = capped(&mut report, one_step_ck(&cur, tol))? else {
            return Ok(report);
        };
        let mut round_embed = ck.embed.clone();
        report.stages.push(record(round, &ck, &round_embed));
        let mut next = ck.rep_after;
        for _ in 0..coext_steps {
            let Some(iso) = capped(&mut report, one_step_isometric(&next, tol))? else {
                return Ok(report);
            };
            round_embed = &iso.embed * &round_embed;
            report.stages.push(record(round, &iso, &round_embed));
            next = iso.rep_after;
        }
        report.embed = &round_embed * &report.embed;
        report.rounds = round;
        cur = next;
        report.final_rep = cur.clone();
        let last = report.stages.last().expect("round pushed a stage");
        if last.compressed_toeplitz <= tol.eps && last.compressed_ck <= tol.eps {
            report.converged = true;
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use crate::linalg::{op_norm, real_matrix};
    use std::sync::Arc;

    #[test]
    fn zero_cuntz_rep_converges_in_one_round() {
        let tol = Tolerance::default();
        let rep = GraphRep::zero(Arc::new(DirectedGraph::cuntz(2)), &[1]).unwrap();
        let report = cp_dilate(&rep, 5, &tol).unwrap();
        assert!(report.converged);
        assert_eq!(report.rounds, 1);
        let last = report.last().unwrap();
        assert!(last.compressed_ck <= 1e-8 && last.compressed_toeplitz <= 1e-8);
        let e = &report.embed;
        let k = e.adjoint() * e;
        assert!(op_norm(&(k - CMatrix::identity(1, 1))) < 1e-12);
    }

    #[test]
    fn already_ck_toeplitz_rep_needs_no_rounds() {
        let tol = Tolerance::default();
        let g = Arc::new(DirectedGraph::cuntz(1));
        let rep = GraphRep::new(g, 1, vec![real_matrix(1, 1, &[1.0])], vec![real_matrix(1, 1, &[1.0])])
            .unwrap();
        let report = cp_dilate(&rep, 3, &tol).unwrap();
        assert!(report.converged);
        assert_eq!(report.rounds, 0);
        assert!(report.stages.is_empty());
    }

    #[test]
    fn cap_yields_partial_report() {
        let tol = Tolerance::new(1e-8, 1e-10, 4).unwrap();
        let rep = GraphRep::zero(Arc::new(DirectedGraph::cuntz(2)), &[1]).unwrap();
        let report = cp_dilate(&rep, 5, &tol).unwrap();
        assert!(!report.converged);
        assert!(report.resource_limit.is_some());
        assert_eq!(report.stages.len(), 1);
    }

    #[test]
    fn coextension_of_single_loop() {
        let tol = Tolerance::default();
        let g = Arc::new(DirectedGraph::cuntz(1));
        let rep = GraphRep::new(g, 1, vec![real_matrix(1, 1, &[1.0])], vec![real_matrix(1, 1, &[0.5])])
            .unwrap();
        let report = iterate_coextension(&rep, 3, &tol).unwrap();
        assert!(report.converged);
        assert_eq!(report.final_dim(), 4);
        assert_eq!(report.stages.last().unwrap().kind, StepKind::Compression);
    }
}
