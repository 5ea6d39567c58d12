//! Constructive dilations of completely contractive covariant
//! representations.
//!
//! * [`one_step_isometric`]: the Schäffer-type step on `H ⊕ H^X`, after which
//!   `t_1(ξ)*t_1(η) = ρ(⟨ξ, η⟩) ⊕ 0`.
//! * [`one_step_ck`]: the Cuntz–Krieger step, after which
//!   `Σ_{e ∈ r^{-1}(v)} t_1(e)t_1(e)* = ρ(δ_v)` for every `v ∈ V_fin`.
//! * [`minimal_reduce`]: compression to the smallest reducing subspace
//!   containing a seed.
//! * [`iterate_coextension`] and [`cp_dilate`]: finite-stage pipelines with
//!   per-stage defect records.
//! * [`moment_signature`]: the table of mixed moments that any two minimal
//!   coextensions must share.
//!
//! Every step returns a [`DilationStep`] whose `embed` is the isometry
//! carrying the old space into the new one.

mod moments;
mod pipeline;
mod steps;

pub use moments::{moment_signature, MomentKey, MomentTable};
pub use pipeline::{cp_dilate, cp_dilate_with, iterate_coextension, PipelineReport, StageRecord};
pub use steps::{
    ck_step_defect, contract_defects, corner_identity_defect, minimal_reduce, one_step_ck,
    one_step_isometric,
};

use crate::linalg::{CMatrix, Subspace};
use crate::representation::GraphRep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Isometric,
    CuntzKrieger,
    Compression,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Isometric => "isometric",
            StepKind::CuntzKrieger => "ck",
            StepKind::Compression => "compression",
        }
    }
}

/// Output of one dilation stage.
#[derive(Debug, Clone)]
pub struct DilationStep {
    pub kind: StepKind,
    pub old_dim: usize,
    pub new_dim: usize,
    /// Isometry `new_dim × k` identifying the old space inside the new one.
    /// For a compression `k` is the seed dimension and the columns are the
    /// seed vectors written in the reduced basis.
    pub embed: CMatrix,
    pub rep_after: GraphRep,
    /// For a compression: the reduced space inside the pre-compression space.
    pub subspace: Option<Subspace>,
}
