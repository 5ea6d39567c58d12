//! Command-line driver. [`run`] parses arguments, executes one subcommand
//! and returns the rendered report with its exit status, so the binary is a
//! thin wrapper and tests can call it directly.
//!
//! Exit statuses: 0 all checks pass, 1 a check failed, 2 input error,
//! 3 dimension cap reached.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dilation::{
    ck_step_defect, contract_defects, cp_dilate_with, iterate_coextension, one_step_ck,
    PipelineReport, StageRecord,
};
use crate::disc::{admissibility_gap, DEFAULT_DEGREE, DEFAULT_GRID};
use crate::error::Error;
use crate::linalg::{op_norm, CMatrix, Tolerance};
use crate::problem::Problem;
use crate::representation::{
    ck_defect, compressed_ck_defect, compressed_toeplitz_defect, covariance_defect,
    induced_identity_block, induced_regular_rep, is_completely_contractive, row_contraction_check,
    toeplitz_defect, validate, GraphRep,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "graph-dilation", version, about = "Dilations of covariant graph representations")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Defect tolerance.
    #[arg(long = "tol", global = true)]
    tol: Option<f64>,
    /// Eigenvalue clip for near-PSD matrices and Gram-Schmidt cutoff.
    #[arg(long = "eig-clip", global = true)]
    eig_clip: Option<f64>,
    /// Largest Hilbert-space dimension any step may create.
    #[arg(long = "max-dim", global = true)]
    max_dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Isometric,
    Ck,
    Cp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a problem file: graph, action, representation.
    Validate { file: PathBuf },
    /// Run a dilation pipeline.
    Dilate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Cp)]
        mode: Mode,
        /// Steps (isometric, ck) or maximal rounds (cp).
        #[arg(long)]
        steps: Option<usize>,
        /// Write the final representation here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induce the regular covariant representation.
    Induce {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The disc-algebra cover with no extension of the Möbius map.
    Counterexample {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_DEGREE)]
        degree: usize,
    },
}

/// One line of the check table. `passed == None` marks a value that is
/// reported but not judged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub passed: Option<bool>,
}

impl Check {
    fn bound(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured: Some(measured),
            threshold: Some(threshold),
            passed: Some(measured <= threshold),
        }
    }

    fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            measured: None,
            threshold: None,
            passed: Some(passed),
        }
    }

    fn info(name: impl Into<String>, measured: f64) -> Self {
        Check {
            name: name.into(),
            measured: Some(measured),
            threshold: None,
            passed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRow {
    pub round: usize,
    pub kind: &'static str,
    pub dim: usize,
    pub toeplitz: f64,
    pub ck: f64,
    pub covariance: Option<f64>,
    pub compressed_toeplitz: f64,
    pub compressed_ck: f64,
}

impl From<&StageRecord> for StageRow {
    fn from(r: &StageRecord) -> Self {
        StageRow {
            round: r.round,
            kind: r.kind.as_str(),
            dim: r.new_dim,
            toeplitz: r.toeplitz_defect,
            ck: r.ck_defect,
            covariance: r.covariance_defect,
            compressed_toeplitz: r.compressed_toeplitz,
            compressed_ck: r.compressed_ck,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub stages: Vec<StageRow>,
    pub notes: Vec<String>,
    pub exit: i32,
}

impl Report {
    fn new(command: String) -> Self {
        Report {
            command,
            checks: Vec::new(),
            stages: Vec::new(),
            notes: Vec::new(),
            exit: EXIT_PASS,
        }
    }

    /// Sets the exit status from the checks unless an earlier stage already
    /// decided it.
    fn settle(mut self) -> Self {
        if self.exit == EXIT_PASS && self.checks.iter().any(|c| c.passed == Some(false)) {
            self.exit = EXIT_CHECK_FAILED;
        }
        self
    }

    fn failed(command: String, err: &Error) -> Self {
        let mut r = Report::new(command);
        r.notes.push(format!("error: {err}"));
        r.exit = exit_code(err);
        r
    }

    pub fn passed(&self) -> bool {
        self.exit == EXIT_PASS
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Records => self.render_records(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.command).unwrap();
        let num = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0).max(5);
            writeln!(out, "{:width$}  {:>10}  {:>10}  status", "check", "measured", "threshold").unwrap();
            for c in &self.checks {
                let status = match c.passed {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "info",
                };
                writeln!(
                    out,
                    "{:width$}  {:>10}  {:>10}  {status}",
                    c.name,
                    num(c.measured),
                    num(c.threshold)
                )
                .unwrap();
            }
        }
        if !self.stages.is_empty() {
            writeln!(
                out,
                "{:>5}  {:<11}  {:>5}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
                "round", "stage", "dim", "toeplitz", "ck", "covariance", "corner-T", "corner-CK"
            )
            .unwrap();
            for s in &self.stages {
                writeln!(
                    out,
                    "{:>5}  {:<11}  {:>5}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
                    s.round,
                    s.kind,
                    s.dim,
                    num(Some(s.toeplitz)),
                    num(Some(s.ck)),
                    num(s.covariance),
                    num(Some(s.compressed_toeplitz)),
                    num(Some(s.compressed_ck))
                )
                .unwrap();
            }
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        let verdict = match self.exit {
            EXIT_PASS => "PASS",
            EXIT_CHECK_FAILED => "FAIL",
            EXIT_INPUT => "INPUT ERROR",
            _ => "RESOURCE LIMIT",
        };
        writeln!(out, "result: {verdict} (exit {})", self.exit).unwrap();
        out
    }

    fn render_records(&self) -> String {
        #[derive(Serialize)]
        #[serde(tag = "type", rename_all = "lowercase")]
        enum Record<'a> {
            Check(&'a Check),
            Stage(&'a StageRow),
            Note { text: &'a str },
            Result { command: &'a str, exit: i32, passed: bool },
        }
        let mut out = String::new();
        let mut line = |r: Record| {
            out.push_str(&serde_json::to_string(&r).expect("records serialize"));
            out.push('\n');
        };
        for c in &self.checks {
            line(Record::Check(c));
        }
        for s in &self.stages {
            line(Record::Stage(s));
        }
        for n in &self.notes {
            line(Record::Note { text: n });
        }
        line(Record::Result {
            command: &self.command,
            exit: self.exit,
            passed: self.passed(),
        });
        out
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ResourceCap { .. } => EXIT_RESOURCE,
        Error::Precondition(_) | Error::Contractivity { .. } | Error::Positivity { .. } => {
            EXIT_CHECK_FAILED
        }
        _ => EXIT_INPUT,
    }
}

/// Rendered output and exit status of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let exit = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            return Outcome {
                output: e.render().to_string(),
                exit,
            };
        }
    };
    let report = execute(&cli);
    Outcome {
        output: report.render(cli.opts.format),
        exit: report.exit,
    }
}

fn execute(cli: &Cli) -> Report {
    match &cli.command {
        Command::Validate { file } => with_problem(file, &cli.opts, |p, tol| cmd_validate(file, p, tol)),
        Command::Dilate {
            file,
            mode,
            steps,
            out,
        } => with_problem(file, &cli.opts, |p, tol| {
            cmd_dilate(file, p, *mode, *steps, out.as_deref(), tol)
        }),
        Command::Induce { file, out } => {
            with_problem(file, &cli.opts, |p, tol| cmd_induce(file, p, out.as_deref(), tol))
        }
        Command::Counterexample { grid, degree } => cmd_counterexample(*grid, *degree),
    }
}

/// Tolerance from defaults, then the file, then flags.
fn resolve_tolerance(problem: &Problem, opts: &GlobalOpts) -> Result<Tolerance, Error> {
    let base = problem.tolerance.apply(Tolerance::default())?;
    Tolerance::new(
        opts.tol.unwrap_or(base.eps),
        opts.eig_clip.unwrap_or(base.eig_clip),
        opts.max_dim.unwrap_or(base.max_dim),
    )
}

fn with_problem(
    file: &Path,
    opts: &GlobalOpts,
    f: impl FnOnce(&Problem, &Tolerance) -> Report,
) -> Report {
    let label = format!("load {}", file.display());
    let problem = match Problem::load(file) {
        Ok(p) => p,
        Err(e) => return Report::failed(label, &e),
    };
    match resolve_tolerance(&problem, opts) {
        Ok(tol) => f(&problem, &tol),
        Err(e) => Report::failed(label, &e),
    }
}

fn structural_checks(problem: &Problem, tol: &Tolerance, report: &mut Report) {
    let graph = &problem.graph;
    report.notes.push(format!(
        "graph: {} vertices, {} edges, V_fin = {{{}}}",
        graph.vertex_count(),
        graph.edge_count(),
        graph.finite_receivers().join(", ")
    ));
    let truncated = graph.truncated_ids();
    if !truncated.is_empty() {
        report.notes.push(format!(
            "truncated vertices {{{}}}: no Cuntz-Krieger condition imposed there",
            truncated.join(", ")
        ));
    }
    report.notes.push(format!(
        "hyperrigidity criterion (row-finite, no truncation sinks): {}",
        graph.satisfies_hyperrigidity_criterion()
    ));

    if let Some(action) = &problem.action {
        let group = action.group().verify();
        report.checks.push(Check::flag("group axioms", group.passed()));
        report.notes.extend(group.problems);
        let check = action.verify(tol);
        report.checks.push(Check::bound("action unitarity", check.unitary_defect, tol.eps));
        report.checks.push(Check::bound("action homomorphism", check.homomorphism_defect, tol.eps));
        report.checks.push(Check::bound("action identity", check.identity_defect, tol.eps));
        report.checks.push(Check::flag("action consistency", check.passed()));
        report.notes.extend(check.problems);
    }

    if let Some(rep) = &problem.representation {
        match validate(rep, tol) {
            Ok(r) => report.checks.extend(
                r.checks
                    .into_iter()
                    .map(|c| Check::bound(c.name, c.defect, c.threshold)),
            ),
            Err(e) => report.notes.push(format!("validation error: {e}")),
        }
        for rc in row_contraction_check(rep, tol) {
            report.checks.push(Check::bound(
                format!("row contraction `{}`", graph.vertex_id(rc.vertex)),
                rc.margin,
                tol.eig_clip,
            ));
        }
        if rep.unitaries().is_some() {
            if let Ok(d) = covariance_defect(rep) {
                report.checks.push(Check::bound("covariance", d, tol.eps));
            }
        }
        report.checks.push(Check::info("toeplitz defect", toeplitz_defect(rep)));
        report.checks.push(Check::info("ck defect", ck_defect(rep)));
    } else {
        report.notes.push("no representation block: graph-only report".into());
    }
}

fn cmd_validate(file: &Path, problem: &Problem, tol: &Tolerance) -> Report {
    let mut report = Report::new(format!("validate {}", file.display()));
    structural_checks(problem, tol, &mut report);
    report.settle()
}

fn require_rep<'a>(problem: &'a Problem, report: &mut Report) -> Option<&'a GraphRep> {
    if problem.representation.is_none() {
        report.notes.push("error: the file has no representation block".into());
        report.exit = EXIT_INPUT;
    }
    problem.representation.as_ref()
}

fn write_out(report: &mut Report, problem: &Problem, rep: GraphRep, out: Option<&Path>) {
    let Some(path) = out else { return };
    let mut p = Problem::from_rep(rep);
    p.tolerance = problem.tolerance;
    match p.save(path) {
        Ok(()) => report.notes.push(format!("wrote {}", path.display())),
        Err(e) => {
            report.notes.push(format!("error: {e}"));
            report.exit = EXIT_INPUT;
        }
    }
}

fn push_pipeline(report: &mut Report, pipeline: &PipelineReport) {
    report.stages.extend(pipeline.stages.iter().map(StageRow::from));
    if let Some(limit) = &pipeline.resource_limit {
        report.notes.push(format!("stopped: {limit}"));
        report.exit = EXIT_RESOURCE;
    }
}

fn cmd_dilate(
    file: &Path,
    problem: &Problem,
    mode: Mode,
    steps: Option<usize>,
    out: Option<&Path>,
    tol: &Tolerance,
) -> Report {
    let mode_name = format!("{mode:?}").to_lowercase();
    let steps_flag = steps.map(|n| format!(" --steps {n}")).unwrap_or_default();
    let mut report = Report::new(format!("dilate {} --mode {mode_name}{steps_flag}", file.display()));
    let Some(rep) = require_rep(problem, &mut report) else {
        return report;
    };
    let mut pre = Report::new(String::new());
    structural_checks(problem, tol, &mut pre);
    let pre = pre.settle();
    if !pre.passed() {
        report.checks = pre.checks;
        report.notes.extend(pre.notes);
        report.notes.push("input does not validate; nothing dilated".into());
        report.exit = EXIT_CHECK_FAILED;
        return report;
    }
    report.notes.extend(pre.notes.into_iter().filter(|n| n.starts_with("truncated")));

    let result = match mode {
        Mode::Isometric => dilate_isometric(rep, steps.unwrap_or(1), tol, &mut report),
        Mode::Ck => dilate_ck(rep, steps.unwrap_or(1), tol, &mut report),
        Mode::Cp => dilate_cp(rep, steps.unwrap_or(8), tol, &mut report),
    };
    match result {
        Ok(Some(final_rep)) => write_out(&mut report, problem, final_rep, out),
        Ok(None) => {}
        Err(e) => {
            report.notes.push(format!("error: {e}"));
            report.exit = exit_code(&e);
        }
    }
    report.settle()
}

fn dilate_isometric(
    rep: &GraphRep,
    steps: usize,
    tol: &Tolerance,
    report: &mut Report,
) -> Result<Option<GraphRep>, Error> {
    let pipeline = iterate_coextension(rep, steps, tol)?;
    push_pipeline(report, &pipeline);
    if pipeline.resource_limit.is_some() {
        return Ok(None);
    }
    for s in pipeline.stages.iter().filter(|s| s.kind.as_str() == "isometric") {
        report.checks.push(Check::bound(
            format!("stage {} corner toeplitz", s.round),
            s.compressed_toeplitz,
            tol.eps,
        ));
    }
    let contract = contract_defects(rep, &pipeline.final_rep, &pipeline.embed, tol)?;
    report.checks.extend(
        contract
            .checks
            .into_iter()
            .map(|c| Check::bound(format!("coextension {}", c.name), c.defect, c.threshold)),
    );
    report.notes.push(format!("minimal coextension has dimension {}", pipeline.final_dim()));
    Ok(Some(pipeline.final_rep))
}

fn dilate_ck(
    rep: &GraphRep,
    steps: usize,
    tol: &Tolerance,
    report: &mut Report,
) -> Result<Option<GraphRep>, Error> {
    let mut cur = rep.clone();
    let mut embed = CMatrix::identity(rep.dim(), rep.dim());
    for round in 1..=steps {
        let step = match one_step_ck(&cur, tol) {
            Ok(s) => s,
            Err(e @ Error::ResourceCap { .. }) => {
                report.notes.push(format!("stopped: {e}"));
                report.exit = EXIT_RESOURCE;
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let after = &step.rep_after;
        report.stages.push(StageRow {
            round,
            kind: step.kind.as_str(),
            dim: step.new_dim,
            toeplitz: toeplitz_defect(after),
            ck: ck_defect(after),
            covariance: covariance_defect(after).ok(),
            compressed_toeplitz: compressed_toeplitz_defect(after, &step.embed),
            compressed_ck: compressed_ck_defect(after, &step.embed),
        });
        report.checks.push(Check::bound(
            format!("step {round} ck corner"),
            ck_step_defect(&cur, &step),
            tol.eps,
        ));
        report.checks.push(Check::flag(
            format!("step {round} row contraction"),
            is_completely_contractive(after, tol),
        ));
        if let Some(d) = covariance_defect(after).ok().filter(|_| after.unitaries().is_some()) {
            report.checks.push(Check::bound(format!("step {round} covariance"), d, tol.eps));
        }
        embed = &step.embed * embed;
        cur = step.rep_after;
    }
    let contract = contract_defects(rep, &cur, &embed, tol)?;
    report.checks.extend(
        contract
            .checks
            .into_iter()
            .map(|c| Check::bound(format!("dilation {}", c.name), c.defect, c.threshold)),
    );
    Ok(Some(cur))
}

fn dilate_cp(
    rep: &GraphRep,
    rounds: usize,
    tol: &Tolerance,
    report: &mut Report,
) -> Result<Option<GraphRep>, Error> {
    let pipeline = cp_dilate_with(rep, rounds, 1, tol)?;
    push_pipeline(report, &pipeline);
    if pipeline.resource_limit.is_some() {
        return Ok(None);
    }
    report.checks.push(Check::flag(
        format!("converged after {} round(s)", pipeline.rounds),
        pipeline.converged,
    ));
    let fin = &pipeline.final_rep;
    report.checks.push(Check::bound(
        "original corner toeplitz",
        compressed_toeplitz_defect(fin, &pipeline.embed),
        tol.eps,
    ));
    report.checks.push(Check::bound(
        "original corner ck",
        compressed_ck_defect(fin, &pipeline.embed),
        tol.eps,
    ));
    let contract = contract_defects(rep, fin, &pipeline.embed, tol)?;
    report.checks.extend(
        contract
            .checks
            .into_iter()
            .map(|c| Check::bound(format!("dilation {}", c.name), c.defect, c.threshold)),
    );
    Ok(Some(pipeline.final_rep))
}

fn cmd_induce(file: &Path, problem: &Problem, out: Option<&Path>, tol: &Tolerance) -> Report {
    let mut report = Report::new(format!("induce {}", file.display()));
    let Some(rep) = require_rep(problem, &mut report) else {
        return report;
    };
    let Some(action) = problem.action.as_ref() else {
        report.notes.push("error: the file has no action block".into());
        report.exit = EXIT_INPUT;
        return report;
    };
    let induced = match induced_regular_rep(rep, action, tol) {
        Ok(r) => r,
        Err(e) => return Report::failed(report.command, &e),
    };
    report.notes.push(format!(
        "dimension {} -> {} (group of order {})",
        rep.dim(),
        induced.dim(),
        action.group().order()
    ));
    match covariance_defect(&induced) {
        Ok(d) => report.checks.push(Check::bound("covariance", d, tol.eps)),
        Err(e) => report.notes.push(format!("error: {e}")),
    }
    let block = induced_identity_block(rep.dim(), action);
    match induced.compress(&block) {
        Ok(corner) => {
            let worst = corner
                .edge_ops()
                .iter()
                .zip(rep.edge_ops())
                .chain(corner.projections().iter().zip(rep.projections()))
                .map(|(a, b)| op_norm(&(a - b)))
                .fold(0.0, f64::max);
            report.checks.push(Check::bound("identity corner", worst, tol.eps));
        }
        Err(e) => report.notes.push(format!("error: {e}")),
    }
    write_out(&mut report, problem, induced, out);
    report.settle()
}

fn cmd_counterexample(grid: usize, degree: usize) -> Report {
    let command = format!("counterexample --grid {grid} --degree {degree}");
    let gap = match admissibility_gap(degree, grid) {
        Ok(g) => g,
        Err(e) => return Report::failed(command, &e),
    };
    let mut report = Report::new(command);
    let (image, source) = gap.pair();
    report.checks.push(Check::info("||D_1|| (matrix part)", image));
    report.checks.push(Check::info("||D_0|| (matrix part)", source));
    report.checks.push(Check::flag("strict gap ||D_1|| < ||D_0||", gap.obstructs(1e-9)));
    report.checks.push(Check::bound("D_0 function part on grid", gap.d0_residual, 1e-9));
    report.checks.push(Check::bound("D_1 function part on grid", gap.d1_residual, 1e-9));
    let fmt = |m: &CMatrix| {
        let rows: Vec<String> = (0..m.nrows())
            .map(|i| {
                let xs: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)].re)).collect();
                format!("[{}]", xs.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    };
    report.notes.push(format!("gap pair = ({image:.12}, {source:.12})"));
    report.notes.push(format!("iota(phi) matrix part = {}", fmt(&gap.image.mat_part)));
    report.notes.push(format!("D_1 matrix part = {}", fmt(&gap.d1.mat_part)));
    report.notes.push(format!("D_0 matrix part = {}", fmt(&gap.d0.mat_part)));
    report.settle()
}
