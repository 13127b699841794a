//! Executes a [`Scenario`] and collects the per-item results into a [`Report`].

use genconvex::algebra::{self, CompositionCase, Dominance};
use genconvex::classes::{
    certify_sampled, falsify, CertifyConfig, CertifyReport, ClassSpec, ClassTag, FalsifyReport, SearchConfig,
    SAMPLED_EVIDENCE,
};
use genconvex::funcdsl::{FuncDef, Interval};
use genconvex::quad::{h_moments, HMoments, QuadConfig};
use genconvex::theorems::{
    self, check_reduction, default_probes, Instance, ReductionPair, ReductionReport, Status, TheoremId, Verdict,
    BACKGROUND_BINDING_NOTE, T2_1_BRACKET_NOTE,
};
use genconvex::Execution;
use serde::Serialize;

use crate::scenario::{Command, Construct, Scenario, Target};

pub const TOOL: &str = "genconvex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header note for the constructions, which name their target class "(h−m)-convex".
pub const HM_READING_NOTE: &str = "constructions: \"(h−m)-convex\" read as (h,m)-convex";
/// Grid used for the h-dominance check.
pub const DOMINANCE_GRID: usize = 99;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INDETERMINATE: i32 = 3;

    /// Combines two outcomes: usage errors dominate failures, failures
    /// dominate indeterminate results.
    pub fn combine(a: i32, b: i32) -> i32 {
        let rank = |c: i32| match c {
            USAGE => 3,
            FAIL => 2,
            INDETERMINATE => 1,
            _ => 0,
        };
        if rank(b) > rank(a) {
            b
        } else {
            a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRef {
    pub index: usize,
    pub axes: Vec<AxisValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEcho {
    pub tag: ClassTag,
    pub h: String,
    pub m: f64,
    pub phi: String,
    pub bound: f64,
}

impl ClassEcho {
    fn of(spec: &ClassSpec) -> Self {
        ClassEcho {
            tag: spec.tag(),
            h: spec.h().to_string(),
            m: spec.m(),
            phi: spec.phi().to_string(),
            bound: spec.domain().hi(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// The scenario's `f` against its class.
    Base,
    /// Hypothesis check before a verify; informational only.
    Precheck,
    Compose,
    Segment,
    /// `f` against the class with `h` replaced by the dominating `h₁`.
    Dominated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyItem {
    pub role: Role,
    pub function: String,
    pub class: ClassEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition_case: Option<CompositionCase>,
    pub report: CertifyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsifyItem {
    pub function: String,
    pub class: ClassEcho,
    pub budget: usize,
    pub seed: u64,
    pub report: FalsifyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceItem {
    pub h1: String,
    pub h2: String,
    pub grid: usize,
    pub result: Dominance,
}

/// `lhs = (∫h)²`, `rhs = ∫h²` (Cauchy–Schwarz), with the three moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HMomentsItem {
    pub h: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub quad_err: f64,
    pub status: Status,
    pub moments: HMoments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Inputs violate a hypothesis or schema constraint.
    Precondition,
    /// Evaluation or integration broke down.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorItem {
    pub what: String,
    pub error: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Verdict(Verdict),
    HMoments(HMomentsItem),
    Certify(CertifyItem),
    Falsify(FalsifyItem),
    Dominance(DominanceItem),
    Reduction(ReductionReport),
    Error(ErrorItem),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Verdict(v) => status_code(v.status),
            Outcome::HMoments(h) => status_code(h.status),
            Outcome::Certify(c) => match c.role {
                Role::Precheck => exit::OK,
                _ if c.report.certified => exit::OK,
                _ => exit::FAIL,
            },
            Outcome::Falsify(f) => {
                if f.report.counterexample.is_some() {
                    exit::FAIL
                } else {
                    exit::OK
                }
            }
            Outcome::Dominance(_) => exit::OK,
            Outcome::Reduction(r) => {
                if r.pass {
                    exit::OK
                } else {
                    exit::FAIL
                }
            }
            Outcome::Error(e) => match e.error {
                ErrorKind::Precondition => exit::USAGE,
                ErrorKind::Numeric => exit::INDETERMINATE,
            },
        }
    }

    fn error(what: impl Into<String>, error: ErrorKind, message: impl ToString) -> Self {
        Outcome::Error(ErrorItem { what: what.into(), error, message: message.to_string() })
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Pass => exit::OK,
        Status::Fail => exit::FAIL,
        Status::Indeterminate => exit::INDETERMINATE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellRef>,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Everything a run produced. Contains no timing information, so identical
/// inputs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub notes: Vec<String>,
    pub items: Vec<Entry>,
    pub exit_status: i32,
}

/// Inputs of one cell with axis values applied.
struct Cell<'a> {
    s: &'a Scenario,
    bindings: Vec<(&'a str, f64)>,
}

impl<'a> Cell<'a> {
    fn value(&self, name: &str, fallback: Option<f64>) -> Option<f64> {
        self.bindings.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).or(fallback)
    }

    fn m(&self) -> f64 {
        self.value("m", Some(self.s.m)).expect("m has a default")
    }

    fn x(&self) -> Option<f64> {
        self.value("x", self.s.x)
    }

    fn y(&self) -> Option<f64> {
        self.value("y", self.s.y)
    }

    fn s_binding(&self) -> Vec<(&str, f64)> {
        self.bindings.iter().filter(|(k, _)| *k == "s").copied().collect()
    }

    fn func(&self, spec: &Option<crate::scenario::FuncSpec>, domain: Interval) -> Result<Option<FuncDef>, String> {
        spec.as_ref().map(|f| f.resolve(&self.s_binding(), domain)).transpose()
    }

    fn f(&self) -> Result<Option<FuncDef>, String> {
        self.func(&self.s.f, self.s.domain())
    }

    fn g(&self) -> Result<Option<FuncDef>, String> {
        self.func(&self.s.g, self.s.domain())
    }

    fn h(&self) -> Result<FuncDef, String> {
        Ok(self.func(&self.s.h, Interval::unit())?.unwrap_or_else(|| FuncDef::identity(Interval::unit())))
    }

    fn phi(&self) -> Result<FuncDef, String> {
        Ok(self.func(&self.s.phi, self.s.domain())?.unwrap_or_else(|| FuncDef::identity(self.s.domain())))
    }

    fn class(&self, tag: ClassTag) -> Result<ClassSpec, String> {
        ClassSpec::new(tag, self.h()?, self.m(), self.phi()?, self.s.bound).map_err(|e| e.to_string())
    }

    fn instance(&self) -> Result<Instance, String> {
        let f = self.f()?.ok_or("missing f")?;
        Ok(Instance {
            f,
            g: self.g()?,
            h: self.h()?,
            m: self.m(),
            phi: self.phi()?,
            x: self.x().ok_or("missing x")?,
            y: self.y().ok_or("missing y")?,
        })
    }

    fn certify_cfg(&self, exec: Execution) -> CertifyConfig {
        CertifyConfig { samples: self.s.n, seed: self.s.seed, tol: classes_tol(self.s), exec }
    }
}

fn classes_tol(s: &Scenario) -> f64 {
    s.tol_report
}

fn bad(what: &str) -> impl Fn(String) -> Outcome + '_ {
    move |e| Outcome::error(what, ErrorKind::Precondition, e)
}

fn verify_target(cell: &Cell<'_>, target: Target) -> Vec<Outcome> {
    let s = cell.s;
    match target {
        Target::HMoments => {
            let h = match cell.h() {
                Ok(h) => h,
                Err(e) => return vec![bad("h")(e)],
            };
            vec![moments_item(&h, s.tol_quad)]
        }
        Target::Theorem(id) => {
            let inst = match cell.instance() {
                Ok(i) => i,
                Err(e) => return vec![bad(id.name())(e)],
            };
            vec![match theorems::verify(id, &inst, &s.tolerances()) {
                Ok(v) => Outcome::Verdict(v),
                Err(e) if e.is_precondition() => Outcome::error(id.name(), ErrorKind::Precondition, e),
                Err(e) => Outcome::error(id.name(), ErrorKind::Numeric, e),
            }]
        }
    }
}

fn moments_item(h: &FuncDef, tol: f64) -> Outcome {
    match h_moments(h, &QuadConfig::with_tol(tol)) {
        Ok(hm) => {
            let (m1, m2) = (hm.m1.value, hm.m2.value);
            let lhs = m1 * m1;
            let quad_err = 2.0 * m1.abs() * hm.m1.abs_err + hm.m2.abs_err;
            let margin = m2 - lhs;
            let status = if hm.is_indeterminate() {
                Status::Indeterminate
            } else if margin >= -(quad_err + 1e-12) {
                Status::Pass
            } else {
                Status::Fail
            };
            Outcome::HMoments(HMomentsItem { h: h.to_string(), lhs, rhs: m2, margin, quad_err, status, moments: hm })
        }
        Err(e) => Outcome::error("h_moments", ErrorKind::Numeric, e),
    }
}

/// Certifies the verify inputs against the hypotheses of the requested
/// theorems: `f` convex for `HC`, `f` (and `g` where used) φ_{h,m}-convex
/// for the rest.
fn precheck(cell: &Cell<'_>, exec: Execution) -> Vec<Outcome> {
    let ids: Vec<TheoremId> = cell
        .s
        .theorems
        .iter()
        .filter_map(|t| match t {
            Target::Theorem(id) => Some(*id),
            Target::HMoments => None,
        })
        .collect();
    if ids.is_empty() {
        return Vec::new();
    }
    let (f, g) = match cell.f().and_then(|f| Ok((f.ok_or("missing f")?, cell.g()?))) {
        Ok(p) => p,
        Err(e) => return vec![bad("precheck")(e)],
    };
    let mut checks: Vec<(Result<ClassSpec, String>, &FuncDef)> = Vec::new();
    if ids.contains(&TheoremId::Hc) {
        checks.push((ClassSpec::convex(cell.s.bound).map_err(|e| e.to_string()), &f));
    }
    if ids.iter().any(|id| *id != TheoremId::Hc) {
        checks.push((cell.class(ClassTag::PhiHmConvex), &f));
        if let Some(g) = g.as_ref().filter(|_| ids.iter().any(|id| id.needs_g())) {
            checks.push((cell.class(ClassTag::PhiHmConvex), g));
        }
    }
    let cfg = cell.certify_cfg(exec);
    checks
        .into_iter()
        .map(|(spec, f)| match spec {
            Ok(spec) => Outcome::Certify(CertifyItem {
                role: Role::Precheck,
                function: f.to_string(),
                class: ClassEcho::of(&spec),
                composition_case: None,
                report: certify_sampled(f, &spec, &cfg),
            }),
            Err(e) => bad("precheck")(e),
        })
        .collect()
}

fn run_certify(cell: &Cell<'_>, exec: Execution) -> Vec<Outcome> {
    let s = cell.s;
    let tag = s.class.expect("validated");
    let (f, spec) = match cell.f().and_then(|f| Ok((f.ok_or("missing f")?, cell.class(tag)?))) {
        Ok(p) => p,
        Err(e) => return vec![bad("class")(e)],
    };
    let cfg = cell.certify_cfg(exec);
    let base = certify_sampled(&f, &spec, &cfg);
    let mut out = vec![Outcome::Certify(CertifyItem {
        role: Role::Base,
        function: f.to_string(),
        class: ClassEcho::of(&spec),
        composition_case: None,
        report: base.clone(),
    })];
    if let Some(h1) = &s.dominates {
        out.extend(dominance(cell, &f, &spec, h1, &base, exec));
    }
    if let Some(c) = s.construct {
        out.push(construction(cell, c, &f, &spec, exec));
    }
    out
}

fn dominance(
    cell: &Cell<'_>,
    f: &FuncDef,
    spec: &ClassSpec,
    h1: &crate::scenario::FuncSpec,
    base: &CertifyReport,
    exec: Execution,
) -> Vec<Outcome> {
    let h1 = match h1.resolve(&cell.s_binding(), Interval::unit()) {
        Ok(h) => h,
        Err(e) => return vec![bad("dominates")(e)],
    };
    let d = match algebra::dominance_inclusion(&h1, spec.h(), DOMINANCE_GRID) {
        Ok(d) => d,
        Err(e) => return vec![Outcome::error("dominates", ErrorKind::Numeric, e)],
    };
    let mut out = vec![Outcome::Dominance(DominanceItem {
        h1: h1.to_string(),
        h2: spec.h().to_string(),
        grid: DOMINANCE_GRID,
        result: d,
    })];
    let tag = if spec.tag().uses_h() { spec.tag() } else { ClassTag::HConvex };
    let dominated = ClassSpec::new(tag, h1, spec.m(), spec.phi().clone(), spec.domain().hi());
    match dominated {
        Ok(s1) => {
            let report = certify_sampled(f, &s1, &cell.certify_cfg(exec));
            // only a dominated, certified base makes a claim about h₁
            let claim = d.dominates && base.certified;
            out.push(Outcome::Certify(CertifyItem {
                role: if claim { Role::Dominated } else { Role::Precheck },
                function: f.to_string(),
                class: ClassEcho::of(&s1),
                composition_case: None,
                report,
            }));
        }
        Err(e) => out.push(bad("dominates")(e.to_string())),
    }
    out
}

fn construction(cell: &Cell<'_>, c: Construct, f: &FuncDef, spec: &ClassSpec, exec: Execution) -> Outcome {
    let unit = Interval::unit();
    let (g, case, domain) = match c {
        Construct::Compose => {
            let case = match algebra::composition_case(f, spec.phi()) {
                Ok(case) => case,
                Err(e) => return Outcome::error("construct", ErrorKind::Numeric, e),
            };
            match algebra::compose_phi(f, spec.phi()) {
                Ok(g) => (g, case, spec.domain()),
                Err(e) => return Outcome::error("construct", ErrorKind::Precondition, e),
            }
        }
        Construct::Segment => {
            let (x, y) = (cell.x().expect("validated"), cell.y().expect("validated"));
            match algebra::segment(f, spec.phi(), spec.m(), x, y) {
                Ok(seg) => (seg.as_funcdef().clone(), None, unit),
                Err(e) => return Outcome::error("construct", ErrorKind::Precondition, e),
            }
        }
    };
    let target = ClassSpec::new(ClassTag::HmConvex, spec.h().clone(), spec.m(), FuncDef::identity(domain), domain.hi());
    match target {
        Ok(t) => Outcome::Certify(CertifyItem {
            role: match c {
                Construct::Compose => Role::Compose,
                Construct::Segment => Role::Segment,
            },
            function: g.to_string(),
            class: ClassEcho::of(&t),
            composition_case: case,
            report: certify_sampled(&g, &t, &cell.certify_cfg(exec)),
        }),
        Err(e) => bad("construct")(e.to_string()),
    }
}

fn run_falsify(cell: &Cell<'_>, exec: Execution) -> Vec<Outcome> {
    let s = cell.s;
    let tag = s.class.expect("validated");
    let (f, spec) = match cell.f().and_then(|f| Ok((f.ok_or("missing f")?, cell.class(tag)?))) {
        Ok(p) => p,
        Err(e) => return vec![bad("class")(e)],
    };
    let cfg = SearchConfig { budget: s.budget, seed: s.seed, tol: classes_tol(s), exec };
    vec![Outcome::Falsify(FalsifyItem {
        function: f.to_string(),
        class: ClassEcho::of(&spec),
        budget: s.budget,
        seed: s.seed,
        report: falsify(&f, &spec, &cfg),
    })]
}

fn run_reduce(cell: &Cell<'_>, exec: Execution) -> Vec<Outcome> {
    let s = cell.s;
    s.pairs
        .iter()
        .map(|&pair| {
            let probes = if s.f.is_some() {
                match cell.instance() {
                    Ok(i) => vec![i],
                    Err(e) => return bad(pair.name())(e),
                }
            } else {
                default_probes(pair)
            };
            match check_reduction(pair, &probes, &s.tolerances(), exec) {
                Ok(r) => Outcome::Reduction(r),
                Err(e) if e.is_precondition() => Outcome::error(pair.name(), ErrorKind::Precondition, e),
                Err(e) => Outcome::error(pair.name(), ErrorKind::Numeric, e),
            }
        })
        .collect()
}

fn run_cell(cell: &Cell<'_>, exec: Execution) -> Vec<Outcome> {
    match cell.s.command {
        Command::Certify => run_certify(cell, exec),
        Command::Falsify => run_falsify(cell, exec),
        Command::Reduce => run_reduce(cell, exec),
        Command::Verify | Command::Sweep => {
            let mut out = if cell.s.precheck { precheck(cell, exec) } else { Vec::new() };
            out.extend(cell.s.theorems.iter().flat_map(|&t| verify_target(cell, t)));
            out
        }
    }
}

fn notes(s: &Scenario) -> Vec<String> {
    let mut notes: Vec<&str> = Vec::new();
    let theorems: Vec<TheoremId> = s
        .theorems
        .iter()
        .filter_map(|t| match t {
            Target::Theorem(id) => Some(*id),
            Target::HMoments => None,
        })
        .chain(s.pairs.iter().flat_map(|p: &ReductionPair| {
            let (a, b) = p.theorems();
            [a, b]
        }))
        .collect();
    if theorems.iter().any(|t| matches!(t, TheoremId::T1_13 | TheoremId::T1_14)) {
        notes.push(BACKGROUND_BINDING_NOTE);
    }
    if theorems.contains(&TheoremId::T2_1) {
        notes.push(T2_1_BRACKET_NOTE);
    }
    if s.class == Some(ClassTag::PhiConvex) {
        notes.push(genconvex::classes::PHI_CONVEX_READING);
    }
    if s.construct.is_some() {
        notes.push(HM_READING_NOTE);
    }
    if matches!(s.command, Command::Certify) || s.precheck {
        notes.push(SAMPLED_EVIDENCE);
    }
    notes.into_iter().map(str::to_string).collect()
}

/// Runs the scenario. Sweep cells are evaluated with `exec` and assembled in
/// row-major order of the declared axes.
pub fn run(s: &Scenario, exec: Execution) -> Report {
    let cells: Vec<usize> = (0..s.cell_count()).collect();
    let sweep = s.command == Command::Sweep;
    // cells run in parallel, the work inside a cell sequentially
    let inner = if sweep && cells.len() > 1 { Execution::Sequential } else { exec };
    let results = exec.map(&cells, |&index| {
        let bindings = s.cell(index);
        let cell = Cell { s, bindings: bindings.clone() };
        let cell_ref = sweep.then(|| CellRef {
            index,
            axes: bindings.iter().map(|(k, v)| AxisValue { name: k.to_string(), value: *v }).collect(),
        });
        run_cell(&cell, inner)
            .into_iter()
            .map(|outcome| Entry { cell: cell_ref.clone(), outcome })
            .collect::<Vec<_>>()
    });
    let items: Vec<Entry> = results.into_iter().flatten().collect();
    let exit_status = items.iter().fold(exit::OK, |acc, e| exit::combine(acc, e.outcome.exit_code()));
    Report { tool: TOOL, version: VERSION, scenario: s.clone(), notes: notes(s), items, exit_status }
}
