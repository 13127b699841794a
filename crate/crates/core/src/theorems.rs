//! Hermite–Hadamard-type inequalities, evaluated numerically.
//!
//! Each verifier computes both sides of one inequality for concrete `f`,
//! `g`, `h`, `m`, `φ` and points, and returns a [`Verdict`] carrying the two
//! sides, the margin `rhs − lhs` and the propagated quadrature error.
//!
//! | id        | left side                                              | right side                                                     |
//! |-----------|--------------------------------------------------------|----------------------------------------------------------------|
//! | `HC`      | `f((a+b)/2) ≤ ⨍_[a,b] f`                               | `(f(a)+f(b))/2`                                                |
//! | `T1_9`    | `f((a+b)/2)/(2h(½)) ≤ ⨍_[a,b] f`                       | `(f(a)+f(b))·∫h`                                               |
//! | `T1_11`   | `(⨍_[a,mb] f + ⨍_[ma,b] f)/(m+1)`                      | `(f(a)+f(b))·∫h`                                               |
//! | `T1_13`   | `⨍_[φa,φb] f(u)f(φa+φb−u)`                             | `(f(φa)²+f(φb)²)·∫h(t)h(1−t) + 2f(φa)f(φb)·∫h²`                |
//! | `T1_14`   | `⨍_[φa,φb] f·g`                                        | `M·∫h² + N·∫h(t)h(1−t)`                                        |
//! | `T2_1`    | `⨍_[φx,mφy] f(u)f(φx+mφy−u)`                           | `(f(φx)²+m²f(φy)²)·∫h(t)h(1−t) + f(φx)f(φy)(m+1)·∫h²`          |
//! | `T2_2dot` | `⨍_[φx,mφy] f`                                         | `(f(φx)+f(φy))·∫h`                                             |
//! | `T2_2`    | `(⨍_[mφx,φy] f + ⨍_[φx,mφy] f)/(m+1)`                  | `(f(φx)+f(φy))·∫h`                                             |
//! | `T2_3`    | `⨍_[φx,mφy] f·g`                                       | `M·∫h² + m·N·∫h(t)h(1−t)`                                      |
//!
//! `⨍_[p,q]` is the integral mean `(1/(q−p))∫_p^q`. For `T1_14`,
//! `M = f(φa)g(φa) + f(φb)g(φb)`; for `T2_3`, `M = f(φx)g(φx) + m²f(φy)g(φy)`;
//! both use `N = f(φx)g(φy) + f(φy)g(φx)`. `HC` and `T1_9` are two-sided:
//! `lhs` is the integral mean, `rhs` the upper bound and [`Verdict::lower`]
//! the lower bound. The background theorems `T1_13`/`T1_14` bind their free
//! points to the interval ends (`x = a`, `y = b`).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::funcdsl::{EvalError, FuncDef};
use crate::quad::{self, Integral, Moment, QuadConfig, QuadError};

pub const DEFAULT_REPORT_TOL: f64 = 1e-9;
/// Absolute slack allowed between paired verifiers on top of their quadrature errors.
pub const REDUCTION_SLACK: f64 = 1e-12;

/// Header note for the background theorems with free points.
pub const BACKGROUND_BINDING_NOTE: &str = "T1_13/T1_14: right-hand side points bound as x = a, y = b";
/// Header note for the T2_1 right-hand side bracketing.
pub const T2_1_BRACKET_NOTE: &str =
    "T2_1: right-hand side uses [f(φx)² + m²f(φy)²]·∫h(t)h(1−t) + f(φx)f(φy)(m+1)·∫h²";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    #[serde(rename = "HC")]
    Hc,
    #[serde(rename = "T1_9")]
    T1_9,
    #[serde(rename = "T1_11")]
    T1_11,
    #[serde(rename = "T1_13")]
    T1_13,
    #[serde(rename = "T1_14")]
    T1_14,
    #[serde(rename = "T2_1")]
    T2_1,
    #[serde(rename = "T2_2dot")]
    T2_2dot,
    #[serde(rename = "T2_2")]
    T2_2,
    #[serde(rename = "T2_3")]
    T2_3,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Hc,
        TheoremId::T1_9,
        TheoremId::T1_11,
        TheoremId::T1_13,
        TheoremId::T1_14,
        TheoremId::T2_1,
        TheoremId::T2_2dot,
        TheoremId::T2_2,
        TheoremId::T2_3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Hc => "HC",
            TheoremId::T1_9 => "T1_9",
            TheoremId::T1_11 => "T1_11",
            TheoremId::T1_13 => "T1_13",
            TheoremId::T1_14 => "T1_14",
            TheoremId::T2_1 => "T2_1",
            TheoremId::T2_2dot => "T2_2dot",
            TheoremId::T2_2 => "T2_2",
            TheoremId::T2_3 => "T2_3",
        }
    }

    pub fn needs_g(self) -> bool {
        matches!(self, TheoremId::T1_14 | TheoremId::T2_3)
    }

    pub fn is_background(self) -> bool {
        matches!(self, TheoremId::Hc | TheoremId::T1_9 | TheoremId::T1_11 | TheoremId::T1_13 | TheoremId::T1_14)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| VerifyError::Precondition(format!("unknown theorem `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("{what}: interval [{lo}, {hi}] is empty or reversed")]
    Orientation { what: &'static str, lo: f64, hi: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what}: {source}")]
    Eval { what: &'static str, source: EvalError },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

impl VerifyError {
    /// True for violations of a verifier's hypotheses (bad inputs), false
    /// for numeric failures while evaluating or integrating.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            VerifyError::Orientation { .. } | VerifyError::Precondition(_) | VerifyError::Quad(QuadError::Orientation { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance handed to every integral.
    pub quad: f64,
    /// Slack on the margin beyond the quadrature error before a verdict fails.
    pub report: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad: quad::DEFAULT_TOL, report: DEFAULT_REPORT_TOL }
    }
}

/// Concrete data for one verification. For `HC` and `T1_*`, `x` and `y`
/// play the role of `a` and `b`; unused fields are ignored.
#[derive(Debug, Clone)]
pub struct Instance {
    pub f: FuncDef,
    pub g: Option<FuncDef>,
    pub h: FuncDef,
    pub m: f64,
    pub phi: FuncDef,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: &'static str,
    pub value: f64,
}

/// The inputs a verdict was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Echo {
    pub f: String,
    pub g: Option<String>,
    pub h: Option<String>,
    pub phi: Option<String>,
    pub m: Option<f64>,
    pub x: f64,
    pub y: f64,
    /// Derived quantities such as φ(x), φ(y), M and N.
    pub derived: Vec<NamedValue>,
}

/// Lower half of a two-sided inequality: `bound ≤ lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub bound: f64,
    /// `lhs − bound`
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub theorem: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    /// Quadrature error propagated onto the margin.
    pub quad_err: f64,
    pub status: Status,
    pub lower: Option<LowerBound>,
    pub echo: Echo,
    pub diagnosis: Option<String>,
}

/// A value together with its propagated quadrature error.
#[derive(Debug, Clone, Copy, Default)]
struct Est {
    value: f64,
    err: f64,
    indeterminate: bool,
}

impl Est {
    fn exact(value: f64) -> Self {
        Est { value, err: 0.0, indeterminate: false }
    }

    fn from_integral(i: Integral) -> Self {
        Est { value: i.value, err: i.abs_err, indeterminate: i.is_indeterminate() }
    }

    fn scale(self, c: f64) -> Self {
        Est { value: c * self.value, err: c.abs() * self.err, indeterminate: self.indeterminate }
    }

    fn add(self, o: Est) -> Self {
        Est { value: self.value + o.value, err: self.err + o.err, indeterminate: self.indeterminate || o.indeterminate }
    }
}

struct Ctx<'a> {
    tol: &'a Tolerances,
    diagnosis: Vec<String>,
}

impl Ctx<'_> {
    fn qcfg(&self) -> QuadConfig {
        QuadConfig::with_tol(self.tol.quad)
    }

    fn note(&mut self, label: &str, i: &Integral) {
        if i.is_indeterminate() {
            self.diagnosis.push(format!(
                "{label}: quadrature did not converge ({:?}, abs_err {:e} after {} evaluations); integrability is doubtful",
                i.precision, i.abs_err, i.evaluations
            ));
        }
    }

    fn moment(&mut self, h: &FuncDef, which: Moment) -> Result<Est, VerifyError> {
        let i = quad::h_moment(h, which, &self.qcfg())?;
        let label = match which {
            Moment::M1 => "∫h",
            Moment::M2 => "∫h²",
            Moment::Mx => "∫h(t)h(1−t)",
        };
        self.note(label, &i);
        Ok(Est::from_integral(i))
    }

    /// Integral mean of `integrand` over `[lo, hi]`.
    fn mean<F>(&mut self, what: &'static str, integrand: F, lo: f64, hi: f64) -> Result<Est, VerifyError>
    where
        F: Fn(f64) -> Result<f64, EvalError>,
    {
        if !(lo < hi) {
            return Err(VerifyError::Orientation { what, lo, hi });
        }
        let i = quad::integrate(integrand, lo, hi, &self.qcfg())?;
        self.note(what, &i);
        Ok(Est::from_integral(i).scale(1.0 / (hi - lo)))
    }
}

fn at(f: &FuncDef, u: f64, what: &'static str) -> Result<f64, VerifyError> {
    f.evaluate(u).map_err(|source| VerifyError::Eval { what, source })
}

fn need_g(inst: &Instance) -> Result<&FuncDef, VerifyError> {
    inst.g.as_ref().ok_or_else(|| VerifyError::Precondition("a second function g is required".into()))
}

fn check_m(m: f64) -> Result<(), VerifyError> {
    if m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(VerifyError::Precondition(format!("m must lie in (0, 1], got {m}")))
    }
}

fn status_of(margins: &[f64], est_err: f64, indeterminate: bool, tol: &Tolerances) -> Status {
    if indeterminate {
        Status::Indeterminate
    } else if margins.iter().all(|m| *m >= -(est_err + tol.report)) {
        Status::Pass
    } else {
        Status::Fail
    }
}

struct Sides {
    lhs: Est,
    rhs: Est,
    lower: Option<Est>,
}

fn finish(theorem: TheoremId, sides: Sides, echo: Echo, ctx: Ctx<'_>) -> Verdict {
    let Sides { lhs, rhs, lower } = sides;
    let margin = rhs.value - lhs.value;
    let mut quad_err = lhs.err + rhs.err;
    let mut margins = vec![margin];
    let mut indeterminate = lhs.indeterminate || rhs.indeterminate;
    let lower = lower.map(|lb| {
        quad_err = quad_err.max(lhs.err + lb.err);
        indeterminate |= lb.indeterminate;
        let lm = lhs.value - lb.value;
        margins.push(lm);
        LowerBound { bound: lb.value, margin: lm }
    });
    let status = status_of(&margins, quad_err, indeterminate, ctx.tol);
    let diagnosis = (!ctx.diagnosis.is_empty()).then(|| ctx.diagnosis.join("; "));
    Verdict { theorem, lhs: lhs.value, rhs: rhs.value, margin, quad_err, status, lower, echo, diagnosis }
}

fn echo(inst: &Instance, g: bool, h: bool, phi: bool, m: bool, derived: Vec<NamedValue>) -> Echo {
    Echo {
        f: inst.f.to_string(),
        g: if g { inst.g.as_ref().map(|g| g.to_string()) } else { None },
        h: h.then(|| inst.h.to_string()),
        phi: phi.then(|| inst.phi.to_string()),
        m: m.then_some(inst.m),
        x: inst.x,
        y: inst.y,
        derived,
    }
}

fn nv(name: &'static str, value: f64) -> NamedValue {
    NamedValue { name, value }
}

fn phi_points(inst: &Instance) -> Result<(f64, f64), VerifyError> {
    Ok((at(&inst.phi, inst.x, "φ(x)")?, at(&inst.phi, inst.y, "φ(y)")?))
}

/// `(1/(mφ(y)−φ(x)))∫_{φ(x)}^{mφ(y)} f(u)f(φ(x)+mφ(y)−u)du
///  ≤ [f²(φ(x)) + m²f²(φ(y))]∫h(t)h(1−t)dt + f(φ(x))f(φ(y))(m+1)∫h²(t)dt`
pub fn verify_t2_1(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    check_m(inst.m)?;
    let m = inst.m;
    let f = &inst.f;
    let (px, py) = phi_points(inst)?;
    let (lo, hi) = (px, m * py);
    if !(lo < hi) {
        return Err(VerifyError::Orientation { what: "[φ(x), mφ(y)]", lo, hi });
    }
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("∫f(u)f(φx+mφy−u)", |u| Ok(f.evaluate(u)? * f.evaluate(lo + hi - u)?), lo, hi)?;
    let fx = at(f, px, "f(φ(x))")?;
    let fy = at(f, py, "f(φ(y))")?;
    let mx = ctx.moment(&inst.h, Moment::Mx)?;
    let m2 = ctx.moment(&inst.h, Moment::M2)?;
    let rhs = mx.scale(fx * fx + m * m * fy * fy).add(m2.scale(fx * fy * (m + 1.0)));
    let e = echo(inst, false, true, true, true, vec![nv("phi_x", px), nv("phi_y", py)]);
    Ok(finish(TheoremId::T2_1, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `(1/(mφ(y)−φ(x)))∫_{φ(x)}^{mφ(y)} f ≤ [f(φ(x)) + f(φ(y))]∫h`
pub fn verify_t2_2dot(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    check_m(inst.m)?;
    let f = &inst.f;
    let (px, py) = phi_points(inst)?;
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("[φ(x), mφ(y)]", |u| f.evaluate(u), px, inst.m * py)?;
    let fx = at(f, px, "f(φ(x))")?;
    let fy = at(f, py, "f(φ(y))")?;
    let rhs = ctx.moment(&inst.h, Moment::M1)?.scale(fx + fy);
    let e = echo(inst, false, true, true, true, vec![nv("phi_x", px), nv("phi_y", py)]);
    Ok(finish(TheoremId::T2_2dot, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `(1/(m+1))[⨍_[mφ(x), φ(y)] f + ⨍_[φ(x), mφ(y)] f] ≤ [f(φ(x)) + f(φ(y))]∫h`
/// for `0 ≤ mφ(x) ≤ φ(x) ≤ mφ(y) ≤ φ(y)`, with both averaging intervals
/// of positive length.
pub fn verify_t2_2(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    check_m(inst.m)?;
    let m = inst.m;
    let f = &inst.f;
    let (px, py) = phi_points(inst)?;
    let chain = [0.0, m * px, px, m * py, py];
    if chain.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(VerifyError::Precondition(format!(
            "requires 0 ≤ mφ(x) ≤ φ(x) ≤ mφ(y) ≤ φ(y), got mφ(x)={}, φ(x)={px}, mφ(y)={}, φ(y)={py}",
            m * px,
            m * py
        )));
    }
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let outer = ctx.mean("[mφ(x), φ(y)]", |u| f.evaluate(u), m * px, py)?;
    let inner = ctx.mean("[φ(x), mφ(y)]", |u| f.evaluate(u), px, m * py)?;
    let lhs = outer.add(inner).scale(1.0 / (m + 1.0));
    let fx = at(f, px, "f(φ(x))")?;
    let fy = at(f, py, "f(φ(y))")?;
    let rhs = ctx.moment(&inst.h, Moment::M1)?.scale(fx + fy);
    let e = echo(inst, false, true, true, true, vec![nv("phi_x", px), nv("phi_y", py)]);
    Ok(finish(TheoremId::T2_2, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `⨍_[φ(x), mφ(y)] f·g ≤ M∫h² + m·N∫h(t)h(1−t)` with
/// `M = f(φx)g(φx) + m²f(φy)g(φy)`, `N = f(φx)g(φy) + f(φy)g(φx)`.
pub fn verify_t2_3(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    check_m(inst.m)?;
    let m = inst.m;
    let (f, g) = (&inst.f, need_g(inst)?);
    let (px, py) = phi_points(inst)?;
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("[φ(x), mφ(y)]", |u| Ok(f.evaluate(u)? * g.evaluate(u)?), px, m * py)?;
    let (fx, fy) = (at(f, px, "f(φ(x))")?, at(f, py, "f(φ(y))")?);
    let (gx, gy) = (at(g, px, "g(φ(x))")?, at(g, py, "g(φ(y))")?);
    let big_m = fx * gx + m * m * fy * gy;
    let big_n = fx * gy + fy * gx;
    let m2 = ctx.moment(&inst.h, Moment::M2)?;
    let mx = ctx.moment(&inst.h, Moment::Mx)?;
    let rhs = m2.scale(big_m).add(mx.scale(m * big_n));
    let e = echo(
        inst,
        true,
        true,
        true,
        true,
        vec![nv("phi_x", px), nv("phi_y", py), nv("M", big_m), nv("N", big_n)],
    );
    Ok(finish(TheoremId::T2_3, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `f((a+b)/2) ≤ ⨍_[a,b] f ≤ (f(a)+f(b))/2`
pub fn verify_hc(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    let (a, b, f) = (inst.x, inst.y, &inst.f);
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("[a, b]", |u| f.evaluate(u), a, b)?;
    let (fa, fb) = (at(f, a, "f(a)")?, at(f, b, "f(b)")?);
    let mid = at(f, 0.5 * (a + b), "f((a+b)/2)")?;
    let sides = Sides { lhs, rhs: Est::exact(0.5 * (fa + fb)), lower: Some(Est::exact(mid)) };
    Ok(finish(TheoremId::Hc, sides, echo(inst, false, false, false, false, Vec::new()), ctx))
}

/// `f((a+b)/2)/(2h(½)) ≤ ⨍_[a,b] f ≤ (f(a)+f(b))∫h`
pub fn verify_t1_9(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    let (a, b, f) = (inst.x, inst.y, &inst.f);
    let h_half = at(&inst.h, 0.5, "h(1/2)")?;
    if !(h_half > 0.0) {
        return Err(VerifyError::Precondition(format!("h(1/2) must be positive, got {h_half}")));
    }
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("[a, b]", |u| f.evaluate(u), a, b)?;
    let (fa, fb) = (at(f, a, "f(a)")?, at(f, b, "f(b)")?);
    let mid = at(f, 0.5 * (a + b), "f((a+b)/2)")?;
    let rhs = ctx.moment(&inst.h, Moment::M1)?.scale(fa + fb);
    let sides = Sides { lhs, rhs, lower: Some(Est::exact(mid / (2.0 * h_half))) };
    let e = echo(inst, false, true, false, false, vec![nv("h_half", h_half)]);
    Ok(finish(TheoremId::T1_9, sides, e, ctx))
}

/// `(1/(m+1))[⨍_[a, mb] f + ⨍_[ma, b] f] ≤ (f(a)+f(b))∫h` for `0 ≤ a < mb`.
pub fn verify_t1_11(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    check_m(inst.m)?;
    let (a, b, m, f) = (inst.x, inst.y, inst.m, &inst.f);
    if !(0.0 <= a && a < b) {
        return Err(VerifyError::Precondition(format!("requires 0 ≤ a < b, got a={a}, b={b}")));
    }
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let first = ctx.mean("[a, mb]", |u| f.evaluate(u), a, m * b)?;
    let second = ctx.mean("[ma, b]", |u| f.evaluate(u), m * a, b)?;
    let lhs = first.add(second).scale(1.0 / (m + 1.0));
    let (fa, fb) = (at(f, a, "f(a)")?, at(f, b, "f(b)")?);
    let rhs = ctx.moment(&inst.h, Moment::M1)?.scale(fa + fb);
    let e = echo(inst, false, true, false, true, Vec::new());
    Ok(finish(TheoremId::T1_11, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `⨍_[φa, φb] f(u)f(φa+φb−u) ≤ [f(φa)² + f(φb)²]∫h(t)h(1−t) + 2f(φa)f(φb)∫h²`
pub fn verify_t1_13(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    let f = &inst.f;
    let (pa, pb) = phi_points(inst)?;
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("∫f(u)f(φa+φb−u)", |u| Ok(f.evaluate(u)? * f.evaluate(pa + pb - u)?), pa, pb)?;
    let (fa, fb) = (at(f, pa, "f(φ(a))")?, at(f, pb, "f(φ(b))")?);
    let mx = ctx.moment(&inst.h, Moment::Mx)?;
    let m2 = ctx.moment(&inst.h, Moment::M2)?;
    let rhs = mx.scale(fa * fa + fb * fb).add(m2.scale(2.0 * fa * fb));
    let e = echo(inst, false, true, true, false, vec![nv("phi_a", pa), nv("phi_b", pb)]);
    Ok(finish(TheoremId::T1_13, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// `⨍_[φa, φb] f·g ≤ M∫h² + N∫h(t)h(1−t)` with `M = f(φa)g(φa) + f(φb)g(φb)`.
pub fn verify_t1_14(inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    let (f, g) = (&inst.f, need_g(inst)?);
    let (pa, pb) = phi_points(inst)?;
    let mut ctx = Ctx { tol, diagnosis: Vec::new() };
    let lhs = ctx.mean("[φ(a), φ(b)]", |u| Ok(f.evaluate(u)? * g.evaluate(u)?), pa, pb)?;
    let (fa, fb) = (at(f, pa, "f(φ(a))")?, at(f, pb, "f(φ(b))")?);
    let (ga, gb) = (at(g, pa, "g(φ(a))")?, at(g, pb, "g(φ(b))")?);
    let big_m = fa * ga + fb * gb;
    let big_n = fa * gb + fb * ga;
    let m2 = ctx.moment(&inst.h, Moment::M2)?;
    let mx = ctx.moment(&inst.h, Moment::Mx)?;
    let rhs = m2.scale(big_m).add(mx.scale(big_n));
    let e = echo(
        inst,
        true,
        true,
        true,
        false,
        vec![nv("phi_a", pa), nv("phi_b", pb), nv("M", big_m), nv("N", big_n)],
    );
    Ok(finish(TheoremId::T1_14, Sides { lhs, rhs, lower: None }, e, ctx))
}

/// Dispatches to the verifier for `id`.
pub fn verify(id: TheoremId, inst: &Instance, tol: &Tolerances) -> Result<Verdict, VerifyError> {
    match id {
        TheoremId::Hc => verify_hc(inst, tol),
        TheoremId::T1_9 => verify_t1_9(inst, tol),
        TheoremId::T1_11 => verify_t1_11(inst, tol),
        TheoremId::T1_13 => verify_t1_13(inst, tol),
        TheoremId::T1_14 => verify_t1_14(inst, tol),
        TheoremId::T2_1 => verify_t2_1(inst, tol),
        TheoremId::T2_2dot => verify_t2_2dot(inst, tol),
        TheoremId::T2_2 => verify_t2_2(inst, tol),
        TheoremId::T2_3 => verify_t2_3(inst, tol),
    }
}

/// A new-class inequality paired with the background result it collapses to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ReductionPair {
    /// T2_1 at m = 1 against T1_13.
    #[serde(rename = "T2_1-T1_13")]
    T2_1ToT1_13,
    /// T2_2dot at m = 1, φ = id against the upper bound of T1_9.
    #[serde(rename = "T2_2dot-T1_9")]
    T2_2dotToT1_9,
    /// T2_2 at φ = id against T1_11.
    #[serde(rename = "T2_2-T1_11")]
    T2_2ToT1_11,
    /// T2_3 at m = 1 against T1_14.
    #[serde(rename = "T2_3-T1_14")]
    T2_3ToT1_14,
}

impl ReductionPair {
    pub const ALL: [ReductionPair; 4] = [
        ReductionPair::T2_1ToT1_13,
        ReductionPair::T2_2dotToT1_9,
        ReductionPair::T2_2ToT1_11,
        ReductionPair::T2_3ToT1_14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionPair::T2_1ToT1_13 => "T2_1-T1_13",
            ReductionPair::T2_2dotToT1_9 => "T2_2dot-T1_9",
            ReductionPair::T2_2ToT1_11 => "T2_2-T1_11",
            ReductionPair::T2_3ToT1_14 => "T2_3-T1_14",
        }
    }

    pub fn theorems(self) -> (TheoremId, TheoremId) {
        match self {
            ReductionPair::T2_1ToT1_13 => (TheoremId::T2_1, TheoremId::T1_13),
            ReductionPair::T2_2dotToT1_9 => (TheoremId::T2_2dot, TheoremId::T1_9),
            ReductionPair::T2_2ToT1_11 => (TheoremId::T2_2, TheoremId::T1_11),
            ReductionPair::T2_3ToT1_14 => (TheoremId::T2_3, TheoremId::T1_14),
        }
    }

    /// The probe with the pair's forced parameters applied.
    pub fn specialize(self, probe: &Instance) -> Instance {
        let mut p = probe.clone();
        match self {
            ReductionPair::T2_1ToT1_13 | ReductionPair::T2_3ToT1_14 => p.m = 1.0,
            ReductionPair::T2_2dotToT1_9 => {
                p.m = 1.0;
                p.phi = FuncDef::identity(probe.f.domain());
            }
            ReductionPair::T2_2ToT1_11 => p.phi = FuncDef::identity(probe.f.domain()),
        }
        p
    }
}

impl fmt::Display for ReductionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionPair {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionPair::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| VerifyError::Precondition(format!("unknown reduction pair `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub pair: ReductionPair,
    pub probes: usize,
    pub max_dev_lhs: f64,
    pub max_dev_rhs: f64,
    /// Largest combined quadrature error of a probe.
    pub max_quad_err: f64,
    pub pass: bool,
}

/// Runs both verifiers of `pair` on every probe (with the pair's forced
/// parameters) and compares their two sides.
pub fn check_reduction(
    pair: ReductionPair,
    probes: &[Instance],
    tol: &Tolerances,
    exec: Execution,
) -> Result<ReductionReport, VerifyError> {
    if probes.is_empty() {
        return Err(VerifyError::Precondition("reduction needs at least one probe".into()));
    }
    let (new_id, old_id) = pair.theorems();
    let results = exec.map(probes, |probe| {
        let p = pair.specialize(probe);
        let a = verify(new_id, &p, tol)?;
        let b = verify(old_id, &p, tol)?;
        Ok::<_, VerifyError>((a, b))
    });
    let mut report = ReductionReport {
        pair,
        probes: probes.len(),
        max_dev_lhs: 0.0,
        max_dev_rhs: 0.0,
        max_quad_err: 0.0,
        pass: true,
    };
    for r in results {
        let (a, b) = r?;
        let dl = (a.lhs - b.lhs).abs();
        let dr = (a.rhs - b.rhs).abs();
        let allowed = REDUCTION_SLACK + a.quad_err + b.quad_err;
        report.max_dev_lhs = report.max_dev_lhs.max(dl);
        report.max_dev_rhs = report.max_dev_rhs.max(dr);
        report.max_quad_err = report.max_quad_err.max(a.quad_err + b.quad_err);
        report.pass &= dl <= allowed && dr <= allowed;
    }
    Ok(report)
}

/// Ten probes on `[0, 1]` satisfying the hypotheses of both sides of `pair`.
pub fn default_probes(pair: ReductionPair) -> Vec<Instance> {
    use crate::funcdsl::{Family, Interval};
    let d = Interval::unit();
    let cat = |fam: Family, p: &[f64]| FuncDef::catalog(fam, p, d).expect("catalog member on [0, 1]");
    let expr = |s: &str, v: &str| FuncDef::from_expr(s, v, d).expect("valid expression");
    let fs = [
        cat(Family::Identity, &[]),
        cat(Family::Power, &[2.0]),
        cat(Family::Power, &[3.0]),
        cat(Family::Affine, &[2.0, 1.0]),
        cat(Family::Poly, &[1.0, 0.0, 1.0]),
        cat(Family::Sqrt, &[]),
        expr("exp(u)", "u"),
        cat(Family::Constant, &[2.0]),
        expr("abs(u - 0.5)", "u"),
        cat(Family::Power, &[1.5]),
    ];
    let hs = [
        cat(Family::Identity, &[]),
        cat(Family::Constant, &[1.0]),
        cat(Family::Power, &[2.0]),
        cat(Family::Power, &[0.5]),
        expr("t*(2 - t)", "t"),
    ];
    let phis = [cat(Family::Identity, &[]), expr("x/2 + 0.25", "x"), cat(Family::Power, &[2.0])];
    let points = [
        (0.0, 1.0),
        (0.1, 0.9),
        (0.2, 1.0),
        (0.0, 0.5),
        (0.3, 0.8),
        (0.25, 1.0),
        (0.05, 0.95),
        (0.4, 1.0),
        (0.1, 0.6),
        (0.0, 0.75),
    ];
    let ms = [0.5, 0.6, 0.75, 0.9, 0.8, 0.7, 0.55, 0.95, 0.65, 0.85];
    (0..10)
        .map(|i| {
            let (x, y) = points[i];
            let phi = match pair {
                ReductionPair::T2_1ToT1_13 | ReductionPair::T2_3ToT1_14 => phis[i % phis.len()].clone(),
                _ => phis[0].clone(),
            };
            let (x, y, m) = match pair {
                // 0 ≤ mx ≤ x < my ≤ y needs x < m·y
                ReductionPair::T2_2ToT1_11 => (0.4 * x * ms[i], y, ms[i]),
                _ => (x, y, 1.0),
            };
            Instance {
                f: fs[i].clone(),
                g: Some(fs[(i + 3) % fs.len()].clone()),
                h: hs[i % hs.len()].clone(),
                m,
                phi,
                x,
                y,
            }
        })
        .collect()
}
