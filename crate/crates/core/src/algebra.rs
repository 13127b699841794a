//! Constructions that stay inside a class: non-negative combinations,
//! enlarging `h`, composing with `φ`, and the segment function
//! `g(t) = f(t·φ(x) + m(1−t)·φ(y))`. Each result is an ordinary [`FuncDef`]
//! and can be checked with [`crate::classes`].

use serde::Serialize;
use thiserror::Error;

use crate::funcdsl::{EvalError, FuncDef, Interval};

/// Points used to sample ranges and monotonicity.
const SAMPLE_GRID: usize = 1025;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("domains differ: {0} vs {1}")]
    DomainMismatch(Interval, Interval),
    #[error("weights must be finite and non-negative, got λ={lambda}, μ={mu}")]
    InvalidWeight { lambda: f64, mu: f64 },
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("φ({at}) = {value} lies outside the domain {domain} of f")]
    RangeViolation { at: f64, value: f64, domain: Interval },
    #[error("segment point for t = {t} is undefined: {source}")]
    Segment { t: f64, source: EvalError },
    #[error("evaluation failed at {at}: {source}")]
    Eval { at: f64, source: EvalError },
    #[error("modulus m must lie in (0, 1], got {0}")]
    InvalidModulus(f64),
}

/// `λ·f + μ·g` on the shared domain.
pub fn combine(f: &FuncDef, g: &FuncDef, lambda: f64, mu: f64) -> Result<FuncDef, AlgebraError> {
    if !(lambda >= 0.0 && mu >= 0.0) || !lambda.is_finite() || !mu.is_finite() {
        return Err(AlgebraError::InvalidWeight { lambda, mu });
    }
    if f.domain() != g.domain() {
        return Err(AlgebraError::DomainMismatch(f.domain(), g.domain()));
    }
    Ok(FuncDef::combination(f.clone(), g.clone(), lambda, mu))
}

/// `λ·f`, as `combine(f, 0, λ, 0)`.
pub fn scale(f: &FuncDef, lambda: f64) -> Result<FuncDef, AlgebraError> {
    let zero = FuncDef::constant(0.0, f.domain()).expect("constants are defined everywhere");
    combine(f, &zero, lambda, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    /// `h2(t) ≤ h1(t)` at every grid point.
    pub dominates: bool,
    /// `min (h1(t) − h2(t))` over the grid.
    pub worst_gap: f64,
    pub worst_t: f64,
}

/// Checks `h2 ≤ h1` on the interior grid `t_i = i/(grid+1)`. When it holds,
/// every function in the class built on `h2` is also in the class built on
/// `h1` (same `m` and `φ`).
pub fn dominance_inclusion(h1: &FuncDef, h2: &FuncDef, grid: usize) -> Result<Dominance, AlgebraError> {
    if grid < 3 {
        return Err(AlgebraError::GridTooSmall(grid));
    }
    let mut worst = Dominance { dominates: true, worst_gap: f64::INFINITY, worst_t: f64::NAN };
    for i in 1..=grid {
        let t = i as f64 / (grid + 1) as f64;
        let v1 = h1.evaluate(t).map_err(|source| AlgebraError::Eval { at: t, source })?;
        let v2 = h2.evaluate(t).map_err(|source| AlgebraError::Eval { at: t, source })?;
        let gap = v1 - v2;
        if gap < worst.worst_gap {
            worst.worst_gap = gap;
            worst.worst_t = t;
        }
    }
    worst.dominates = worst.worst_gap >= 0.0;
    Ok(worst)
}

fn sample_grid(domain: Interval) -> impl Iterator<Item = f64> {
    let (lo, w) = (domain.lo(), domain.width());
    (0..SAMPLE_GRID).map(move |i| if i + 1 == SAMPLE_GRID { lo + w } else { lo + w * i as f64 / (SAMPLE_GRID - 1) as f64 })
}

/// `f ∘ φ` on φ's domain. The range of φ is sampled on a fine grid and
/// must land in f's domain.
pub fn compose_phi(f: &FuncDef, phi: &FuncDef) -> Result<FuncDef, AlgebraError> {
    for u in sample_grid(phi.domain()) {
        let value = phi.evaluate(u).map_err(|source| AlgebraError::Eval { at: u, source })?;
        if !f.domain().contains(value) {
            return Err(AlgebraError::RangeViolation { at: u, value, domain: f.domain() });
        }
    }
    Ok(FuncDef::composition(f.clone(), phi.clone()))
}

/// Non-decreasing on a grid of its domain (finite differences, tolerance 0).
/// A necessary check only.
pub fn is_increasing(f: &FuncDef) -> Result<bool, AlgebraError> {
    let mut prev: Option<f64> = None;
    for u in sample_grid(f.domain()) {
        let v = f.evaluate(u).map_err(|source| AlgebraError::Eval { at: u, source })?;
        if prev.is_some_and(|p| v < p) {
            return Ok(false);
        }
        prev = Some(v);
    }
    Ok(true)
}

/// Why `f ∘ φ` is expected to be (h, m)-convex when `f` is φ_{h,m}-convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionCase {
    /// φ(u) = c·u exactly. An intercept breaks the argument once m ≠ 1.
    LinearPhi { slope: f64 },
    /// f non-decreasing and φ m-convex; the m-convexity of φ still has to be
    /// certified separately.
    IncreasingOuter,
}

/// Which composition argument applies to `(f, φ)`, if any.
pub fn composition_case(f: &FuncDef, phi: &FuncDef) -> Result<Option<CompositionCase>, AlgebraError> {
    if let Some(slope) = phi.linear_slope() {
        return Ok(Some(CompositionCase::LinearPhi { slope }));
    }
    Ok(is_increasing(f)?.then_some(CompositionCase::IncreasingOuter))
}

/// `g(t) = f(t·φ(x) + m(1−t)·φ(y))` on `t ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct SegmentFunction {
    base: FuncDef,
    phi_x: f64,
    phi_y: f64,
    m: f64,
    g: FuncDef,
}

impl SegmentFunction {
    pub fn base(&self) -> &FuncDef {
        &self.base
    }

    pub fn phi_x(&self) -> f64 {
        self.phi_x
    }

    pub fn phi_y(&self) -> f64 {
        self.phi_y
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn evaluate(&self, t: f64) -> Result<f64, EvalError> {
        self.g.evaluate(t)
    }

    /// The segment as a plain function on `[0, 1]`.
    pub fn as_funcdef(&self) -> &FuncDef {
        &self.g
    }
}

/// Builds the segment function, probing it on a grid of `t` so a blend point
/// outside f's domain is reported at construction.
pub fn segment(f: &FuncDef, phi: &FuncDef, m: f64, x: f64, y: f64) -> Result<SegmentFunction, AlgebraError> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(AlgebraError::InvalidModulus(m));
    }
    let phi_x = phi.evaluate(x).map_err(|source| AlgebraError::Eval { at: x, source })?;
    let phi_y = phi.evaluate(y).map_err(|source| AlgebraError::Eval { at: y, source })?;
    let g = FuncDef::segment(f.clone(), phi_x, phi_y, m);
    for t in sample_grid(Interval::unit()) {
        g.evaluate(t).map_err(|source| AlgebraError::Segment { t, source })?;
    }
    Ok(SegmentFunction { base: f.clone(), phi_x, phi_y, m, g })
}
