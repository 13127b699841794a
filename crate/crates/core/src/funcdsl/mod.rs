//! Scalar functions of one real variable: an expression language, a catalog of
//! named families, and [`FuncDef`], the domain-checked function value every
//! other module works with.
//!
//! A `FuncDef` is immutable and cheap to clone (the definition sits behind an
//! `Arc`), so the same function can be evaluated from many threads.

mod catalog;
mod expr;
mod parser;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{CatalogFn, Family};
pub use expr::{BinaryOp, Expr, ExprDisplay, UnaryOp};
pub use parser::{infer_variable, parse, parse_with_bindings, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("{at} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { at: f64, lo: f64, hi: f64 },
    #[error("{op} is undefined at {arg}")]
    Undefined { op: &'static str, arg: f64 },
    #[error("non-finite value produced from argument {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuncError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown function family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter for `{family}`: {reason}")]
    InvalidParameter { family: &'static str, reason: String },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("requested interval {requested} does not meet the natural domain {natural} of `{family}`")]
    EmptyDomain { family: String, requested: Interval, natural: Interval },
}

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuncError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(FuncError::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub(crate) fn new_unchecked(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, u: f64) -> bool {
        self.lo <= u && u <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug)]
enum Source {
    Expr { expr: Expr, var: String },
    Catalog(CatalogFn),
    /// `lambda·f + mu·g`
    Combination { f: FuncDef, g: FuncDef, lambda: f64, mu: f64 },
    /// `outer ∘ inner`
    Composition { outer: FuncDef, inner: FuncDef },
    /// `t ↦ f(t·px + m(1−t)·py)`
    Segment { f: FuncDef, px: f64, py: f64, m: f64 },
}

/// A real function of one variable together with the closed interval it may
/// be evaluated on. Evaluation outside the interval is an error.
#[derive(Debug, Clone)]
pub struct FuncDef {
    source: Arc<Source>,
    domain: Interval,
}

impl FuncDef {
    /// Parses `text` in variable `var`.
    pub fn from_expr(text: &str, var: &str, domain: Interval) -> Result<Self, FuncError> {
        let expr = parse(text, var)?;
        Ok(Self::from_tree(expr, var, domain))
    }

    pub fn from_tree(expr: Expr, var: &str, domain: Interval) -> Self {
        FuncDef { source: Arc::new(Source::Expr { expr, var: var.to_string() }), domain }
    }

    /// Named catalog family, restricted to the intersection of `domain` with
    /// the family's natural domain.
    pub fn catalog(family: Family, params: &[f64], domain: Interval) -> Result<Self, FuncError> {
        let cf = CatalogFn::new(family, params)?;
        let natural = cf.natural_domain();
        let clipped = domain.intersect(&natural).ok_or_else(|| FuncError::EmptyDomain {
            family: cf.to_string(),
            requested: domain,
            natural,
        })?;
        Ok(FuncDef { source: Arc::new(Source::Catalog(cf)), domain: clipped })
    }

    /// [`FuncDef::catalog`] with the family given by name.
    pub fn catalog_named(name: &str, params: &[f64], domain: Interval) -> Result<Self, FuncError> {
        Self::catalog(name.parse()?, params, domain)
    }

    pub fn identity(domain: Interval) -> Self {
        Self::catalog(Family::Identity, &[], domain).expect("identity is defined everywhere")
    }

    pub fn constant(c: f64, domain: Interval) -> Result<Self, FuncError> {
        Self::catalog(Family::Constant, &[c], domain)
    }

    pub(crate) fn combination(f: FuncDef, g: FuncDef, lambda: f64, mu: f64) -> Self {
        let domain = f.domain;
        FuncDef { source: Arc::new(Source::Combination { f, g, lambda, mu }), domain }
    }

    pub(crate) fn composition(outer: FuncDef, inner: FuncDef) -> Self {
        let domain = inner.domain;
        FuncDef { source: Arc::new(Source::Composition { outer, inner }), domain }
    }

    pub(crate) fn segment(f: FuncDef, px: f64, py: f64, m: f64) -> Self {
        FuncDef { source: Arc::new(Source::Segment { f, px, py, m }), domain: Interval::unit() }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Same definition on a different interval.
    pub fn with_domain(&self, domain: Interval) -> Self {
        FuncDef { source: Arc::clone(&self.source), domain }
    }

    pub fn evaluate(&self, u: f64) -> Result<f64, EvalError> {
        if !self.domain.contains(u) {
            return Err(EvalError::OutOfDomain { at: u, lo: self.domain.lo, hi: self.domain.hi });
        }
        match self.source.as_ref() {
            Source::Expr { expr, .. } => expr.eval(u),
            Source::Catalog(c) => c.eval(u),
            Source::Combination { f, g, lambda, mu } => {
                let v = lambda * f.evaluate(u)? + mu * g.evaluate(u)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite { at: u })
                }
            }
            Source::Composition { outer, inner } => outer.evaluate(inner.evaluate(u)?),
            Source::Segment { f, px, py, m } => f.evaluate(u * px + m * (1.0 - u) * py),
        }
    }

    /// Slope `c` when the function is structurally `u ↦ c·u` (no intercept).
    pub fn linear_slope(&self) -> Option<f64> {
        match self.source.as_ref() {
            Source::Expr { expr, .. } => expr.linear_slope(),
            Source::Catalog(c) => c.linear_slope(),
            _ => None,
        }
    }

    /// True when the function is structurally the identity map.
    pub fn is_identity(&self) -> bool {
        self.linear_slope() == Some(1.0)
    }

    pub fn as_catalog(&self) -> Option<&CatalogFn> {
        match self.source.as_ref() {
            Source::Catalog(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for FuncDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.source.as_ref() {
            Source::Expr { expr, var } => write!(f, "{}", expr.display(var)),
            Source::Catalog(c) => write!(f, "{c}"),
            Source::Combination { f: a, g, lambda, mu } => write!(f, "{lambda:?}*[{a}] + {mu:?}*[{g}]"),
            Source::Composition { outer, inner } => write!(f, "[{outer}]∘[{inner}]"),
            Source::Segment { f: base, px, py, m } => {
                write!(f, "segment[{base}](t*{px:?} + {m:?}*(1-t)*{py:?})")
            }
        }
    }
}
