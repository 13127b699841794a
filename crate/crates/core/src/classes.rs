//! The convexity classes as one parameterized defect functional.
//!
//! Every class is an instance of
//!
//! ```text
//! defect(x, y, t) = h(t)·f(φ(x)) + m·h(1−t)·f(φ(y)) − f(t·φ(x) + m(1−t)·φ(y))
//! ```
//!
//! with `h`, `m` and `φ` pinned to `t`, `1` and the identity where a class
//! does not use them. A function belongs to the class exactly when the
//! defect is non-negative for all `x, y` in `[0, B]` and `t` in `(0, 1)`
//! (plus `f ≥ 0` for the h-weighted classes). [`falsify`] searches for a
//! negative defect; [`certify_sampled`] reports the minimum over a fixed
//! probe set. Neither is a proof.
//!
//! The φ-convex class reads its defining inequality as
//! `t·f(φ(x)) + (1−t)·f(φ(y))`; see [`ClassSpec::notes`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::funcdsl::{EvalError, FuncDef, Interval};

/// Defects in `(−DEFAULT_TOL, 0)` are treated as roundoff.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_CERTIFY_SAMPLES: usize = 10_000;
pub const DEFAULT_FALSIFY_BUDGET: usize = 20_000;
const REFINE_ROUNDS: usize = 20;

/// Recorded in reports whenever the φ-convex class is used.
pub const PHI_CONVEX_READING: &str =
    "phi_convex: defining inequality read as f(t·φ(x)+(1−t)·φ(y)) ≤ t·f(φ(x)) + (1−t)·f(φ(y))";
pub const SAMPLED_EVIDENCE: &str = "sampled evidence over a finite probe set, not a proof of membership";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    Convex,
    MConvex,
    HConvex,
    HmConvex,
    PhiConvex,
    PhiHConvex,
    PhiHmConvex,
}

impl ClassTag {
    pub const ALL: [ClassTag; 7] = [
        ClassTag::Convex,
        ClassTag::MConvex,
        ClassTag::HConvex,
        ClassTag::HmConvex,
        ClassTag::PhiConvex,
        ClassTag::PhiHConvex,
        ClassTag::PhiHmConvex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Convex => "convex",
            ClassTag::MConvex => "m_convex",
            ClassTag::HConvex => "h_convex",
            ClassTag::HmConvex => "hm_convex",
            ClassTag::PhiConvex => "phi_convex",
            ClassTag::PhiHConvex => "phi_h_convex",
            ClassTag::PhiHmConvex => "phi_hm_convex",
        }
    }

    pub fn uses_h(self) -> bool {
        matches!(self, ClassTag::HConvex | ClassTag::HmConvex | ClassTag::PhiHConvex | ClassTag::PhiHmConvex)
    }

    pub fn uses_m(self) -> bool {
        matches!(self, ClassTag::MConvex | ClassTag::HmConvex | ClassTag::PhiHmConvex)
    }

    pub fn uses_phi(self) -> bool {
        matches!(self, ClassTag::PhiConvex | ClassTag::PhiHConvex | ClassTag::PhiHmConvex)
    }

    /// The h-weighted classes are defined for non-negative functions only.
    pub fn requires_nonnegative(self) -> bool {
        self.uses_h()
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ClassError::UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("unknown class `{0}`")]
    UnknownTag(String),
    #[error("class `{tag}` requires {what}")]
    Inconsistent { tag: ClassTag, what: &'static str },
    #[error("modulus m must lie in (0, 1], got {0}")]
    InvalidModulus(f64),
    #[error("domain bound B must be positive and finite, got {0}")]
    InvalidBound(f64),
    #[error("t must lie in the open interval (0, 1), got {0}")]
    InvalidWeight(f64),
    #[error("{what} = {at} lies outside the class domain [0, {bound}]")]
    OutsideDomain { what: &'static str, at: f64, bound: f64 },
    #[error("φ maps {x} to {value}, outside the class domain [0, {bound}]")]
    PhiRange { x: f64, value: f64, bound: f64 },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// One convexity class instance.
#[derive(Debug, Clone)]
pub struct ClassSpec {
    tag: ClassTag,
    h: FuncDef,
    m: f64,
    phi: FuncDef,
    domain: Interval,
}

impl ClassSpec {
    /// Validates the tag-specific parameter constraints: a class that does not
    /// use `h` needs `h(t) = t`, one that does not use `m` needs `m = 1`, and
    /// one that does not use `φ` needs the identity.
    pub fn new(tag: ClassTag, h: FuncDef, m: f64, phi: FuncDef, bound: f64) -> Result<Self, ClassError> {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(ClassError::InvalidBound(bound));
        }
        if !(m > 0.0 && m <= 1.0) {
            return Err(ClassError::InvalidModulus(m));
        }
        if !tag.uses_h() && !h.is_identity() {
            return Err(ClassError::Inconsistent { tag, what: "h(t) = t" });
        }
        if !tag.uses_m() && m != 1.0 {
            return Err(ClassError::Inconsistent { tag, what: "m = 1" });
        }
        if !tag.uses_phi() && !phi.is_identity() {
            return Err(ClassError::Inconsistent { tag, what: "φ = identity" });
        }
        let domain = Interval::new(0.0, bound).map_err(|_| ClassError::InvalidBound(bound))?;
        Ok(ClassSpec { tag, h, m, phi, domain })
    }

    fn plain_h() -> FuncDef {
        FuncDef::identity(Interval::unit())
    }

    fn plain_phi(bound: f64) -> FuncDef {
        FuncDef::identity(Interval::new(0.0, bound.max(0.0)).unwrap_or_else(|_| Interval::unit()))
    }

    pub fn convex(bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::Convex, Self::plain_h(), 1.0, Self::plain_phi(bound), bound)
    }

    pub fn m_convex(m: f64, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::MConvex, Self::plain_h(), m, Self::plain_phi(bound), bound)
    }

    pub fn h_convex(h: FuncDef, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::HConvex, h, 1.0, Self::plain_phi(bound), bound)
    }

    pub fn hm_convex(h: FuncDef, m: f64, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::HmConvex, h, m, Self::plain_phi(bound), bound)
    }

    pub fn phi_convex(phi: FuncDef, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::PhiConvex, Self::plain_h(), 1.0, phi, bound)
    }

    pub fn phi_h_convex(h: FuncDef, phi: FuncDef, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::PhiHConvex, h, 1.0, phi, bound)
    }

    pub fn phi_hm_convex(h: FuncDef, m: f64, phi: FuncDef, bound: f64) -> Result<Self, ClassError> {
        Self::new(ClassTag::PhiHmConvex, h, m, phi, bound)
    }

    pub fn tag(&self) -> ClassTag {
        self.tag
    }

    pub fn h(&self) -> &FuncDef {
        &self.h
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn phi(&self) -> &FuncDef {
        &self.phi
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Same class with a different h (used for h-dominance comparisons).
    pub fn with_h(&self, h: FuncDef) -> Result<Self, ClassError> {
        Self::new(self.tag, h, self.m, self.phi.clone(), self.domain.hi())
    }

    /// Interpretation notes to carry in report headers.
    pub fn notes(&self) -> Vec<&'static str> {
        if self.tag == ClassTag::PhiConvex {
            vec![PHI_CONVEX_READING]
        } else {
            Vec::new()
        }
    }
}

/// Both sides of the defining inequality at one probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectTerms {
    /// f(t·φ(x) + m(1−t)·φ(y))
    pub lhs: f64,
    /// h(t)·f(φ(x)) + m·h(1−t)·f(φ(y))
    pub rhs: f64,
    /// smallest of f(φ(x)), f(φ(y)) and the blended value
    pub min_value: f64,
}

impl DefectTerms {
    pub fn defect(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn defect_terms(f: &FuncDef, spec: &ClassSpec, x: f64, y: f64, t: f64) -> Result<DefectTerms, ClassError> {
    let bound = spec.domain.hi();
    if !(t > 0.0 && t < 1.0) {
        return Err(ClassError::InvalidWeight(t));
    }
    for (what, at) in [("x", x), ("y", y)] {
        if !spec.domain.contains(at) {
            return Err(ClassError::OutsideDomain { what, at, bound });
        }
    }
    let px = spec.phi.evaluate(x)?;
    let py = spec.phi.evaluate(y)?;
    for (arg, value) in [(x, px), (y, py)] {
        if !spec.domain.contains(value) {
            return Err(ClassError::PhiRange { x: arg, value, bound });
        }
    }
    let blend = t * px + spec.m * (1.0 - t) * py;
    if !spec.domain.contains(blend) {
        return Err(ClassError::OutsideDomain { what: "blend point", at: blend, bound });
    }
    let fx = f.evaluate(px)?;
    let fy = f.evaluate(py)?;
    let lhs = f.evaluate(blend)?;
    let rhs = spec.h.evaluate(t)? * fx + spec.m * spec.h.evaluate(1.0 - t)? * fy;
    Ok(DefectTerms { lhs, rhs, min_value: fx.min(fy).min(lhs) })
}

/// `h(t)f(φ(x)) + m·h(1−t)f(φ(y)) − f(tφ(x) + m(1−t)φ(y))`.
pub fn defect(f: &FuncDef, spec: &ClassSpec, x: f64, y: f64, t: f64) -> Result<f64, ClassError> {
    defect_terms(f, spec, x, y, t).map(|d| d.defect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triple {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub defect: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy)]
struct Probe {
    at: Triple,
    terms: DefectTerms,
}

impl Probe {
    fn defect(&self) -> f64 {
        self.terms.defect()
    }

    /// Total order: defect first, then the triple lexicographically.
    fn better_than(&self, other: &Probe) -> bool {
        self.defect()
            .total_cmp(&other.defect())
            .then_with(|| self.at.x.total_cmp(&other.at.x))
            .then_with(|| self.at.y.total_cmp(&other.at.y))
            .then_with(|| self.at.t.total_cmp(&other.at.t))
            .is_lt()
    }
}

#[derive(Debug, Default)]
struct Tally {
    best: Option<Probe>,
    evaluated: usize,
    skipped: usize,
    min_value: Option<f64>,
}

impl Tally {
    fn absorb(&mut self, results: Vec<(Triple, Result<DefectTerms, ClassError>)>) {
        for (at, r) in results {
            match r {
                Ok(terms) => {
                    self.evaluated += 1;
                    self.min_value = Some(self.min_value.map_or(terms.min_value, |m| m.min(terms.min_value)));
                    let p = Probe { at, terms };
                    if self.best.as_ref().is_none_or(|b| p.better_than(b)) {
                        self.best = Some(p);
                    }
                }
                Err(_) => self.skipped += 1,
            }
        }
    }
}

fn run_probes(f: &FuncDef, spec: &ClassSpec, probes: &[Triple], exec: Execution, tally: &mut Tally) {
    let results = exec.map(probes, |p| (*p, defect_terms(f, spec, p.x, p.y, p.t)));
    tally.absorb(results);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Total number of probes (grid plus refinement).
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: DEFAULT_FALSIFY_BUDGET, seed: 0, tol: DEFAULT_TOL, exec: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsifyReport {
    pub counterexample: Option<Counterexample>,
    /// Most negative defect seen, whether or not it beat the tolerance.
    pub min_defect: Option<f64>,
    pub probes: usize,
    /// Probes skipped because a precondition failed there (blend point or
    /// φ(x) outside the domain, f undefined).
    pub skipped: usize,
}

const OPEN_T_MIN: f64 = f64::EPSILON;
const OPEN_T_MAX: f64 = 1.0 - f64::EPSILON;

/// Seed-deterministic counterexample search: a coarse `(x, y, t)` grid
/// using about half the budget, then rounds of Gaussian perturbation around
/// the most negative probe with the spread halved each round.
pub fn falsify(f: &FuncDef, spec: &ClassSpec, cfg: &SearchConfig) -> FalsifyReport {
    let budget = cfg.budget.max(1);
    let lo = spec.domain.lo();
    let width = spec.domain.width();
    let mut tally = Tally::default();

    let k = (((budget / 2) as f64).cbrt().floor() as usize).max(1);
    let mut grid = Vec::with_capacity(k * k * k);
    let axis = |i: usize| if k == 1 { lo + 0.5 * width } else { lo + width * i as f64 / (k - 1) as f64 };
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                grid.push(Triple { x: axis(i), y: axis(j), t: (l as f64 + 0.5) / k as f64 });
            }
        }
    }
    grid.truncate(budget);
    run_probes(f, spec, &grid, cfg.exec, &mut tally);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut remaining = budget - grid.len();
    let mut sigma_xy = 0.25 * width;
    let mut sigma_t = 0.25;
    for round in 0..REFINE_ROUNDS {
        if remaining == 0 {
            break;
        }
        let n = remaining.div_ceil(REFINE_ROUNDS - round);
        remaining -= n;
        let centre = tally.best.map(|p| p.at);
        let batch: Vec<Triple> = (0..n)
            .map(|_| match centre {
                Some(c) => {
                    let dx: f64 = StandardNormal.sample(&mut rng);
                    let dy: f64 = StandardNormal.sample(&mut rng);
                    let dt: f64 = StandardNormal.sample(&mut rng);
                    Triple {
                        x: (c.x + sigma_xy * dx).clamp(lo, lo + width),
                        y: (c.y + sigma_xy * dy).clamp(lo, lo + width),
                        t: (c.t + sigma_t * dt).clamp(OPEN_T_MIN, OPEN_T_MAX),
                    }
                }
                None => Triple {
                    x: lo + width * rng.random::<f64>(),
                    y: lo + width * rng.random::<f64>(),
                    t: rng.random::<f64>().clamp(OPEN_T_MIN, OPEN_T_MAX),
                },
            })
            .collect();
        run_probes(f, spec, &batch, cfg.exec, &mut tally);
        sigma_xy *= 0.5;
        sigma_t *= 0.5;
    }

    let counterexample = tally.best.filter(|p| p.defect() < -cfg.tol).map(|p| Counterexample {
        x: p.at.x,
        y: p.at.y,
        t: p.at.t,
        defect: p.defect(),
        lhs: p.terms.lhs,
        rhs: p.terms.rhs,
    });
    FalsifyReport {
        counterexample,
        min_defect: tally.best.map(|p| p.defect()),
        probes: budget,
        skipped: tally.skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    /// Number of quasi-random triples on top of the fixed grid.
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub exec: Execution,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { samples: DEFAULT_CERTIFY_SAMPLES, seed: 0, tol: DEFAULT_TOL, exec: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub certified: bool,
    pub min_defect: Option<f64>,
    pub argmin: Option<Triple>,
    /// Probes where both sides evaluated.
    pub samples_ok: usize,
    pub skipped: usize,
    /// Smallest function value seen; only gates certification for classes
    /// that require f ≥ 0.
    pub min_value: Option<f64>,
    pub note: &'static str,
}

const HALTON_BASES: [u32; 3] = [2, 3, 5];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// The probe set used by [`certify_sampled`]: a boundary-biased grid followed
/// by `samples` shifted Halton points. Deterministic in `(domain, samples, seed)`.
pub fn certify_probes(domain: Interval, samples: usize, seed: u64) -> Vec<Triple> {
    let lo = domain.lo();
    let w = domain.width();
    let edge = 1e-3;
    let xs = [0.0, edge, 0.25, 0.5, 0.75, 1.0 - edge, 1.0];
    let ts = [edge, 0.25, 0.5, 0.75, 1.0 - edge];
    let mut probes = Vec::with_capacity(xs.len() * xs.len() * ts.len() + samples);
    for &a in &xs {
        for &b in &xs {
            for &t in &ts {
                probes.push(Triple { x: lo + w * a, y: lo + w * b, t });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    for i in 0..samples {
        let u: Vec<f64> = HALTON_BASES
            .iter()
            .zip(shift)
            .map(|(&b, s)| (radical_inverse(i as u64 + 1, b) + s).fract())
            .collect();
        probes.push(Triple {
            x: lo + w * u[0],
            y: lo + w * u[1],
            t: u[2].clamp(OPEN_T_MIN, OPEN_T_MAX),
        });
    }
    probes
}

/// Minimum defect over [`certify_probes`]; certified iff it is `≥ −tol`
/// (and, for the h-weighted classes, no sampled value of f is below `−tol`).
pub fn certify_sampled(f: &FuncDef, spec: &ClassSpec, cfg: &CertifyConfig) -> CertifyReport {
    let probes = certify_probes(spec.domain, cfg.samples.max(1), cfg.seed);
    let mut tally = Tally::default();
    run_probes(f, spec, &probes, cfg.exec, &mut tally);
    let min_defect = tally.best.map(|p| p.defect());
    let defect_ok = min_defect.is_some_and(|d| d >= -cfg.tol);
    let values_ok = !spec.tag.requires_nonnegative() || tally.min_value.is_some_and(|v| v >= -cfg.tol);
    CertifyReport {
        certified: defect_ok && values_ok,
        min_defect,
        argmin: tally.best.map(|p| p.at),
        samples_ok: tally.evaluated,
        skipped: tally.skipped,
        min_value: tally.min_value,
        note: SAMPLED_EVIDENCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::Family;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn square() -> FuncDef {
        FuncDef::catalog(Family::Power, &[2.0], Interval::new(0.0, f64::INFINITY).unwrap()).unwrap()
    }

    #[test]
    fn defect_of_square_at_midpoint() {
        // 0.5·0 + 0.5·1 − 0.25
        let d = defect(&square(), &ClassSpec::convex(1.0).unwrap(), 0.0, 1.0, 0.5).unwrap();
        assert_eq!(d, 0.25);
    }

    #[test]
    fn linear_is_tight() {
        let f = FuncDef::identity(unit());
        let spec = ClassSpec::convex(1.0).unwrap();
        for (x, y, t) in [(0.0, 1.0, 0.5), (0.25, 0.75, 0.25), (1.0, 0.0, 0.125)] {
            assert_eq!(defect(&f, &spec, x, y, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn sqrt_midpoint_defect() {
        let f = FuncDef::catalog(Family::Sqrt, &[], unit()).unwrap();
        let d = defect(&f, &ClassSpec::convex(1.0).unwrap(), 0.0, 1.0, 0.5).unwrap();
        let oracle = 0.5 - 0.5_f64.sqrt();
        assert!((d - oracle).abs() < 1e-15);
        assert!((d + 0.207_106_78).abs() < 1e-8);
    }

    #[test]
    fn tag_consistency_is_enforced() {
        let t2 = FuncDef::catalog(Family::Power, &[2.0], unit()).unwrap();
        let id = FuncDef::identity(unit());
        assert!(ClassSpec::new(ClassTag::Convex, t2.clone(), 1.0, id.clone(), 1.0).is_err());
        assert!(ClassSpec::new(ClassTag::HConvex, t2.clone(), 0.5, id.clone(), 1.0).is_err());
        assert!(ClassSpec::new(ClassTag::HmConvex, t2.clone(), 0.5, id.clone(), 1.0).is_ok());
        let half = FuncDef::from_expr("x/2", "x", unit()).unwrap();
        assert!(ClassSpec::new(ClassTag::MConvex, id.clone(), 0.5, half.clone(), 1.0).is_err());
        assert!(ClassSpec::new(ClassTag::PhiConvex, id.clone(), 1.0, half, 1.0).is_ok());
        assert!(ClassSpec::m_convex(0.0, 1.0).is_err());
        assert!(ClassSpec::m_convex(1.5, 1.0).is_err());
        assert!(ClassSpec::convex(0.0).is_err());
    }

    #[test]
    fn t_endpoints_are_rejected() {
        let spec = ClassSpec::convex(1.0).unwrap();
        assert!(matches!(defect(&square(), &spec, 0.0, 1.0, 0.0), Err(ClassError::InvalidWeight(_))));
        assert!(defect(&square(), &spec, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi_range_violation_is_an_error() {
        let phi = FuncDef::from_expr("x + 0.5", "x", unit()).unwrap();
        let spec = ClassSpec::phi_convex(phi, 1.0).unwrap();
        let r = defect(&square(), &spec, 0.0, 0.9, 0.5);
        assert!(matches!(r, Err(ClassError::PhiRange { .. })));
    }

    #[test]
    fn blend_outside_f_domain_is_error_not_counterexample() {
        let f = FuncDef::catalog(Family::Power, &[2.0], Interval::new(0.5, 1.0).unwrap()).unwrap();
        let spec = ClassSpec::m_convex(0.5, 1.0).unwrap();
        // blend = 0.5·0.6 + 0.25·0.6 = 0.45 < 0.5
        assert!(matches!(defect(&f, &spec, 0.6, 0.6, 0.5), Err(ClassError::Eval(_))));
        let r = falsify(&f, &spec, &SearchConfig { budget: 2000, seed: 1, ..Default::default() });
        assert!(r.skipped > 0);
    }

    #[test]
    fn falsify_finds_sqrt_counterexample() {
        let f = FuncDef::catalog(Family::Sqrt, &[], unit()).unwrap();
        let spec = ClassSpec::convex(1.0).unwrap();
        let r = falsify(&f, &spec, &SearchConfig { budget: 10_000, seed: 42, ..Default::default() });
        let cx = r.counterexample.expect("counterexample");
        assert!(cx.defect <= -0.2, "{cx:?}");
        assert_eq!(cx.defect, cx.rhs - cx.lhs);
    }

    #[test]
    fn falsify_finds_nothing_for_square() {
        let spec = ClassSpec::convex(1.0).unwrap();
        let r = falsify(&square(), &spec, &SearchConfig { budget: 10_000, seed: 42, ..Default::default() });
        assert!(r.counterexample.is_none());
        assert_eq!(r.probes, 10_000);
    }

    #[test]
    fn h_dominance_matters() {
        // h = t²: at (0.5, 0.5, 0.5), 2·(0.25·0.25) − 0.25 = −0.125
        let h = FuncDef::catalog(Family::Power, &[2.0], unit()).unwrap();
        let spec = ClassSpec::h_convex(h, 1.0).unwrap();
        let d = defect(&square(), &spec, 0.5, 0.5, 0.5).unwrap();
        assert_eq!(d, -0.125);
        let r = falsify(&square(), &spec, &SearchConfig { budget: 10_000, seed: 3, ..Default::default() });
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn certify_square_and_constant() {
        let spec = ClassSpec::convex(1.0).unwrap();
        let r = certify_sampled(&square(), &spec, &CertifyConfig::default());
        assert!(r.certified);
        assert!(r.min_defect.unwrap() >= -1e-15);

        let c = FuncDef::constant(1.0, unit()).unwrap();
        let r = certify_sampled(&c, &spec, &CertifyConfig::default());
        assert_eq!(r.min_defect, Some(0.0));
    }

    #[test]
    fn p_function_family_certifies_square() {
        let one = FuncDef::constant(1.0, unit()).unwrap();
        let spec = ClassSpec::h_convex(one, 1.0).unwrap();
        let r = certify_sampled(&square(), &spec, &CertifyConfig { samples: 10_000, ..Default::default() });
        assert!(r.certified);
        assert_eq!(r.min_defect, Some(0.0));
    }

    #[test]
    fn negative_function_fails_h_class_certification() {
        let f = FuncDef::from_expr("x - 1", "x", unit()).unwrap();
        let h = FuncDef::identity(unit());
        let r = certify_sampled(&f, &ClassSpec::h_convex(h, 1.0).unwrap(), &CertifyConfig::default());
        assert!(!r.certified);
        // plain convexity has no sign requirement
        let r = certify_sampled(&f, &ClassSpec::convex(1.0).unwrap(), &CertifyConfig::default());
        assert!(r.certified);
    }

    #[test]
    fn probe_t_stays_open() {
        for p in certify_probes(unit(), 5000, 9) {
            assert!(p.t > 0.0 && p.t < 1.0);
            assert!(unit().contains(p.x) && unit().contains(p.y));
        }
    }

    #[test]
    fn phi_convex_notes_reading() {
        let spec = ClassSpec::phi_convex(FuncDef::identity(unit()), 1.0).unwrap();
        assert_eq!(spec.notes(), vec![PHI_CONVEX_READING]);
        assert!(ClassSpec::convex(1.0).unwrap().notes().is_empty());
    }

    #[test]
    fn tags_parse() {
        for t in ClassTag::ALL {
            assert_eq!(t.name().parse::<ClassTag>().unwrap(), t);
        }
    }
}
