//! Adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals.
//!
//! Only interior nodes are used, so integrands with endpoint singularities
//! (`1/√t`, `ln t`) are fine. The panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance, the evaluation
//! budget is spent, or every remaining offender has hit the depth limit. The
//! last two outcomes are reported through [`Precision`] rather than as errors
//! so callers can surface them as indeterminate results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::funcdsl::{EvalError, FuncDef};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default evaluation budget per integral.
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;
/// Bisection depth past which a panel is no longer refined.
pub const DEFAULT_MAX_DEPTH: u32 = 200;

const NODES_PER_PANEL: usize = 21;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub max_evals: usize,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: DEFAULT_TOL, max_evals: DEFAULT_MAX_EVALS, max_depth: DEFAULT_MAX_DEPTH }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol, ..Default::default() }
    }
}

/// How an adaptive integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Converged,
    /// Evaluation budget spent before the tolerance was met.
    BudgetExhausted,
    /// Some panel stopped improving under repeated bisection, the usual
    /// signature of a non-integrable singularity.
    DepthLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
    pub precision: Precision,
}

impl Integral {
    pub fn is_indeterminate(&self) -> bool {
        self.precision != Precision::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integration interval [{a}, {b}] is empty or reversed")]
    Orientation { a: f64, b: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("integrand failed at {at}: {source}")]
    Integrand { at: f64, source: EvalError },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; position breaks ties so the order is total
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk21<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let call = |u: f64| -> Result<f64, QuadError> {
        match f(u) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(QuadError::Integrand { at: u, source: EvalError::NonFinite { at: u } }),
            Err(source) => Err(QuadError::Integrand { at: u, source }),
        }
    };

    let fc = call(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    // weight sums accumulated in the same order, so constants integrate exactly
    let mut k_sum = WGK[10];
    let mut g_sum = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = call(center - dx)?;
        let f2 = call(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        k_sum += WGK[j] * 2.0;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
            g_sum += WG[j / 2] * 2.0;
        }
    }
    res_k = res_k / k_sum * 2.0;
    res_g = res_g / g_sum * 2.0;
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let scale = half.abs();
    Ok((res_k * half, rescale_error(err, res_abs * scale, res_asc * scale)))
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Integral, QuadError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::Orientation { a, b });
    }
    if !(cfg.tol > 0.0) || !cfg.tol.is_finite() {
        return Err(QuadError::InvalidTolerance(cfg.tol));
    }

    let (value, err) = gk21(&f, a, b)?;
    let mut evaluations = NODES_PER_PANEL;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err, depth: 0 });
    let mut frozen: Vec<Panel> = Vec::new();
    let mut total_err = err;
    let mut precision = Precision::Converged;

    while total_err > cfg.tol {
        let Some(worst) = heap.pop() else {
            precision = Precision::DepthLimit;
            break;
        };
        if evaluations + 2 * NODES_PER_PANEL > cfg.max_evals {
            heap.push(worst);
            precision = Precision::BudgetExhausted;
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= cfg.max_depth || !(worst.a < mid && mid < worst.b) {
            frozen.push(worst);
            // frozen panels cannot improve; once they alone exceed tol, stop
            if frozen.iter().map(|p| p.err).sum::<f64>() > cfg.tol {
                precision = Precision::DepthLimit;
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid)?;
        let (v2, e2) = gk21(&f, mid, worst.b)?;
        evaluations += 2 * NODES_PER_PANEL;
        let depth = worst.depth + 1;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, depth });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, depth });
        // recompute rather than update incrementally so cancellation cannot drift
        total_err = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = neumaier_sum(panels.iter().map(|p| p.value));
    let abs_err = panels.iter().map(|p| p.err).sum();
    Ok(Integral { value, abs_err, evaluations, precision })
}

/// Integrates a [`FuncDef`] over `[a, b]`.
pub fn integrate_fn(f: &FuncDef, a: f64, b: f64, cfg: &QuadConfig) -> Result<Integral, QuadError> {
    integrate(|u| f.evaluate(u), a, b, cfg)
}

/// The three h-integrals over (0, 1) that appear on every right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HMoments {
    /// ∫₀¹ h(t) dt
    pub m1: Integral,
    /// ∫₀¹ h(t)² dt
    pub m2: Integral,
    /// ∫₀¹ h(t)·h(1−t) dt
    pub mx: Integral,
}

impl HMoments {
    pub fn is_indeterminate(&self) -> bool {
        self.m1.is_indeterminate() || self.m2.is_indeterminate() || self.mx.is_indeterminate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    /// ∫₀¹ h(t) dt
    M1,
    /// ∫₀¹ h(t)² dt
    M2,
    /// ∫₀¹ h(t)·h(1−t) dt
    Mx,
}

pub fn h_moment(h: &FuncDef, which: Moment, cfg: &QuadConfig) -> Result<Integral, QuadError> {
    match which {
        Moment::M1 => integrate(|t| h.evaluate(t), 0.0, 1.0, cfg),
        Moment::M2 => integrate(
            |t| {
                let v = h.evaluate(t)?;
                Ok(v * v)
            },
            0.0,
            1.0,
            cfg,
        ),
        Moment::Mx => integrate(|t| Ok(h.evaluate(t)? * h.evaluate(1.0 - t)?), 0.0, 1.0, cfg),
    }
}

pub fn h_moments(h: &FuncDef, cfg: &QuadConfig) -> Result<HMoments, QuadError> {
    Ok(HMoments {
        m1: h_moment(h, Moment::M1, cfg)?,
        m2: h_moment(h, Moment::M2, cfg)?,
        mx: h_moment(h, Moment::Mx, cfg)?,
    })
}
