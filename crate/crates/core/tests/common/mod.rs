#![allow(dead_code)]

use genconvex::funcdsl::{Family, FuncDef, Interval};

/// Composite Simpson rule on `n` (even) panels. Independent of the adaptive
/// Gauss–Kronrod engine; used as a reference for integrals without a closed
/// form at hand.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

pub fn unit() -> Interval {
    Interval::unit()
}

pub fn id() -> FuncDef {
    FuncDef::identity(unit())
}

pub fn pow(s: f64) -> FuncDef {
    FuncDef::catalog(Family::Power, &[s], unit()).unwrap()
}

pub fn constant(c: f64) -> FuncDef {
    FuncDef::constant(c, unit()).unwrap()
}

pub fn expr(text: &str, var: &str) -> FuncDef {
    FuncDef::from_expr(text, var, unit()).unwrap()
}

/// Catalog members on [0, 1] that are non-negative there.
pub fn nonneg_catalog() -> Vec<FuncDef> {
    let d = unit();
    vec![
        FuncDef::catalog(Family::Identity, &[], d).unwrap(),
        FuncDef::catalog(Family::Constant, &[0.7], d).unwrap(),
        FuncDef::catalog(Family::Power, &[2.0], d).unwrap(),
        FuncDef::catalog(Family::Power, &[3.0], d).unwrap(),
        FuncDef::catalog(Family::Power, &[1.5], d).unwrap(),
        FuncDef::catalog(Family::Power, &[0.5], d).unwrap(),
        FuncDef::catalog(Family::Affine, &[2.0, 1.0], d).unwrap(),
        FuncDef::catalog(Family::Affine, &[-1.0, 1.0], d).unwrap(),
        FuncDef::catalog(Family::Poly, &[1.0, -1.0, 1.0], d).unwrap(),
        FuncDef::catalog(Family::Poly, &[0.0, 0.5, 0.0, 2.0], d).unwrap(),
        FuncDef::catalog(Family::Sqrt, &[], d).unwrap(),
    ]
}
