mod common;

use common::*;
use genconvex::algebra::*;
use genconvex::classes::{certify_sampled, defect, CertifyConfig, ClassSpec};
use genconvex::funcdsl::{Family, FuncDef, Interval};
use proptest::prelude::*;

#[test]
fn combine_examples() {
    let f = combine(&pow(2.0), &id(), 1.0, 1.0).unwrap();
    assert_eq!(f.evaluate(0.5), Ok(0.75));
    let spec = ClassSpec::convex(1.0).unwrap();
    assert_eq!(defect(&f, &spec, 0.0, 1.0, 0.5).unwrap(), 0.25);
}

#[test]
fn dominance_examples() {
    let one = constant(1.0);
    let d = dominance_inclusion(&one, &id(), 99).unwrap();
    assert!(d.dominates);
    let d = dominance_inclusion(&id(), &id(), 99).unwrap();
    assert!(d.dominates && d.worst_gap == 0.0);
    let d = dominance_inclusion(&id(), &one, 99).unwrap();
    assert!(!d.dominates);
    assert!(dominance_inclusion(&id(), &one, 2).is_err());
}

#[test]
fn dominance_is_reflexive_and_transitive_on_power_family() {
    let hs: Vec<FuncDef> = [0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|&s| pow(s)).chain([constant(1.0)]).collect();
    let dom = |a: &FuncDef, b: &FuncDef| dominance_inclusion(a, b, 63).unwrap().dominates;
    for a in &hs {
        assert!(dom(a, a));
        for b in &hs {
            for c in &hs {
                if dom(a, b) && dom(b, c) {
                    assert!(dom(a, c), "{a} ≥ {b} ≥ {c}");
                }
            }
        }
    }
}

#[test]
fn compose_examples() {
    let d2 = Interval::new(0.0, 2.0).unwrap();
    let sq = FuncDef::catalog(Family::Power, &[2.0], unit()).unwrap();
    let half = FuncDef::from_expr("u/2", "u", d2).unwrap();
    let c = compose_phi(&sq, &half).unwrap();
    assert_eq!(c.evaluate(1.5), Ok(0.5625));
    let r = certify_sampled(&c, &ClassSpec::convex(2.0).unwrap(), &CertifyConfig::default());
    assert!(r.certified);
    assert_eq!(composition_case(&sq, &half).unwrap(), Some(CompositionCase::LinearPhi { slope: 0.5 }));

    let sqrt = FuncDef::catalog(Family::Sqrt, &[], unit()).unwrap();
    let c = compose_phi(&sqrt, &pow(2.0)).unwrap();
    for u in [0.0, 0.25, 0.5, 1.0] {
        assert!((c.evaluate(u).unwrap() - u).abs() <= 1e-15);
    }
    assert!(certify_sampled(&c, &ClassSpec::convex(1.0).unwrap(), &CertifyConfig::default()).certified);
    assert_eq!(composition_case(&sqrt, &pow(2.0)).unwrap(), Some(CompositionCase::IncreasingOuter));
    assert!(compose_phi(&sq, &FuncDef::from_expr("u + 1", "u", unit()).unwrap()).is_err());
}

#[test]
fn segment_closed_forms() {
    let sq = pow(2.0);
    let g = segment(&sq, &id(), 1.0, 1.0, 0.0).unwrap();
    let g2 = segment(&sq, &id(), 1.0, 0.0, 1.0).unwrap();
    for t in [0.1, 0.5, 0.9] {
        assert_eq!(g.evaluate(t).unwrap(), t * t);
        assert!((g2.evaluate(t).unwrap() - (1.0 - t) * (1.0 - t)).abs() <= 1e-15);
    }
    let c = segment(&constant(0.4), &id(), 0.3, 0.2, 0.9).unwrap();
    assert_eq!(c.evaluate(0.37), Ok(0.4));
    let half = segment(&sq, &id(), 0.5, 1.0, 1.0).unwrap();
    assert_eq!(half.evaluate(0.5).unwrap(), 0.5625);
}

#[test]
fn segment_certifies_at_unit_modulus() {
    let cfg = CertifyConfig::default();
    let spec = ClassSpec::convex(1.0).unwrap();
    for f in nonneg_catalog() {
        if !certify_sampled(&f, &spec, &cfg).certified {
            continue;
        }
        for (x, y) in [(0.0, 1.0), (1.0, 1.0), (0.3, 0.8)] {
            let g = segment(&f, &id(), 1.0, x, y).unwrap();
            let r = certify_sampled(g.as_funcdef(), &spec, &cfg);
            assert!(r.certified, "{f} ({x},{y}): {r:?}");
        }
    }
}

#[test]
fn segment_below_unit_modulus_can_fail() {
    // u² is (t, ½)-convex, but g(t) = ((1+t)/2)² has defect
    // (t + ½(1−t) − 1)·g(0) = −(1−t)/8 at x' = y' = 0.
    let sq = pow(2.0);
    let spec = ClassSpec::m_convex(0.5, 1.0).unwrap();
    let cfg = CertifyConfig::default();
    assert!(certify_sampled(&sq, &spec, &cfg).certified);
    let g = segment(&sq, &id(), 0.5, 1.0, 1.0).unwrap();
    for t in [0.01, 0.25, 0.5] {
        let d = defect(g.as_funcdef(), &spec, 0.0, 0.0, t).unwrap();
        assert!((d + (1.0 - t) / 8.0).abs() <= 1e-15);
    }
    assert!(!certify_sampled(g.as_funcdef(), &spec, &cfg).certified);
}

proptest! {
    #[test]
    fn defect_of_combination_distributes(
        fi in 0usize..11, gi in 0usize..11,
        lambda in 0.0f64..10.0, mu in 0.0f64..10.0,
        m in 0.1f64..1.0, x in 0.0f64..1.0, y in 0.0f64..1.0, t in 1e-6f64..0.999999,
    ) {
        let f = nonneg_catalog().swap_remove(fi);
        let g = nonneg_catalog().swap_remove(gi);
        let spec = ClassSpec::hm_convex(id(), m, 1.0).unwrap();
        let c = combine(&f, &g, lambda, mu).unwrap();
        let lhs = defect(&c, &spec, x, y, t).unwrap();
        let rhs = lambda * defect(&f, &spec, x, y, t).unwrap() + mu * defect(&g, &spec, x, y, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lambda + mu));
    }

    #[test]
    fn compose_with_identity_is_bitwise(fi in 0usize..11, u in 0.0f64..1.0) {
        let f = nonneg_catalog().swap_remove(fi);
        let c = compose_phi(&f, &id()).unwrap();
        prop_assert_eq!(c.evaluate(u).unwrap().to_bits(), f.evaluate(u).unwrap().to_bits());
    }
}
