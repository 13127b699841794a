//! Exit criteria, one line each. Run with
//! `cargo test -p genconvex-cli --test acceptance`.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use genconvex::algebra::{combine, segment};
use genconvex::classes::{certify_sampled, defect, falsify, CertifyConfig, ClassSpec, SearchConfig};
use genconvex::funcdsl::{Family, FuncDef, Interval};
use genconvex::quad::{h_moments, QuadConfig};
use genconvex::theorems::{
    check_reduction, default_probes, verify, Instance, ReductionPair, Status, TheoremId, Tolerances,
};
use genconvex::Execution;
use genconvex_cli::report::to_machine;
use genconvex_cli::{run, Overrides, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn unit() -> Interval {
    Interval::unit()
}

fn id() -> FuncDef {
    FuncDef::identity(unit())
}

fn cat(family: Family, params: &[f64]) -> FuncDef {
    FuncDef::catalog(family, params, unit()).unwrap()
}

fn inst(f: FuncDef, g: Option<FuncDef>, m: f64, x: f64, y: f64) -> Instance {
    Instance { f, g, h: id(), m, phi: id(), x, y }
}

/// Catalog members that are non-negative on [0, 1].
fn catalog() -> Vec<FuncDef> {
    vec![
        cat(Family::Identity, &[]),
        cat(Family::Constant, &[0.0]),
        cat(Family::Constant, &[1.5]),
        cat(Family::Power, &[0.5]),
        cat(Family::Power, &[1.5]),
        cat(Family::Power, &[2.0]),
        cat(Family::Power, &[3.0]),
        cat(Family::RecipPower, &[1.0]).with_domain(Interval::new(0.5, 1.0).unwrap()),
        cat(Family::Affine, &[2.0, 1.0]),
        cat(Family::Affine, &[-1.0, 1.0]),
        cat(Family::Poly, &[1.0, -1.0, 1.0]),
        cat(Family::Poly, &[0.0, 0.5, 0.0, 2.0]),
        cat(Family::Sqrt, &[]),
    ]
}

fn c1_classic_hh() -> Outcome {
    let v = verify(TheoremId::Hc, &inst(cat(Family::Power, &[2.0]), None, 1.0, 0.0, 1.0), &Tolerances::default()).unwrap();
    let lower = v.lower.unwrap();
    let pass = (lower.bound - 0.25).abs() <= 1e-12
        && (v.lhs - 1.0 / 3.0).abs() <= 1e-10
        && (v.rhs - 0.5).abs() <= 1e-12
        && v.quad_err <= 1e-10
        && v.margin >= 1.0 / 12.0 - 1e-9
        && lower.margin >= 1.0 / 12.0 - 1e-9
        && v.status == Status::Pass;
    Outcome {
        pass,
        detail: format!("{} <= {} <= {}, quad_err {:e}", lower.bound, v.lhs, v.rhs, v.quad_err),
    }
}

fn c2_t2_1_tightness() -> Outcome {
    let tol = Tolerances::default();
    let a = verify(TheoremId::T2_1, &inst(id(), None, 1.0, 0.0, 1.0), &tol).unwrap();
    let b = verify(TheoremId::T2_1, &inst(id(), None, 0.5, 0.0, 1.0), &tol).unwrap();
    let ok = |v: &genconvex::Verdict, want: f64| {
        (v.lhs - want).abs() <= 1e-8 && (v.rhs - want).abs() <= 1e-8 && v.margin.abs() <= 1e-8
    };
    Outcome {
        pass: ok(&a, 1.0 / 6.0) && ok(&b, 1.0 / 24.0),
        detail: format!("m=1: {} vs {}; m=1/2: {} vs {}", a.lhs, a.rhs, b.lhs, b.rhs),
    }
}

fn c3_t2_2_tightness() -> Outcome {
    let v = verify(TheoremId::T2_2, &inst(id(), None, 0.5, 0.4, 1.0), &Tolerances::default()).unwrap();
    Outcome {
        pass: (v.lhs - 0.7).abs() <= 1e-8 && (v.rhs - 0.7).abs() <= 1e-8 && v.margin.abs() <= 1e-8,
        detail: format!("lhs {} rhs {} margin {:e}", v.lhs, v.rhs, v.margin),
    }
}

fn c4_t2_3() -> Outcome {
    let v = verify(TheoremId::T2_3, &inst(cat(Family::Power, &[2.0]), Some(id()), 1.0, 0.0, 1.0), &Tolerances::default())
        .unwrap();
    Outcome {
        pass: (v.lhs - 0.25).abs() <= 1e-10 && (v.rhs - 1.0 / 3.0).abs() <= 1e-10 && v.status == Status::Pass,
        detail: format!("lhs {} rhs {} status {}", v.lhs, v.rhs, v.status),
    }
}

fn c5_reductions() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for pair in ReductionPair::ALL {
        let probes = default_probes(pair);
        let r = check_reduction(pair, &probes, &Tolerances::default(), Execution::default()).unwrap();
        pass &= r.pass && r.probes == 10;
        detail.push(format!("{} dev {:.1e}/{:.1e}", pair, r.max_dev_lhs, r.max_dev_rhs));
    }
    Outcome { pass, detail: detail.join(", ") }
}

fn c6_falsifier() -> Outcome {
    let spec = ClassSpec::convex(1.0).unwrap();
    let cfg = SearchConfig { budget: 20_000, seed: 42, ..SearchConfig::default() };
    let sqrt = falsify(&cat(Family::Sqrt, &[]), &spec, &cfg);
    let square = falsify(&cat(Family::Power, &[2.0]), &spec, &cfg);
    let found = sqrt.counterexample.map(|c| c.defect);
    Outcome {
        pass: found.is_some_and(|d| d <= -0.15) && square.counterexample.is_none(),
        detail: format!("sqrt defect {:?}, square {:?}", found, square.counterexample.map(|c| c.defect)),
    }
}

fn c7_defect_algebra() -> Outcome {
    let fs = catalog();
    let hs = [id(), FuncDef::constant(1.0, unit()).unwrap(), cat(Family::Power, &[2.0]), cat(Family::Power, &[0.5])];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    while draws < 1000 {
        let f = &fs[rng.random_range(0..fs.len())];
        let g = &fs[rng.random_range(0..fs.len())];
        if f.domain() != g.domain() {
            continue;
        }
        let d = f.domain();
        let lambda = rng.random_range(0.0..10.0);
        let h = hs[rng.random_range(0..hs.len())].clone();
        let m = rng.random_range(0.05..=1.0);
        let spec = ClassSpec::hm_convex(h, m, d.hi()).unwrap();
        let x = rng.random_range(d.lo()..=d.hi());
        let y = rng.random_range(d.lo()..=d.hi());
        let t = rng.random_range(1e-9..1.0 - 1e-9);
        let sum = combine(f, g, lambda, 1.0).unwrap();
        let (Ok(ds), Ok(df), Ok(dg)) = (defect(&sum, &spec, x, y, t), defect(f, &spec, x, y, t), defect(g, &spec, x, y, t))
        else {
            // blend point left the domain
            continue;
        };
        worst = worst.max((ds - lambda * df - dg).abs());
        draws += 1;
    }
    Outcome { pass: worst <= 1e-12, detail: format!("{draws} draws, worst deviation {worst:e}") }
}

fn c8_h_dominance() -> Outcome {
    let s2 = ClassSpec::h_convex(id(), 1.0).unwrap();
    let s1 = ClassSpec::h_convex(FuncDef::constant(1.0, unit()).unwrap(), 1.0).unwrap();
    let cfg = CertifyConfig::default();
    let mut pass = true;
    let mut checked = 0;
    for f in catalog() {
        if f.domain() != unit() {
            continue;
        }
        let r2 = certify_sampled(&f, &s2, &cfg);
        if !r2.certified {
            continue;
        }
        checked += 1;
        let r1 = certify_sampled(&f, &s1, &cfg);
        pass &= r1.certified && r1.min_defect.unwrap() >= r2.min_defect.unwrap() - 1e-12;
    }
    Outcome { pass: pass && checked > 0, detail: format!("{checked} members certified under h=t") }
}

fn c9_segment() -> Outcome {
    let square = cat(Family::Power, &[2.0]);
    let cfg = CertifyConfig { samples: 10_000, ..CertifyConfig::default() };
    let mut pass = true;
    let mut detail = Vec::new();
    for m in [0.5, 1.0] {
        let g = segment(&square, &id(), m, 1.0, 1.0).unwrap();
        let spec = ClassSpec::hm_convex(id(), m, 1.0).unwrap();
        let r = certify_sampled(g.as_funcdef(), &spec, &cfg);
        let min = r.min_defect.unwrap_or(f64::NEG_INFINITY);
        pass &= min >= -1e-9;
        detail.push(format!("m={m}: min_defect {min:.6e} at {:?}", r.argmin.map(|t| (t.x, t.y, t.t))));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn c10_h_moments() -> Outcome {
    let cases = [
        (id(), [0.5, 1.0 / 3.0, 1.0 / 6.0]),
        (FuncDef::constant(1.0, unit()).unwrap(), [1.0, 1.0, 1.0]),
        (cat(Family::Power, &[2.0]), [1.0 / 3.0, 1.0 / 5.0, 1.0 / 30.0]),
    ];
    let mut worst: f64 = 0.0;
    for (h, want) in cases {
        let hm = h_moments(&h, &QuadConfig::default()).unwrap();
        for (got, want) in [hm.m1.value, hm.m2.value, hm.mx.value].into_iter().zip(want) {
            worst = worst.max((got - want).abs());
        }
    }
    Outcome { pass: worst <= 1e-10, detail: format!("worst deviation {worst:e}") }
}

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn c11_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_genconvex");
    let dir = tempfile::tempdir().unwrap();
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    files.sort();
    let mut pass = !files.is_empty();
    for file in &files {
        let mut outputs = Vec::new();
        for (k, jobs) in ["1", "2", "2"].into_iter().enumerate() {
            let out = dir.path().join(format!("run{k}.json"));
            let status = Command::new(bin)
                .arg("run")
                .arg(file)
                .arg("--format")
                .arg("machine")
                .arg("--out")
                .arg(&out)
                .env("GENCONVEX_JOBS", jobs)
                .output()
                .unwrap();
            outputs.push((std::fs::read(&out).unwrap(), status.stdout));
        }
        pass &= outputs.windows(2).all(|w| w[0] == w[1]) && outputs[0].0 == outputs[0].1;
        // in-process run with the file's seed
        let s = Scenario::from_toml(&std::fs::read_to_string(file).unwrap(), &Overrides::default()).unwrap();
        let a = to_machine(&run(&s, Execution::Sequential));
        let b = to_machine(&run(&s, Execution::Parallel));
        pass &= a == b && a.as_bytes() == outputs[0].0.as_slice();
    }
    Outcome { pass, detail: format!("{} scenarios, 3 binary runs + 2 in-process runs each", files.len()) }
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("classic Hermite–Hadamard for u² on [0,1]", c1_classic_hh),
        ("T2_1 tightness for the identity at m = 1 and 1/2", c2_t2_1_tightness),
        ("T2_2 tightness for the identity at m = 1/2, x = 0.4", c3_t2_2_tightness),
        ("T2_3 for f = u², g = u", c4_t2_3),
        ("reduction pairs agree on 10 probes", c5_reductions),
        ("falsifier finds sqrt, clears u²", c6_falsifier),
        ("defect is linear over 1000 catalog draws", c7_defect_algebra),
        ("h-dominance t ≤ 1 preserves certification", c8_h_dominance),
        ("segment of u² certifies for m ∈ {1/2, 1}", c9_segment),
        ("h-moments of t, 1, t²", c10_h_moments),
        ("machine reports are byte-identical across runs", c11_determinism),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let mark = if o.pass { "PASS" } else { "FAIL" };
        // written past the test harness capture so the lines always show
        writeln!(stdout, "criterion {:>2} {mark}: {name} ({})", k + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
