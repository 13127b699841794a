//! Report rendering: machine-readable JSON, human-readable text and sweep CSV.

use std::fmt::Write as _;
use std::io;

use genconvex::theorems::Verdict;

use crate::runner::{Entry, Outcome, Report, Role};
use crate::scenario::Target;

/// Pretty-printed JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_machine(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn verdict_line(out: &mut String, v: &Verdict) {
    let _ = write!(
        out,
        "{:<8} lhs={} rhs={} margin={} quad_err={} status={}",
        v.theorem.name(),
        num(v.lhs),
        num(v.rhs),
        num(v.margin),
        num(v.quad_err),
        v.status
    );
    if let Some(lb) = &v.lower {
        let _ = write!(out, " lower={} lower_margin={}", num(lb.bound), num(lb.margin));
    }
    if let Some(d) = &v.diagnosis {
        let _ = write!(out, " diagnosis=\"{d}\"");
    }
}

fn entry_line(out: &mut String, e: &Entry) {
    if let Some(c) = &e.cell {
        let _ = write!(out, "[cell {}", c.index);
        for a in &c.axes {
            let _ = write!(out, " {}={}", a.name, a.value);
        }
        out.push_str("] ");
    }
    match &e.outcome {
        Outcome::Verdict(v) => verdict_line(out, v),
        Outcome::HMoments(h) => {
            let _ = write!(
                out,
                "h_moments h={} m1={} m2={} mx={} status={}",
                h.h,
                num(h.moments.m1.value),
                num(h.moments.m2.value),
                num(h.moments.mx.value),
                h.status
            );
        }
        Outcome::Certify(c) => {
            let role = match c.role {
                Role::Base => "certify",
                Role::Precheck => "precheck",
                Role::Compose => "compose",
                Role::Segment => "segment",
                Role::Dominated => "dominated",
            };
            let r = &c.report;
            let _ = write!(
                out,
                "{role} f={} class={} certified={} min_defect={} samples_ok={} skipped={}",
                c.function,
                c.class.tag.name(),
                r.certified,
                r.min_defect.map_or("none".into(), num),
                r.samples_ok,
                r.skipped
            );
            if let Some(t) = &r.argmin {
                let _ = write!(out, " argmin=({}, {}, {})", num(t.x), num(t.y), num(t.t));
            }
        }
        Outcome::Falsify(f) => {
            let r = &f.report;
            let _ = write!(out, "falsify f={} class={} probes={} skipped={}", f.function, f.class.tag.name(), r.probes, r.skipped);
            match &r.counterexample {
                Some(c) => {
                    let _ = write!(
                        out,
                        " counterexample x={} y={} t={} defect={} lhs={} rhs={}",
                        num(c.x),
                        num(c.y),
                        num(c.t),
                        num(c.defect),
                        num(c.lhs),
                        num(c.rhs)
                    );
                }
                None => {
                    let _ = write!(out, " counterexample=none min_defect={}", r.min_defect.map_or("none".into(), num));
                }
            }
        }
        Outcome::Dominance(d) => {
            let _ = write!(
                out,
                "dominance h1={} h2={} dominates={} worst_gap={} worst_t={}",
                d.h1,
                d.h2,
                d.result.dominates,
                num(d.result.worst_gap),
                num(d.result.worst_t)
            );
        }
        Outcome::Reduction(r) => {
            let _ = write!(
                out,
                "reduce {} probes={} max_dev_lhs={} max_dev_rhs={} max_quad_err={} pass={}",
                r.pair.name(),
                r.probes,
                num(r.max_dev_lhs),
                num(r.max_dev_rhs),
                num(r.max_quad_err),
                r.pass
            );
        }
        Outcome::Error(e) => {
            let kind = match e.error {
                crate::runner::ErrorKind::Precondition => "precondition",
                crate::runner::ErrorKind::Numeric => "numeric",
            };
            let _ = write!(out, "error {} ({kind}): {}", e.what, e.message);
        }
    }
    out.push('\n');
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", report.tool, report.version);
    let _ = writeln!(out, "scenario: {}", report.scenario.name);
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for e in &report.items {
        entry_line(&mut out, e);
    }
    let _ = writeln!(out, "exit status: {}", report.exit_status);
    out
}

/// Writes one row per verdict, h-moment triple or error of a sweep.
///
/// Columns: `scenario, cell_index, <axis names…>, theorem_id, lhs, rhs,
/// margin, quad_err, status`, followed by `m1, m2, mx` when the sweep
/// evaluates h-moments.
pub fn write_csv<W: io::Write>(report: &Report, w: W) -> csv::Result<()> {
    let s = &report.scenario;
    let with_moments = s.theorems.contains(&Target::HMoments);
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let mut header: Vec<String> = vec!["scenario".into(), "cell_index".into()];
    header.extend(s.axes.iter().map(|a| a.name.clone()));
    header.extend(["theorem_id", "lhs", "rhs", "margin", "quad_err", "status"].map(String::from));
    if with_moments {
        header.extend(["m1", "m2", "mx"].map(String::from));
    }
    wtr.write_record(&header)?;
    for (k, e) in report.items.iter().enumerate() {
        let (index, axes) = match &e.cell {
            Some(c) => (c.index, c.axes.iter().map(|a| num(a.value)).collect::<Vec<_>>()),
            None => (k, Vec::new()),
        };
        let (id, nums, status, moments): (String, [Option<f64>; 4], String, Option<[f64; 3]>) = match &e.outcome {
            Outcome::Verdict(v) => (
                v.theorem.name().into(),
                [Some(v.lhs), Some(v.rhs), Some(v.margin), Some(v.quad_err)],
                v.status.to_string(),
                None,
            ),
            Outcome::HMoments(h) => (
                "h_moments".into(),
                [Some(h.lhs), Some(h.rhs), Some(h.margin), Some(h.quad_err)],
                h.status.to_string(),
                Some([h.moments.m1.value, h.moments.m2.value, h.moments.mx.value]),
            ),
            Outcome::Error(err) => (err.what.clone(), [None; 4], "error".into(), None),
            _ => continue,
        };
        let mut row = vec![s.name.clone(), index.to_string()];
        row.extend(axes);
        row.push(id);
        row.extend(nums.iter().map(|v| v.map_or(String::new(), num)));
        row.push(status);
        if with_moments {
            match moments {
                Some(ms) => row.extend(ms.iter().map(|v| num(*v))),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
