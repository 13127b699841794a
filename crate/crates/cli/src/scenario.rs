//! Scenario files: TOML documents naming a command and its inputs.
//!
//! Functions are given either as an expression string (`f = "x^2"`, the
//! variable is inferred) or as a table:
//!
//! ```toml
//! f = { expr = "u^2", var = "u", domain = [0.0, 1.0] }
//! h = { family = "power", params = ["s"] }   # "s" is bound by a sweep axis
//! ```

use std::fmt;
use std::str::FromStr;

use genconvex::classes::{self, ClassTag};
use genconvex::funcdsl::{infer_variable, parse_with_bindings, Family, FuncDef, Interval};
use genconvex::quad;
use genconvex::theorems::{self, ReductionPair, TheoremId, Tolerances};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MAX_CELLS: usize = 100_000;

/// Names a sweep axis may take.
pub const AXIS_NAMES: [&str; 4] = ["m", "s", "x", "y"];

/// A schema violation, reported with the path of the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        SchemaError { path: path.into(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Certify,
    Falsify,
    Verify,
    Reduce,
    Sweep,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certify" => Ok(Command::Certify),
            "falsify" => Ok(Command::Falsify),
            "verify" => Ok(Command::Verify),
            "reduce" => Ok(Command::Reduce),
            "sweep" => Ok(Command::Sweep),
            _ => Err(format!("unknown command `{s}` (expected certify, falsify, verify, reduce or sweep)")),
        }
    }
}

/// What a verify or sweep cell evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Theorem(TheoremId),
    /// The three h-moments `∫h`, `∫h²`, `∫h(t)h(1−t)`.
    HMoments,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Theorem(id) => id.name(),
            Target::HMoments => "h_moments",
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("h_moments") {
            return Ok(Target::HMoments);
        }
        s.parse().map(Target::Theorem).map_err(|e: theorems::VerifyError| e.to_string())
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Algebraic construction certified in place of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Construct {
    /// `f ∘ φ`, certified against the class with `φ` replaced by the identity.
    Compose,
    /// `g(t) = f(tφ(x) + m(1−t)φ(y))`, certified on `t ∈ [0, 1]` against the
    /// class with `φ` replaced by the identity.
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Symbol(String),
}

/// Unresolved function binding; resolved per sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FuncSpec {
    Expr { text: String, var: Option<String>, domain: Option<Interval> },
    Catalog { family: String, params: Vec<Param>, domain: Option<Interval> },
}

impl FuncSpec {
    /// Builds the function on `default_domain` unless the binding names its own.
    pub fn resolve(&self, bindings: &[(&str, f64)], default_domain: Interval) -> Result<FuncDef, String> {
        match self {
            FuncSpec::Expr { text, var, domain } => {
                let var = match var {
                    Some(v) => v.clone(),
                    None => infer_variable(text, bindings).map_err(|e| e.to_string())?,
                };
                let expr = parse_with_bindings(text, &var, bindings).map_err(|e| e.to_string())?;
                Ok(FuncDef::from_tree(expr, &var, domain.unwrap_or(default_domain)))
            }
            FuncSpec::Catalog { family, params, domain } => {
                let family: Family = family.parse().map_err(|e: genconvex::funcdsl::FuncError| e.to_string())?;
                let values = params
                    .iter()
                    .map(|p| match p {
                        Param::Value(v) => Ok(*v),
                        Param::Symbol(s) => bindings
                            .iter()
                            .find(|(k, _)| k == s)
                            .map(|(_, v)| *v)
                            .ok_or_else(|| format!("parameter `{s}` is not bound by any axis")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                FuncDef::catalog(family, &values, domain.unwrap_or(default_domain)).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// A validated scenario with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub command: Command,
    pub f: Option<FuncSpec>,
    pub g: Option<FuncSpec>,
    pub h: Option<FuncSpec>,
    pub phi: Option<FuncSpec>,
    pub class: Option<ClassTag>,
    pub m: f64,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub bound: f64,
    pub tol_quad: f64,
    pub tol_report: f64,
    pub seed: u64,
    pub budget: usize,
    pub n: usize,
    pub theorems: Vec<Target>,
    pub pairs: Vec<ReductionPair>,
    pub precheck: bool,
    pub construct: Option<Construct>,
    pub dominates: Option<FuncSpec>,
    pub axes: Vec<Axis>,
    pub max_cells: usize,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol_quad: Option<f64>,
    pub tol_report: Option<f64>,
    /// Replaces the file's `command` field.
    pub command: Option<Command>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    command: Option<String>,
    f: Option<RawFunc>,
    g: Option<RawFunc>,
    h: Option<RawFunc>,
    phi: Option<RawFunc>,
    class: Option<String>,
    m: Option<f64>,
    #[serde(alias = "a")]
    x: Option<f64>,
    #[serde(alias = "b")]
    y: Option<f64>,
    bound: Option<f64>,
    tolerances: Option<RawTolerances>,
    seed: Option<u64>,
    budget: Option<usize>,
    n: Option<usize>,
    theorem: Option<String>,
    theorems: Option<Vec<String>>,
    pair: Option<String>,
    pairs: Option<Vec<String>>,
    precheck: Option<bool>,
    construct: Option<String>,
    dominates: Option<RawFunc>,
    axes: Option<Vec<RawAxis>>,
    max_cells: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    quad: Option<f64>,
    report: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawFunc {
    Text(String),
    Table(RawFuncTable),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFuncTable {
    expr: Option<String>,
    var: Option<String>,
    family: Option<String>,
    params: Option<Vec<RawParam>>,
    domain: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawParam {
    Value(f64),
    Symbol(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    name: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

fn finite(path: &str, v: f64) -> Result<f64, SchemaError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SchemaError::new(path, format!("must be finite, got {v}")))
    }
}

fn func_spec(path: &str, raw: RawFunc) -> Result<FuncSpec, SchemaError> {
    match raw {
        RawFunc::Text(text) => Ok(FuncSpec::Expr { text, var: None, domain: None }),
        RawFunc::Table(t) => {
            let domain = t
                .domain
                .map(|[lo, hi]| Interval::new(lo, hi).map_err(|e| SchemaError::new(format!("{path}.domain"), e)))
                .transpose()?;
            match (t.expr, t.family) {
                (Some(text), None) => {
                    if t.params.is_some() {
                        return Err(SchemaError::new(format!("{path}.params"), "only allowed with `family`"));
                    }
                    Ok(FuncSpec::Expr { text, var: t.var, domain })
                }
                (None, Some(family)) => {
                    if t.var.is_some() {
                        return Err(SchemaError::new(format!("{path}.var"), "only allowed with `expr`"));
                    }
                    let params = t
                        .params
                        .unwrap_or_default()
                        .into_iter()
                        .enumerate()
                        .map(|(i, p)| match p {
                            RawParam::Value(v) => finite(&format!("{path}.params[{i}]"), v).map(Param::Value),
                            RawParam::Symbol(s) => Ok(Param::Symbol(s)),
                        })
                        .collect::<Result<_, _>>()?;
                    Ok(FuncSpec::Catalog { family, params, domain })
                }
                _ => Err(SchemaError::new(path, "give exactly one of `expr` or `family`")),
            }
        }
    }
}

fn axis(i: usize, raw: RawAxis) -> Result<Axis, SchemaError> {
    let path = format!("axes[{i}]");
    if !AXIS_NAMES.contains(&raw.name.as_str()) {
        return Err(SchemaError::new(format!("{path}.name"), format!("unknown axis `{}` (expected m, s, x or y)", raw.name)));
    }
    let values = match (raw.values, raw.start, raw.stop, raw.step) {
        (Some(values), None, None, None) => {
            for (j, v) in values.iter().enumerate() {
                finite(&format!("{path}.values[{j}]"), *v)?;
            }
            values
        }
        (None, Some(start), Some(stop), Some(step)) => {
            finite(&format!("{path}.start"), start)?;
            finite(&format!("{path}.stop"), stop)?;
            if !(step > 0.0) || !step.is_finite() {
                return Err(SchemaError::new(format!("{path}.step"), "must be positive and finite"));
            }
            if stop < start {
                return Err(SchemaError::new(&path, "range is empty (stop < start)"));
            }
            // index-based so the grid does not drift; the end point is kept
            // when it falls on the grid up to rounding
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|k| start + k as f64 * step).collect()
        }
        _ => return Err(SchemaError::new(&path, "give either `values` or all of `start`, `stop`, `step`")),
    };
    if values.is_empty() {
        return Err(SchemaError::new(format!("{path}.values"), "range is empty"));
    }
    Ok(Axis { name: raw.name, values })
}

fn one_or_many<T, E: fmt::Display>(
    path_one: &str,
    path_many: &str,
    one: Option<String>,
    many: Option<Vec<String>>,
    parse: impl Fn(&str) -> Result<T, E>,
) -> Result<Vec<T>, SchemaError> {
    match (one, many) {
        (Some(_), Some(_)) => Err(SchemaError::new(path_one, format!("give `{path_one}` or `{path_many}`, not both"))),
        (Some(s), None) => Ok(vec![parse(&s).map_err(|e| SchemaError::new(path_one, e))?]),
        (None, Some(v)) => v
            .iter()
            .enumerate()
            .map(|(i, s)| parse(s).map_err(|e| SchemaError::new(format!("{path_many}[{i}]"), e)))
            .collect(),
        (None, None) => Ok(Vec::new()),
    }
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Scenario, SchemaError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| SchemaError::new("scenario", e.message()))?;
        let command = match (overrides.command, raw.command) {
            (Some(c), _) => c,
            (None, Some(c)) => c.parse().map_err(|e| SchemaError::new("command", e))?,
            (None, None) => return Err(SchemaError::new("scenario", "missing field: command")),
        };
        let tol = raw.tolerances.unwrap_or(RawTolerances { quad: None, report: None });
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(SchemaError::new(path, format!("must be positive and finite, got {v}")))
            }
        };
        let opt_finite = |path: &str, v: Option<f64>| v.map(|v| finite(path, v)).transpose();
        let class = raw
            .class
            .map(|c| c.parse::<ClassTag>().map_err(|e| SchemaError::new("class", e)))
            .transpose()?;
        let construct = match raw.construct.as_deref() {
            None => None,
            Some("compose") => Some(Construct::Compose),
            Some("segment") => Some(Construct::Segment),
            Some(other) => {
                return Err(SchemaError::new("construct", format!("unknown construction `{other}` (expected compose or segment)")))
            }
        };
        let opt_func = |path: &str, raw: Option<RawFunc>| raw.map(|r| func_spec(path, r)).transpose();
        let axes = raw
            .axes
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .map(|(i, a)| axis(i, a))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(SchemaError::new(format!("axes[{i}].name"), format!("axis `{}` declared twice", a.name)));
            }
        }
        let s = Scenario {
            name: raw.name.unwrap_or_else(|| "unnamed".to_string()),
            command,
            f: opt_func("f", raw.f)?,
            g: opt_func("g", raw.g)?,
            h: opt_func("h", raw.h)?,
            phi: opt_func("phi", raw.phi)?,
            class,
            m: opt_finite("m", raw.m)?.unwrap_or(1.0),
            x: opt_finite("x", raw.x)?,
            y: opt_finite("y", raw.y)?,
            bound: positive("bound", raw.bound.unwrap_or(1.0))?,
            tol_quad: positive("tolerances.quad", overrides.tol_quad.or(tol.quad).unwrap_or(quad::DEFAULT_TOL))?,
            tol_report: positive(
                "tolerances.report",
                overrides.tol_report.or(tol.report).unwrap_or(theorems::DEFAULT_REPORT_TOL),
            )?,
            seed: overrides.seed.or(raw.seed).unwrap_or(0),
            budget: raw.budget.unwrap_or(classes::DEFAULT_FALSIFY_BUDGET),
            n: raw.n.unwrap_or(classes::DEFAULT_CERTIFY_SAMPLES),
            theorems: one_or_many("theorem", "theorems", raw.theorem, raw.theorems, |s| s.parse::<Target>())?,
            pairs: one_or_many("pair", "pairs", raw.pair, raw.pairs, |s| s.parse::<ReductionPair>())?,
            precheck: raw.precheck.unwrap_or(false),
            construct,
            dominates: opt_func("dominates", raw.dominates)?,
            axes,
            max_cells: raw.max_cells.unwrap_or(DEFAULT_MAX_CELLS),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { quad: self.tol_quad, report: self.tol_report }
    }

    /// Domain `[0, bound]` shared by `f`, `g` and `φ`.
    pub fn domain(&self) -> Interval {
        Interval::new(0.0, self.bound).expect("bound validated positive")
    }

    /// Number of sweep cells (1 without axes).
    pub fn cell_count(&self) -> usize {
        self.axes.iter().fold(1usize, |n, a| n.saturating_mul(a.values.len()))
    }

    /// Axis values of the `index`-th cell, first axis slowest.
    pub fn cell(&self, index: usize) -> Vec<(&str, f64)> {
        let mut rest = index;
        let mut out = vec![("", 0.0); self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            let n = a.values.len();
            out[k] = (a.name.as_str(), a.values[rest % n]);
            rest /= n;
        }
        out
    }

    fn validate(&self) -> Result<(), SchemaError> {
        let need = |present: bool, path: &str| {
            if present {
                Ok(())
            } else {
                Err(SchemaError::new(path, format!("required by command `{}`", self.command_name())))
            }
        };
        match self.command {
            Command::Certify | Command::Falsify => {
                need(self.f.is_some(), "f")?;
                need(self.class.is_some(), "class")?;
            }
            Command::Verify | Command::Sweep => {
                need(!self.theorems.is_empty(), "theorems")?;
                let theorem = self.theorems.iter().any(|t| matches!(t, Target::Theorem(_)));
                if theorem {
                    need(self.f.is_some(), "f")?;
                    need(self.x.is_some() || self.axes.iter().any(|a| a.name == "x"), "x")?;
                    need(self.y.is_some() || self.axes.iter().any(|a| a.name == "y"), "y")?;
                }
                if self.theorems.iter().any(|t| matches!(t, Target::Theorem(id) if id.needs_g())) {
                    need(self.g.is_some(), "g")?;
                }
            }
            Command::Reduce => need(!self.pairs.is_empty(), "pairs")?,
        }
        if self.command == Command::Sweep && self.axes.is_empty() {
            return Err(SchemaError::new("axes", "a sweep needs at least one axis"));
        }
        if self.command != Command::Sweep && !self.axes.is_empty() {
            return Err(SchemaError::new("axes", "axes are only allowed with command `sweep`"));
        }
        if self.construct == Some(Construct::Segment) {
            need(self.x.is_some(), "x")?;
            need(self.y.is_some(), "y")?;
        }
        let cells = self.cell_count();
        if cells > self.max_cells {
            return Err(SchemaError::new("axes", format!("grid has {cells} cells, above the cap of {}", self.max_cells)));
        }
        // every function must resolve at the first cell
        let first = self.cell(0);
        let bindings: Vec<(&str, f64)> = first.iter().filter(|(k, _)| *k == "s").copied().collect();
        let unit = Interval::unit();
        for (path, spec, domain) in [
            ("f", &self.f, self.domain()),
            ("g", &self.g, self.domain()),
            ("h", &self.h, unit),
            ("phi", &self.phi, self.domain()),
            ("dominates", &self.dominates, unit),
        ] {
            if let Some(spec) = spec {
                spec.resolve(&bindings, domain).map_err(|e| SchemaError::new(path, e))?;
            }
        }
        Ok(())
    }

    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Certify => "certify",
            Command::Falsify => "falsify",
            Command::Verify => "verify",
            Command::Reduce => "reduce",
            Command::Sweep => "sweep",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Scenario, SchemaError> {
        Scenario::from_toml(text, &Overrides::default())
    }

    #[test]
    fn empty_file_misses_command() {
        let e = load("").unwrap_err();
        assert_eq!(e.message, "missing field: command");
    }

    #[test]
    fn defaults_fill_in() {
        let s = load("command = \"verify\"\ntheorem = \"T2_2dot\"\nf = \"x^2\"\nx = 0\ny = 1\n").unwrap();
        assert_eq!(s.m, 1.0);
        assert_eq!(s.tol_quad, 1e-10);
        assert_eq!(s.tol_report, 1e-9);
        assert_eq!(s.budget, 20_000);
        assert_eq!(s.n, 10_000);
        assert_eq!(s.theorems, vec![Target::Theorem(TheoremId::T2_2dot)]);
    }

    #[test]
    fn aliases_and_tables() {
        let s = load(
            "command = \"verify\"\ntheorem = \"HC\"\na = 0.0\nb = 1.0\n\
             f = { family = \"power\", params = [2] }\nh = { expr = \"t\", var = \"t\" }\n",
        )
        .unwrap();
        assert_eq!((s.x, s.y), (Some(0.0), Some(1.0)));
        assert!(matches!(s.f, Some(FuncSpec::Catalog { .. })));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let e = load("command = \"verify\"\ntheorem = \"T9\"\n").unwrap_err();
        assert_eq!(e.path, "theorem");
        let e = load("command = \"certify\"\nclass = \"convex\"\nf = \"x +\"\n").unwrap_err();
        assert_eq!(e.path, "f");
        let e = load("command = \"certify\"\nclass = \"convex\"\nf = \"x\"\ncolour = 1\n").unwrap_err();
        assert_eq!(e.path, "scenario");
        let e = load("command = \"verify\"\ntheorem = \"T2_1\"\nf = \"x\"\ny = 1\n").unwrap_err();
        assert_eq!(e.path, "x");
    }

    #[test]
    fn ranges_and_cells() {
        let s = load(
            "command = \"sweep\"\ntheorem = \"h_moments\"\nh = \"t^s\"\n\
             [[axes]]\nname = \"s\"\nstart = 0.5\nstop = 2.0\nstep = 0.5\n\
             [[axes]]\nname = \"m\"\nvalues = [0.5, 1.0]\n",
        )
        .unwrap();
        assert_eq!(s.axes[0].values, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(s.cell_count(), 8);
        assert_eq!(s.cell(0), vec![("s", 0.5), ("m", 0.5)]);
        assert_eq!(s.cell(1), vec![("s", 0.5), ("m", 1.0)]);
        assert_eq!(s.cell(7), vec![("s", 2.0), ("m", 1.0)]);
    }

    #[test]
    fn cap_and_empty_ranges() {
        let base = "command = \"sweep\"\ntheorem = \"h_moments\"\n";
        let e = load(&format!("{base}max_cells = 3\n[[axes]]\nname = \"m\"\nvalues = [0.1, 0.2, 0.3, 0.4]\n")).unwrap_err();
        assert_eq!(e.path, "axes");
        let e = load(&format!("{base}[[axes]]\nname = \"m\"\nvalues = []\n")).unwrap_err();
        assert_eq!(e.path, "axes[0].values");
        let e = load(&format!("{base}[[axes]]\nname = \"m\"\nstart = 1.0\nstop = 0.0\nstep = 0.1\n")).unwrap_err();
        assert_eq!(e.path, "axes[0]");
    }

    #[test]
    fn overrides_win() {
        let o = Overrides { seed: Some(9), tol_quad: Some(1e-8), tol_report: None, command: Some(Command::Falsify) };
        let s = Scenario::from_toml("command = \"certify\"\nf = \"sqrt(x)\"\nclass = \"convex\"\nseed = 1\n", &o).unwrap();
        assert_eq!(s.command, Command::Falsify);
        assert_eq!(s.seed, 9);
        assert_eq!(s.tol_quad, 1e-8);
    }

    #[test]
    fn unbound_symbol_is_rejected() {
        let e = load("command = \"verify\"\ntheorem = \"h_moments\"\nh = { family = \"power\", params = [\"s\"] }\n").unwrap_err();
        assert_eq!(e.path, "h");
    }
}
