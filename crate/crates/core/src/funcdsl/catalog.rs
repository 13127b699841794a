use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalError, FuncError, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Identity,
    Constant,
    Power,
    RecipPower,
    Affine,
    Poly,
    Sqrt,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Identity,
        Family::Constant,
        Family::Power,
        Family::RecipPower,
        Family::Affine,
        Family::Poly,
        Family::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Constant => "constant",
            Family::Power => "power",
            Family::RecipPower => "recip_power",
            Family::Affine => "affine",
            Family::Poly => "poly",
            Family::Sqrt => "sqrt",
        }
    }

    fn arity(self) -> (usize, Option<usize>) {
        match self {
            Family::Identity | Family::Sqrt => (0, Some(0)),
            Family::Constant | Family::Power | Family::RecipPower => (1, Some(1)),
            Family::Affine => (2, Some(2)),
            Family::Poly => (1, None),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FuncError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| FuncError::UnknownFamily(s.to_string()))
    }
}

/// A parameterized member of one of the named families.
///
/// | family        | params                 | f(u)                  |
/// |---------------|------------------------|-----------------------|
/// | `identity`    | –                      | u                     |
/// | `constant`    | c                      | c                     |
/// | `power`       | s                      | u^s                   |
/// | `recip_power` | s                      | u^(−s)                |
/// | `affine`      | slope, intercept       | slope·u + intercept   |
/// | `poly`        | c0, c1, …              | c0 + c1·u + …         |
/// | `sqrt`        | –                      | √u                    |
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogFn {
    family: Family,
    params: Vec<f64>,
}

impl CatalogFn {
    pub fn new(family: Family, params: &[f64]) -> Result<Self, FuncError> {
        let (min, max) = family.arity();
        if params.len() < min || max.is_some_and(|m| params.len() > m) {
            return Err(FuncError::InvalidParameter {
                family: family.name(),
                reason: format!("expected {} parameter(s), got {}", arity_text(min, max), params.len()),
            });
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(FuncError::InvalidParameter {
                family: family.name(),
                reason: format!("parameter {p} is not finite"),
            });
        }
        Ok(CatalogFn { family, params: params.to_vec() })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Largest interval on which the family can be evaluated without a
    /// domain error for generic arguments. Integer powers extend to the
    /// whole line; fractional ones need u ≥ 0.
    pub fn natural_domain(&self) -> Interval {
        let whole = Interval::new_unchecked(f64::NEG_INFINITY, f64::INFINITY);
        let half = Interval::new_unchecked(0.0, f64::INFINITY);
        match self.family {
            Family::Sqrt => half,
            Family::Power | Family::RecipPower if self.params[0].fract() != 0.0 => half,
            _ => whole,
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64, EvalError> {
        let p = &self.params;
        let out = match self.family {
            Family::Identity => u,
            Family::Constant => p[0],
            Family::Power => pow(u, p[0])?,
            Family::RecipPower => pow(u, -p[0])?,
            Family::Affine => p[0] * u + p[1],
            Family::Poly => p.iter().rev().fold(0.0, |acc, c| acc * u + c),
            Family::Sqrt => {
                if u < 0.0 {
                    return Err(EvalError::Undefined { op: "sqrt", arg: u });
                }
                u.sqrt()
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { at: u })
        }
    }

    /// Slope `c` when the function is exactly `u ↦ c·u`.
    pub fn linear_slope(&self) -> Option<f64> {
        match (self.family, self.params.as_slice()) {
            (Family::Identity, _) => Some(1.0),
            (Family::Power, [s]) if *s == 1.0 => Some(1.0),
            (Family::Affine, [c, b]) if *b == 0.0 => Some(*c),
            (Family::Poly, [c0, c1]) if *c0 == 0.0 => Some(*c1),
            _ => None,
        }
    }
}

fn pow(u: f64, s: f64) -> Result<f64, EvalError> {
    if u < 0.0 && s.fract() != 0.0 {
        return Err(EvalError::Undefined { op: "pow", arg: u });
    }
    if u == 0.0 && s < 0.0 {
        return Err(EvalError::Undefined { op: "pow", arg: u });
    }
    Ok(u.powf(s))
}

fn arity_text(min: usize, max: Option<usize>) -> String {
    match max {
        Some(m) if m == min => min.to_string(),
        Some(m) => format!("{min}..={m}"),
        None => format!("at least {min}"),
    }
}

impl fmt::Display for CatalogFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p:?}")).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_and_recip_power_values() {
        let sq = CatalogFn::new(Family::Power, &[2.0]).unwrap();
        assert_eq!(sq.eval(0.5), Ok(0.25));
        let lin = CatalogFn::new(Family::Power, &[1.0]).unwrap();
        assert_eq!(lin.eval(0.3), Ok(0.3));
        let gl = CatalogFn::new(Family::RecipPower, &[1.0]).unwrap();
        assert_eq!(gl.eval(0.25), Ok(4.0));
        assert!(gl.eval(0.0).is_err());
    }

    #[test]
    fn poly_is_ascending() {
        let p = CatalogFn::new(Family::Poly, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.eval(2.0), Ok(1.0 + 4.0 + 12.0));
    }

    #[test]
    fn arity_is_checked() {
        assert!(CatalogFn::new(Family::Power, &[]).is_err());
        assert!(CatalogFn::new(Family::Identity, &[1.0]).is_err());
        assert!(CatalogFn::new(Family::Poly, &[]).is_err());
        assert!(CatalogFn::new(Family::Constant, &[f64::NAN]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!("gamma".parse::<Family>().is_err());
    }
}
