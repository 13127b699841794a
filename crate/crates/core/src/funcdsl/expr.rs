use std::fmt;

use super::EvalError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Exp,
    Ln,
    Abs,
}

impl UnaryOp {
    /// Named functions callable as `name(expr)`.
    pub const FUNCTIONS: [UnaryOp; 4] = [UnaryOp::Sqrt, UnaryOp::Exp, UnaryOp::Ln, UnaryOp::Abs];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Abs => "abs",
        }
    }

    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        Self::FUNCTIONS.into_iter().find(|op| op.name() == name)
    }

    fn apply(self, v: f64) -> Result<f64, EvalError> {
        let out = match self {
            UnaryOp::Neg => -v,
            UnaryOp::Abs => v.abs(),
            UnaryOp::Exp => v.exp(),
            UnaryOp::Sqrt => {
                if v < 0.0 {
                    return Err(EvalError::Undefined { op: "sqrt", arg: v });
                }
                v.sqrt()
            }
            UnaryOp::Ln => {
                if v <= 0.0 {
                    return Err(EvalError::Undefined { op: "ln", arg: v });
                }
                v.ln()
            }
        };
        finite(out, v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }

    fn apply(self, l: f64, r: f64) -> Result<f64, EvalError> {
        let out = match self {
            BinaryOp::Add => l + r,
            BinaryOp::Sub => l - r,
            BinaryOp::Mul => l * r,
            BinaryOp::Div => {
                if r == 0.0 {
                    return Err(EvalError::Undefined { op: "division", arg: r });
                }
                l / r
            }
            BinaryOp::Pow => {
                if l < 0.0 && r.fract() != 0.0 {
                    return Err(EvalError::Undefined { op: "pow", arg: l });
                }
                if l == 0.0 && r < 0.0 {
                    return Err(EvalError::Undefined { op: "pow", arg: l });
                }
                l.powf(r)
            }
        };
        finite(out, l)
    }
}

fn finite(out: f64, arg: f64) -> Result<f64, EvalError> {
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalError::NonFinite { at: arg })
    }
}

/// Expression tree over a single variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates the tree with the variable bound to `u`.
    pub fn eval(&self, u: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(u),
            Expr::Unary(op, arg) => op.apply(arg.eval(u)?),
            Expr::Binary(op, l, r) => op.apply(l.eval(u)?, r.eval(u)?),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Unary(_, a) => 1 + a.node_count(),
            Expr::Binary(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Returns `c` when the tree is exactly `c*v`, `v*c` or `v`.
    pub fn linear_slope(&self) -> Option<f64> {
        match self {
            Expr::Var => Some(1.0),
            Expr::Binary(BinaryOp::Mul, l, r) => match (l.as_ref(), r.as_ref()) {
                (Expr::Const(c), Expr::Var) | (Expr::Var, Expr::Const(c)) => Some(*c),
                _ => None,
            },
            Expr::Binary(BinaryOp::Div, l, r) => match (l.as_ref(), r.as_ref()) {
                (Expr::Var, Expr::Const(c)) if *c != 0.0 => Some(1.0 / c),
                _ => None,
            },
            _ => None,
        }
    }

    /// Printer that renders the tree in the grammar accepted by [`super::parse`].
    pub fn display<'a>(&'a self, var: &'a str) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, var }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    var: &'a str,
}

impl ExprDisplay<'_> {
    fn child(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let inner = ExprDisplay { expr: e, var: self.var };
        if e.precedence() < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            // Debug formatting of f64 is the shortest round-tripping literal.
            Expr::Const(c) if c.is_sign_negative() => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => f.write_str(self.var),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                self.child(f, a, 3)
            }
            Expr::Unary(op, a) => {
                write!(f, "{}(", op.name())?;
                self.child(f, a, 0)?;
                f.write_str(")")
            }
            Expr::Binary(op, l, r) => {
                let (lp, rp) = match op {
                    BinaryOp::Add | BinaryOp::Sub => (1, 2),
                    BinaryOp::Mul | BinaryOp::Div => (2, 3),
                    BinaryOp::Pow => (5, 3),
                };
                self.child(f, l, lp)?;
                let sep = if *op == BinaryOp::Pow { "^".to_string() } else { format!(" {} ", op.symbol()) };
                f.write_str(&sep)?;
                self.child(f, r, rp)
            }
        }
    }
}
