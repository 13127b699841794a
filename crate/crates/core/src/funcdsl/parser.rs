//! Recursive-descent parser for the single-variable expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' unary)?
//! atom   := number | symbol | '(' expr ')' | func '(' expr ')'
//! func   := sqrt | exp | ln | abs
//! ```
//!
//! Exponentiation is right-associative and binds tighter than unary minus,
//! so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.

use thiserror::Error;

use super::expr::{BinaryOp, Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownSymbol(String),
    Arity { function: String, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {}", describe(.kind))]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => format!("syntax error: {msg}"),
        ParseErrorKind::UnknownSymbol(s) => format!("unknown symbol `{s}`"),
        ParseErrorKind::Arity { function, found } => {
            format!("`{function}` takes exactly 1 argument, found {found}")
        }
    }
}

impl ParseError {
    fn syntax(offset: usize, msg: impl Into<String>) -> Self {
        ParseError { offset, kind: ParseErrorKind::Syntax(msg.into()) }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| ParseError::syntax(start, format!("malformed number `{lit}`")))?;
                if !value.is_finite() {
                    return Err(ParseError::syntax(start, format!("number `{lit}` is not finite")));
                }
                out.push((start, Tok::Num(value)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    var: &'a str,
    bindings: &'a [(&'a str, f64)],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('+')) => BinaryOp::Add,
                Some(Tok::Op('-')) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op('*')) => BinaryOp::Mul,
                Some(Tok::Op('/')) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some((_, Tok::Num(v))) => Ok(Expr::Const(v)),
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some((_, Tok::Ident(name))) => self.symbol(offset, name),
            Some((_, tok)) => Err(ParseError::syntax(offset, format!("unexpected {}", tok_name(&tok)))),
            None => Err(ParseError::syntax(offset, "unexpected end of input")),
        }
    }

    fn symbol(&mut self, offset: usize, name: String) -> Result<Expr, ParseError> {
        let called = matches!(self.peek(), Some(Tok::LParen));
        if let Some(op) = UnaryOp::from_function_name(&name) {
            if !called {
                return Err(ParseError { offset, kind: ParseErrorKind::Arity { function: name, found: 0 } });
            }
            self.pos += 1;
            if let Some(Tok::RParen) = self.peek() {
                return Err(ParseError { offset, kind: ParseErrorKind::Arity { function: name, found: 0 } });
            }
            let arg = self.expr()?;
            let mut found = 1;
            while let Some(Tok::Comma) = self.peek() {
                self.pos += 1;
                self.expr()?;
                found += 1;
            }
            if found != 1 {
                return Err(ParseError { offset, kind: ParseErrorKind::Arity { function: name, found } });
            }
            self.expect_rparen()?;
            return Ok(Expr::unary(op, arg));
        }
        if called {
            return Err(ParseError { offset, kind: ParseErrorKind::UnknownSymbol(name) });
        }
        if name == self.var {
            return Ok(Expr::Var);
        }
        if let Some((_, v)) = self.bindings.iter().find(|(k, _)| *k == name) {
            return Ok(Expr::Const(*v));
        }
        Err(ParseError { offset, kind: ParseErrorKind::UnknownSymbol(name) })
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some((_, Tok::RParen)) => Ok(()),
            Some((_, tok)) => Err(ParseError::syntax(offset, format!("expected `)`, found {}", tok_name(&tok)))),
            None => Err(ParseError::syntax(offset, "expected `)`, found end of input")),
        }
    }
}

fn tok_name(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
    }
}

/// Parses `text` as an expression in the single variable `var`.
pub fn parse(text: &str, var: &str) -> Result<Expr, ParseError> {
    parse_with_bindings(text, var, &[])
}

/// Like [`parse`], with extra named constants (sweep parameters such as `s`).
pub fn parse_with_bindings(text: &str, var: &str, bindings: &[(&str, f64)]) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::syntax(0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), var, bindings };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        let (offset, tok) = p.toks[p.pos].clone();
        return Err(ParseError::syntax(offset, format!("unexpected {} after expression", tok_name(&tok))));
    }
    Ok(e)
}

/// Name of the free variable of `text`: the single identifier that is neither a
/// function name nor a binding. Expressions without one default to `x`.
pub fn infer_variable(text: &str, bindings: &[(&str, f64)]) -> Result<String, ParseError> {
    let toks = tokenize(text)?;
    let mut found: Option<(usize, String)> = None;
    for (i, (offset, tok)) in toks.iter().enumerate() {
        let Tok::Ident(name) = tok else { continue };
        let called = matches!(toks.get(i + 1), Some((_, Tok::LParen)));
        if called || UnaryOp::from_function_name(name).is_some() || bindings.iter().any(|(k, _)| k == name) {
            continue;
        }
        match &found {
            None => found = Some((*offset, name.clone())),
            Some((_, prev)) if prev == name => {}
            Some((_, prev)) => {
                return Err(ParseError::syntax(
                    *offset,
                    format!("expression uses both `{prev}` and `{name}`; only one variable is allowed"),
                ))
            }
        }
    }
    Ok(found.map_or_else(|| "x".to_string(), |(_, n)| n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, "x").unwrap()
    }

    #[test]
    fn identity_expression() {
        assert_eq!(parse("t", "t").unwrap(), Expr::Var);
    }

    #[test]
    fn square_shape() {
        assert_eq!(p("x^2"), Expr::binary(BinaryOp::Pow, Expr::Var, Expr::Const(2.0)));
    }

    #[test]
    fn reciprocal_shape() {
        assert_eq!(
            parse("1/t", "t").unwrap(),
            Expr::binary(BinaryOp::Div, Expr::Const(1.0), Expr::Var)
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-x^2"), Expr::unary(UnaryOp::Neg, p("x^2")));
        assert_eq!(p("2^3^2"), Expr::binary(BinaryOp::Pow, Expr::Const(2.0), p("3^2")));
        assert_eq!(p("1-x-x"), Expr::binary(BinaryOp::Sub, p("1-x"), Expr::Var));
        assert_eq!(p("1+2*x"), Expr::binary(BinaryOp::Add, Expr::Const(1.0), p("2*x")));
        assert_eq!(p("-x*2"), Expr::binary(BinaryOp::Mul, p("-x"), Expr::Const(2.0)));
        assert_eq!(p("x^-1"), Expr::binary(BinaryOp::Pow, Expr::Var, p("-1")));
    }

    #[test]
    fn number_literals() {
        assert_eq!(p("1.5e-3"), Expr::Const(1.5e-3));
        assert_eq!(p(".25"), Expr::Const(0.25));
        assert_eq!(p("2E2"), Expr::Const(200.0));
        assert!(parse("1e400", "x").is_err());
    }

    #[test]
    fn function_calls() {
        assert_eq!(p("sqrt(x)"), Expr::unary(UnaryOp::Sqrt, Expr::Var));
        assert_eq!(p("abs(ln(exp(x)))").node_count(), 4);
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("x + y", "x").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol("y".into()));

        let e = parse("x + * 2", "x").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = parse("(x + 1", "x").unwrap_err();
        assert_eq!(e.offset, 6);

        let e = parse("x $ 1", "x").unwrap_err();
        assert_eq!(e.offset, 2);
    }

    #[test]
    fn arity_mismatch() {
        let e = parse("sqrt(x, 2)", "x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity { function: "sqrt".into(), found: 2 });
        let e = parse("exp()", "x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity { function: "exp".into(), found: 0 });
        let e = parse("2*ln", "x").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(matches!(e.kind, ParseErrorKind::Arity { .. }));
    }

    #[test]
    fn unknown_function() {
        let e = parse("sin(x)", "x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol("sin".into()));
    }

    #[test]
    fn bindings_become_constants() {
        let e = parse_with_bindings("t^s", "t", &[("s", 0.5)]).unwrap();
        assert_eq!(e, Expr::binary(BinaryOp::Pow, Expr::Var, Expr::Const(0.5)));
    }

    #[test]
    fn variable_inference() {
        assert_eq!(infer_variable("sqrt(u) + u^2", &[]).unwrap(), "u");
        assert_eq!(infer_variable("3", &[]).unwrap(), "x");
        assert_eq!(infer_variable("t^s", &[("s", 1.0)]).unwrap(), "t");
        assert!(infer_variable("x + y", &[]).is_err());
    }

    #[test]
    fn empty_and_trailing_input() {
        assert!(parse("", "x").is_err());
        let e = parse("x x", "x").unwrap_err();
        assert_eq!(e.offset, 2);
    }
}
