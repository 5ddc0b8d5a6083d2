//! Expression language for metric coefficients.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' uint)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')'
//! func   := sqrt | exp | log | sin | cos
//! ident  := 'x' uint | parameter name
//! ```
//!
//! Exponents are non-negative integer literals only; use `sqrt` for roots.
//! Evaluation is generic over [`Scalar`], so one tree serves plain reals and
//! jets alike.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::jets::Scalar;
use crate::{Error, Result};

/// Largest accepted integer exponent.
pub const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based coordinate index (`x1` is `Coord(0)`).
    Coord(usize),
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Coordinate `x_{i+1}`.
    pub fn coord(i: usize) -> Expr {
        Expr::Coord(i)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn pow(self, k: u32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn sqrt(self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn eval<S: Scalar>(&self, x: &[S], params: &BTreeMap<String, f64>) -> Result<S> {
        let like = &x[0];
        Ok(match self {
            Expr::Const(c) => like.lift(*c),
            Expr::Coord(i) => x
                .get(*i)
                .cloned()
                .ok_or(Error::Dimension {
                    expected: *i + 1,
                    got: x.len(),
                })?,
            Expr::Param(name) => like.lift(
                *params
                    .get(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            ),
            Expr::Neg(e) => -e.eval(x, params)?,
            Expr::Binary(op, l, r) => {
                let l = l.eval(x, params)?;
                let r = r.eval(x, params)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r.value() == 0.0 {
                            return Err(Error::DivisionByZero);
                        }
                        l / r
                    }
                }
            }
            Expr::Pow(e, k) => e.eval(x, params)?.powi(*k),
            Expr::Call(f, e) => {
                let u = e.eval(x, params)?;
                let v = u.value();
                match f {
                    Func::Sqrt | Func::Log if !(v > 0.0) => {
                        return Err(Error::Domain {
                            func: f.name(),
                            value: v,
                        })
                    }
                    Func::Sqrt => u.sqrt(),
                    Func::Log => u.ln(),
                    Func::Exp => u.exp(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                }
            }
        })
    }

    /// Largest coordinate index referenced, zero-based.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Coord(i) => Some(*i),
            Expr::Const(_) | Expr::Param(_) => None,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.max_coord(),
            Expr::Binary(_, l, r) => match (l.max_coord(), r.max_coord()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn params_used<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Param(p) => out.push(p),
            Expr::Const(_) | Expr::Coord(_) => {}
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.params_used(out),
            Expr::Binary(_, l, r) => {
                l.params_used(out);
                r.params_used(out);
            }
        }
    }
}

fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr::Binary(op, Box::new(l), Box::new(r))
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        bin(BinOp::Add, self, rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        bin(BinOp::Sub, self, rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        bin(BinOp::Mul, self, rhs)
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        bin(BinOp::Div, self, rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Fully parenthesized; re-parses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{:?}", c),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(e) => write!(f, "(-{})", e),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({} {} {})", l, sym, r)
            }
            Expr::Pow(e, k) => write!(f, "({}^{})", e, k),
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("coordinate x{index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("exponent must be an integer literal in 0..={MAX_EXPONENT} (use sqrt for roots)")]
    BadExponent,
    #[error("malformed number")]
    BadNumber,
    #[error("trailing input")]
    TrailingInput,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> core::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut integer = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integer = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    integer = false;
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    let digits = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if digits == i {
                        return Err(ParseError {
                            kind: ParseErrorKind::BadNumber,
                            offset: start,
                        });
                    }
                }
                let value: f64 = text[start..i].parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::BadNumber,
                    offset: start,
                })?;
                out.push((Tok::Num { value, integer }, start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(ch),
                    offset: i,
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    params: &'a dyn Fn(&str) -> bool,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.offset(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> core::result::Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> core::result::Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num {
                value,
                integer: true,
            } if value <= MAX_EXPONENT as f64 => {
                self.bump();
                Ok(base.pow(value as u32))
            }
            _ => Err(self.err(ParseErrorKind::BadExponent)),
        }
    }

    fn base(&mut self) -> core::result::Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num { value, .. } => Ok(Expr::Const(value)),
            Tok::LParen => {
                let e = self.expr()?;
                self.close()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.err(ParseErrorKind::Expected("`(` after function name")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.close()?;
                    return Ok(Expr::call(func, arg));
                }
                if let Some(index) = coordinate_index(&name) {
                    if index == 0 || index > self.dim {
                        return Err(ParseError {
                            kind: ParseErrorKind::CoordinateOutOfRange {
                                index,
                                dim: self.dim,
                            },
                            offset: at,
                        });
                    }
                    return Ok(Expr::Coord(index - 1));
                }
                if (self.params)(&name) {
                    Ok(Expr::Param(name))
                } else {
                    Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset: at,
                    })
                }
            }
            _ => Err(ParseError {
                kind: ParseErrorKind::Expected("number, identifier or `(`"),
                offset: at,
            }),
        }
    }

    fn close(&mut self) -> core::result::Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected("`)`")))
        }
    }
}

fn coordinate_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(digits.parse().unwrap_or(usize::MAX))
}

/// Parses `text` over coordinates `x1..x{dim}` and the parameter names in
/// `params`.
pub fn parse_expression<'p>(
    text: &str,
    dim: usize,
    params: impl IntoIterator<Item = &'p str>,
) -> core::result::Result<Expr, ParseError> {
    let names: Vec<&str> = params.into_iter().collect();
    let known = |s: &str| names.contains(&s);
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        dim,
        params: &known,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(ParseErrorKind::TrailingInput));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::seed;
    use crate::testutil::Lcg;
    use alloc::format;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn parses_polynomial_into_expected_tree() {
        let e = parse_expression("x1^2 + 2*x2", 2, []).unwrap();
        let want = Expr::coord(0).pow(2) + Expr::constant(2.0) * Expr::coord(1);
        assert_eq!(e, want);
    }

    #[test]
    fn parses_sphere_factor() {
        let e = parse_expression("1/(1 + (x1^2+x2^2)/4)^2", 2, []).unwrap();
        let v: f64 = e.eval(&[1.0, 1.0], &no_params()).unwrap();
        assert_relative_eq!(v, 1.0 / 2.25, epsilon = 1e-15);
    }

    #[test]
    fn coordinate_out_of_range() {
        let err = parse_expression("sqrt(x3)", 2, []).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::CoordinateOutOfRange { index: 3, dim: 2 }
        );
        assert_eq!(err.offset, 5);
    }

    #[test]
    fn errors_carry_offsets() {
        let err = parse_expression("x1 + foo", 2, []).unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(matches!(err.kind, ParseErrorKind::UnknownIdentifier(_)));
        let err = parse_expression("x1^0.5", 2, []).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadExponent);
        assert_eq!(err.offset, 3);
        let err = parse_expression("(x1 + 1", 2, []).unwrap_err();
        assert_eq!(err.offset, 7);
        let err = parse_expression("x1 $", 2, []).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));
        assert!(parse_expression("x1 x2", 2, []).is_err());
        assert!(parse_expression("sin x1", 2, []).is_err());
        assert!(parse_expression("x0", 2, []).is_err());
    }

    #[test]
    fn params_resolve() {
        let e = parse_expression("k*x1 - -k", 1, ["k"]).unwrap();
        let mut p = no_params();
        p.insert("k".into(), 0.5);
        let v: f64 = e.eval(&[3.0], &p).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-15);
        assert_eq!(
            e.eval(&[3.0], &no_params()).unwrap_err(),
            Error::UnboundParameter("k".into())
        );
    }

    #[test]
    fn eval_product() {
        let e = parse_expression("x1*x2", 2, []).unwrap();
        assert_eq!(e.eval(&[3.0, 4.0], &no_params()).unwrap(), 12.0);
    }

    #[test]
    fn eval_sqrt_on_jet() {
        let e = parse_expression("sqrt(x1)", 1, []).unwrap();
        let x = seed(&[4.0], &[0], 1).unwrap();
        let j = e.eval(&x, &no_params()).unwrap();
        assert_eq!(j.value(), 2.0);
        assert_relative_eq!(j.derivative(&[1]).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn domain_errors() {
        let p = no_params();
        let e = parse_expression("log(x1)", 1, []).unwrap();
        assert!(matches!(e.eval(&[0.0], &p), Err(Error::Domain { func: "log", .. })));
        let e = parse_expression("sqrt(x1 - 1)", 1, []).unwrap();
        assert!(matches!(e.eval(&[0.5], &p), Err(Error::Domain { func: "sqrt", .. })));
        let e = parse_expression("1/(x1 - 1)", 1, []).unwrap();
        assert_eq!(e.eval(&[1.0], &p).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse_expression("-x1^2", 1, []).unwrap();
        assert_eq!(e.eval(&[3.0], &no_params()).unwrap(), -9.0);
        let e = parse_expression("2e-1*x1 + .5", 1, []).unwrap();
        assert_relative_eq!(e.eval(&[1.0], &no_params()).unwrap(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn print_reparse_round_trip() {
        let texts = [
            "x1^2 + 2*x2",
            "1/(1 + (x1^2+x2^2)/4)^2",
            "exp(-0.5*x1)*cos(x2) - sin(x1*x2)/3",
            "sqrt(1 + x1^2) - log(2 + x2^4) - -x1",
            "(x1 - x2) - (x2 - x1)*1e-3",
        ];
        let mut rng = Lcg::new(11);
        for t in texts {
            let e = parse_expression(t, 2, []).unwrap();
            let printed = format!("{}", e);
            let e2 = parse_expression(&printed, 2, []).unwrap();
            for _ in 0..100 {
                let x = vec![rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
                let a: f64 = e.eval(&x, &no_params()).unwrap();
                let b: f64 = e2.eval(&x, &no_params()).unwrap();
                assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300), "{t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn negative_constants_print_and_reparse() {
        let e = Expr::constant(-2.5) * Expr::coord(0);
        let e2 = parse_expression(&format!("{}", e), 1, []).unwrap();
        assert_eq!(e2.eval(&[2.0], &no_params()).unwrap(), -5.0);
    }
}
