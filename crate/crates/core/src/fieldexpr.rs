//! Scalar fields from small arithmetic expressions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' exponent)?        exponent := '-' exponent | power
//! atom  := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! Variables are `x`, `y`, `r`, `theta` (polar about a configurable origin)
//! and the constant `pi`. Functions: `sin cos exp ln abs`, plus the catalog
//! entry `hadamard(alpha, K)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    R,
    Theta,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Hadamard { alpha: f64, terms: u32 },
}

/// A parsed field expression.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldExpr {
    root: Expr,
}

pub fn parse(text: &str) -> Result<FieldExpr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        len: text.len(),
    };
    let root = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(Error::Syntax {
            position: t.pos,
            message: format!("unexpected {}", t.kind.describe()),
        });
    }
    Ok(FieldExpr { root })
}

impl FromStr for FieldExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl FieldExpr {
    pub fn from_root(root: Expr) -> Self {
        FieldExpr { root }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Evaluates at `p` with polar coordinates taken about `origin`.
    pub fn eval(&self, p: Point, origin: Point) -> Result<f64> {
        let v = eval_node(&self.root, p, origin)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("non-finite value at ({}, {})", p[0], p[1])))
        }
    }

    pub fn is_constant(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Num(_) => true,
                Expr::Var(v) => *v == Var::Pi,
                Expr::Neg(a) | Expr::Call(_, a) => walk(a),
                Expr::Bin(_, a, b) => walk(a) && walk(b),
                Expr::Hadamard { .. } => false,
            }
        }
        walk(&self.root)
    }
}

fn eval_node(e: &Expr, p: Point, origin: Point) -> Result<f64> {
    let polar = || {
        let dx = p[0] - origin[0];
        let dy = p[1] - origin[1];
        (dx.hypot(dy), dy.atan2(dx))
    };
    Ok(match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::X) => p[0],
        Expr::Var(Var::Y) => p[1],
        Expr::Var(Var::R) => polar().0,
        Expr::Var(Var::Theta) => polar().1,
        Expr::Var(Var::Pi) => PI,
        Expr::Neg(a) => -eval_node(a, p, origin)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, p, origin)?, eval_node(b, p, origin)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(Error::Eval("division by zero".into()));
                    }
                    a / b
                }
                BinOp::Pow => {
                    let v = a.powf(b);
                    if v.is_nan() {
                        return Err(Error::Eval(format!("{a}^{b} is undefined")));
                    }
                    v
                }
            }
        }
        Expr::Call(f, a) => {
            let a = eval_node(a, p, origin)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Abs => a.abs(),
                Func::Ln => {
                    if a <= 0.0 {
                        return Err(Error::Eval(format!("ln of non-positive value {a}")));
                    }
                    a.ln()
                }
            }
        }
        Expr::Hadamard { alpha, terms } => hadamard_sum(*alpha, *terms, polar().1),
    })
}

fn hadamard_sum(alpha: f64, terms: u32, theta: f64) -> f64 {
    (1..=terms)
        .map(|k| {
            let freq = (1u64 << k) as f64;
            (-(k as f64) * alpha).exp2() * (freq * theta).cos()
        })
        .sum()
}

fn check_hadamard(alpha: f64, terms: f64) -> Result<u32> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "hadamard alpha {alpha} not in (0, 1)"
        )));
    }
    if terms.fract() != 0.0 || !(1.0..=24.0).contains(&terms) {
        return Err(Error::ParameterOutOfRange(format!(
            "hadamard K {terms} must be an integer in 1..=24"
        )));
    }
    Ok(terms as u32)
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
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
            let s = &text[start..i];
            let v: f64 = s.parse().map_err(|_| Error::Syntax {
                position: start,
                message: format!("malformed number '{s}'"),
            })?;
            out.push(Token {
                kind: Tok::Num(v),
                pos: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
            continue;
        }
        let kind = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push(Token { kind, pos: start });
        i += c.len_utf8();
    }
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token { kind: Tok::Op(c), .. }) if ops.contains(c) => Some(*c),
            _ => None,
        }
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.tokens.get(self.pos).cloned().ok_or(Error::Syntax {
            position: self.len,
            message: "unexpected end of input".into(),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, kind: Tok) -> Result<()> {
        let t = self.next()?;
        if t.kind == kind {
            Ok(())
        } else {
            Err(Error::Syntax {
                position: t.pos,
                message: format!("expected {}, found {}", kind.describe(), t.kind.describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek_op(&['+', '-']) {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_op(&['*', '/']) {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op(&['^']).is_some() {
            self.pos += 1;
            let exp = self.exponent()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.power()
    }

    fn number_arg(&mut self) -> Result<f64> {
        let neg = if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            true
        } else {
            false
        };
        let t = self.next()?;
        match t.kind {
            Tok::Num(v) => Ok(if neg { -v } else { v }),
            other => Err(Error::Syntax {
                position: t.pos,
                message: format!("expected numeric argument, found {}", other.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next()?;
        match t.kind {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let is_call = matches!(self.peek(), Some(Token { kind: Tok::LParen, .. }));
                if is_call {
                    if name == "hadamard" {
                        self.pos += 1;
                        let alpha = self.number_arg()?;
                        self.expect(Tok::Comma)?;
                        let terms = self.number_arg()?;
                        self.expect(Tok::RParen)?;
                        let terms = check_hadamard(alpha, terms)?;
                        return Ok(Expr::Hadamard { alpha, terms });
                    }
                    let f = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "exp" => Func::Exp,
                        "ln" => Func::Ln,
                        "abs" => Func::Abs,
                        _ => return Err(Error::UnknownIdentifier { name, position: t.pos }),
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                let v = match name.as_str() {
                    "x" => Var::X,
                    "y" => Var::Y,
                    "r" => Var::R,
                    "theta" => Var::Theta,
                    "pi" => Var::Pi,
                    _ => return Err(Error::UnknownIdentifier { name, position: t.pos }),
                };
                Ok(Expr::Var(v))
            }
            other => Err(Error::Syntax {
                position: t.pos,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }
}

// ---------------------------------------------------------------- printer

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = |e: &Expr, paren: bool, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        if paren {
            write!(f, "(")?;
            write_expr(e, f)?;
            write!(f, ")")
        } else {
            write_expr(e, f)
        }
    };
    match e {
        Expr::Num(v) => {
            if *v < 0.0 {
                write!(f, "(-{})", -v)
            } else {
                write!(f, "{v}")
            }
        }
        Expr::Var(v) => write!(
            f,
            "{}",
            match v {
                Var::X => "x",
                Var::Y => "y",
                Var::R => "r",
                Var::Theta => "theta",
                Var::Pi => "pi",
            }
        ),
        Expr::Neg(a) => {
            write!(f, "-")?;
            wrap(a, prec(a) < 3, f)
        }
        Expr::Bin(op, a, b) => {
            let (sym, p) = match op {
                BinOp::Add => (" + ", 1),
                BinOp::Sub => (" - ", 1),
                BinOp::Mul => (" * ", 2),
                BinOp::Div => (" / ", 2),
                BinOp::Pow => ("^", 4),
            };
            if *op == BinOp::Pow {
                wrap(a, prec(a) <= 4, f)?;
                write!(f, "{sym}")?;
                wrap(b, prec(b) < 3, f)
            } else {
                wrap(a, prec(a) < p, f)?;
                write!(f, "{sym}")?;
                wrap(b, prec(b) <= p, f)
            }
        }
        Expr::Call(func, a) => {
            let name = match func {
                Func::Sin => "sin",
                Func::Cos => "cos",
                Func::Exp => "exp",
                Func::Ln => "ln",
                Func::Abs => "abs",
            };
            write!(f, "{name}(")?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::Hadamard { alpha, terms } => write!(f, "hadamard({alpha}, {terms})"),
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.root, f)
    }
}

// ---------------------------------------------------------------- fields

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Interior,
    Boundary,
}

type FieldFn = dyn Fn(Point) -> Result<f64> + Send + Sync;

#[derive(Clone)]
enum FieldKind {
    Zero,
    Expr { expr: Arc<FieldExpr>, origin: Point },
    Func(Arc<FieldFn>),
}

/// A deterministic real-valued field on Ω̄ or on ∂Ω.
#[derive(Clone)]
pub struct ScalarField {
    kind: FieldKind,
    support: Support,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FieldKind::Zero => write!(f, "ScalarField(0)"),
            FieldKind::Expr { expr, .. } => write!(f, "ScalarField({expr})"),
            FieldKind::Func(_) => write!(f, "ScalarField(<fn>)"),
        }
    }
}

impl ScalarField {
    pub fn zero(support: Support) -> Self {
        ScalarField {
            kind: FieldKind::Zero,
            support,
        }
    }

    pub fn constant(c: f64, support: Support) -> Self {
        if c == 0.0 {
            return Self::zero(support);
        }
        Self::from_expr(FieldExpr::from_root(Expr::Num(c)), [0.0, 0.0], support)
    }

    pub fn from_expr(expr: FieldExpr, origin: Point, support: Support) -> Self {
        if expr.root == Expr::Num(0.0) {
            return Self::zero(support);
        }
        ScalarField {
            kind: FieldKind::Expr {
                expr: Arc::new(expr),
                origin,
            },
            support,
        }
    }

    pub fn parse(text: &str, origin: Point, support: Support) -> Result<Self> {
        Ok(Self::from_expr(parse(text)?, origin, support))
    }

    pub fn from_fn<F>(f: F, support: Support) -> Self
    where
        F: Fn(Point) -> Result<f64> + Send + Sync + 'static,
    {
        ScalarField {
            kind: FieldKind::Func(Arc::new(f)),
            support,
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, FieldKind::Zero)
    }

    /// Source text when the field came from an expression.
    pub fn expression(&self) -> Option<String> {
        match &self.kind {
            FieldKind::Zero => Some("0".into()),
            FieldKind::Expr { expr, .. } => Some(expr.to_string()),
            FieldKind::Func(_) => None,
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &ScalarField) -> ScalarField {
        if self.is_zero() {
            return other.clone().with_support(self.support);
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (self.clone(), other.clone());
        ScalarField::from_fn(move |p| Ok(a.eval(p)? + b.eval(p)?), self.support)
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        if self.is_zero() || c == 0.0 {
            return ScalarField::zero(self.support);
        }
        let a = self.clone();
        ScalarField::from_fn(move |p| Ok(c * a.eval(p)?), self.support)
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        match &self.kind {
            FieldKind::Zero => Ok(0.0),
            FieldKind::Expr { expr, origin } => expr.eval(p, *origin),
            FieldKind::Func(f) => {
                let v = f(p)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Eval(format!("non-finite value at ({}, {})", p[0], p[1])))
                }
            }
        }
    }
}

/// Lacunary boundary datum `θ ↦ Σ_{k=1}^{K} 2^{-kα} cos(2^k θ)` on the unit circle.
pub fn hadamard_trace(alpha: f64, terms: u32) -> Result<ScalarField> {
    let terms = check_hadamard(alpha, terms as f64)?;
    Ok(ScalarField::from_expr(
        FieldExpr::from_root(Expr::Hadamard { alpha, terms }),
        [0.0, 0.0],
        Support::Boundary,
    ))
}
