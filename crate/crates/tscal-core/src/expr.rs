//! Univariate expression trees: the input language for functions on a
//! scale, with exact evaluation, symbolic differentiation and a
//! round-tripping printer/parser.
//!
//! Grammar (infix, whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' powrhs)?          powrhs := '-' powrhs | power
//! atom   := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC   := exp | log | sin | cos
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x^2` is `-(x^2)`. The only variable is `x`; numeric literals are
//! decimal or scientific. A leading minus on a literal is folded into
//! the constant, so printing and re-parsing yields an identical tree.

// the folding constructors compare floats in guards, which patterns cannot
#![allow(clippy::redundant_guards)]

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

/// Evaluation failure: the expression is undefined (or overflows) at
/// the point. Never produces a silent NaN.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("log of non-positive value {arg} at x = {x}")]
    LogDomain { x: f64, arg: f64 },
    #[error("power {base}^{exponent} undefined at x = {x}")]
    PowDomain { x: f64, base: f64, exponent: f64 },
    #[error("non-finite result at x = {x}")]
    Overflow { x: f64 },
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at column {col}: {msg}")]
pub struct ParseError {
    pub col: usize,
    pub msg: String,
}

impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(u) => -u.eval(x)?,
            Expr::Add(u, v) => u.eval(x)? + v.eval(x)?,
            Expr::Sub(u, v) => u.eval(x)? - v.eval(x)?,
            Expr::Mul(u, v) => u.eval(x)? * v.eval(x)?,
            Expr::Div(u, v) => {
                let d = v.eval(x)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero { x });
                }
                u.eval(x)? / d
            }
            Expr::Pow(u, v) => {
                let base = u.eval(x)?;
                let e = v.eval(x)?;
                pow_checked(base, e, x)?
            }
            Expr::Exp(u) => u.eval(x)?.exp(),
            Expr::Log(u) => {
                let a = u.eval(x)?;
                if a <= 0.0 {
                    return Err(EvalError::LogDomain { x, arg: a });
                }
                a.ln()
            }
            Expr::Sin(u) => u.eval(x)?.sin(),
            Expr::Cos(u) => u.eval(x)?.cos(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow { x })
        }
    }

    /// Symbolic derivative with respect to `x`, lightly folded so the
    /// usual polynomial cases come out clean.
    pub fn diff(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(u) => neg(u.diff()),
            Expr::Add(u, v) => add(u.diff(), v.diff()),
            Expr::Sub(u, v) => sub(u.diff(), v.diff()),
            Expr::Mul(u, v) => add(
                mul(u.diff(), (**v).clone()),
                mul((**u).clone(), v.diff()),
            ),
            Expr::Div(u, v) => div(
                sub(
                    mul(u.diff(), (**v).clone()),
                    mul((**u).clone(), v.diff()),
                ),
                mul((**v).clone(), (**v).clone()),
            ),
            Expr::Pow(u, v) => match &**v {
                // d(u^c) = c * u^(c-1) * u'
                Expr::Const(c) => mul(
                    mul(Expr::Const(*c), pow((**u).clone(), Expr::Const(c - 1.0))),
                    u.diff(),
                ),
                // d(u^v) = u^v * (v' log u + v u' / u)
                _ => mul(
                    pow((**u).clone(), (**v).clone()),
                    add(
                        mul(v.diff(), Expr::Log(u.clone())),
                        div(mul((**v).clone(), u.diff()), (**u).clone()),
                    ),
                ),
            },
            Expr::Exp(u) => mul(Expr::Exp(u.clone()), u.diff()),
            Expr::Log(u) => div(u.diff(), (**u).clone()),
            Expr::Sin(u) => mul(Expr::Cos(u.clone()), u.diff()),
            Expr::Cos(u) => neg(mul(Expr::Sin(u.clone()), u.diff())),
        }
    }

    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        Parser::new(src)?.parse_all()
    }

    /// Minimal-parenthesis rendering; `parse(pretty(e))` is
    /// structurally identical to `e`.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 10,
            Expr::Mul(..) | Expr::Div(..) => 20,
            Expr::Neg(_) => 25,
            Expr::Const(c) if *c < 0.0 => 25,
            Expr::Pow(..) => 30,
            _ => 40,
        }
    }

    fn write(&self, out: &mut String, min: u8) {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            out.push('(');
        }
        match self {
            Expr::Const(c) => out.push_str(&format!("{c}")),
            Expr::Var => out.push('x'),
            Expr::Neg(u) => {
                out.push('-');
                u.write(out, 25);
            }
            Expr::Add(u, v) => {
                u.write(out, 10);
                out.push('+');
                v.write(out, 11);
            }
            Expr::Sub(u, v) => {
                u.write(out, 10);
                out.push('-');
                v.write(out, 11);
            }
            Expr::Mul(u, v) => {
                u.write(out, 20);
                out.push('*');
                v.write(out, 21);
            }
            Expr::Div(u, v) => {
                u.write(out, 20);
                out.push('/');
                v.write(out, 21);
            }
            Expr::Pow(u, v) => {
                u.write(out, 31);
                out.push('^');
                v.write(out, 25);
            }
            Expr::Exp(u) | Expr::Log(u) | Expr::Sin(u) | Expr::Cos(u) => {
                out.push_str(match self {
                    Expr::Exp(_) => "exp",
                    Expr::Log(_) => "log",
                    Expr::Sin(_) => "sin",
                    _ => "cos",
                });
                out.push('(');
                u.write(out, 0);
                out.push(')');
            }
        }
        if parens {
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

fn pow_checked(base: f64, e: f64, x: f64) -> Result<f64, EvalError> {
    if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        if base == 0.0 && e < 0.0 {
            return Err(EvalError::DivisionByZero { x });
        }
        return Ok(base.powi(e as i32));
    }
    // non-integer exponent: positivity guard on the base
    if base > 0.0 {
        Ok(base.powf(e))
    } else if base == 0.0 && e > 0.0 {
        Ok(0.0)
    } else {
        Err(EvalError::PowDomain {
            x,
            base,
            exponent: e,
        })
    }
}

// Folding constructors used by `diff`; they never fold to a non-finite
// constant. Guards compare floats, which patterns cannot.

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Neg(Box::new(e)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if (x + y).is_finite() => Expr::Const(x + y),
        (Expr::Const(c), b) if c == 0.0 => b,
        (a, Expr::Const(c)) if c == 0.0 => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if (x - y).is_finite() => Expr::Const(x - y),
        (a, Expr::Const(c)) if c == 0.0 => a,
        (Expr::Const(c), b) if c == 0.0 => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) if (x * y).is_finite() => Expr::Const(x * y),
        (Expr::Const(c), _) | (_, Expr::Const(c)) if c == 0.0 => Expr::Const(0.0),
        (Expr::Const(c), b) if c == 1.0 => b,
        (a, Expr::Const(c)) if c == 1.0 => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(c), b) if c == 0.0 && !matches!(b, Expr::Const(_)) => Expr::Const(0.0),
        (a, Expr::Const(c)) if c == 1.0 => a,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (_, Expr::Const(c)) if *c == 1.0 => a,
        (_, Expr::Const(c)) if *c == 0.0 => Expr::Const(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Parser {
    toks: Vec<(Tok, usize)>, // (token, 1-based start column)
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        let mut toks = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let col = i + 1;
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'+' => {
                    toks.push((Tok::Plus, col));
                    i += 1;
                }
                b'-' => {
                    toks.push((Tok::Minus, col));
                    i += 1;
                }
                b'*' => {
                    toks.push((Tok::Star, col));
                    i += 1;
                }
                b'/' => {
                    toks.push((Tok::Slash, col));
                    i += 1;
                }
                b'^' => {
                    toks.push((Tok::Caret, col));
                    i += 1;
                }
                b'(' => {
                    toks.push((Tok::LParen, col));
                    i += 1;
                }
                b')' => {
                    toks.push((Tok::RParen, col));
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
                            i = j;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let text = &src[start..i];
                    let v: f64 = text.parse().map_err(|_| ParseError {
                        col,
                        msg: format!("invalid number '{text}'"),
                    })?;
                    toks.push((Tok::Num(v), col));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push((Tok::Ident(src[start..i].to_string()), col));
                }
                _ => {
                    return Err(ParseError {
                        col,
                        msg: format!("unexpected character '{}'", c as char),
                    })
                }
            }
        }
        toks.push((Tok::Eof, src.len() + 1));
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn parse_all(&mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        match self.peek() {
            Tok::Eof => Ok(e),
            _ => Err(ParseError {
                col: self.col(),
                msg: "expected an operator or end of input".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            let inner = self.factor()?;
            return Ok(match inner {
                // fold a sign into a literal so printing round-trips
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let rhs = self.pow_rhs()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(rhs)));
        }
        Ok(base)
    }

    fn pow_rhs(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            let inner = self.pow_rhs()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "exp" | "log" | "sin" | "cos" => {
                    if !matches!(self.peek(), Tok::LParen) {
                        return Err(ParseError {
                            col: self.col(),
                            msg: format!("expected '(' after '{name}'"),
                        });
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if !matches!(self.peek(), Tok::RParen) {
                        return Err(ParseError {
                            col: self.col(),
                            msg: "expected ')'".into(),
                        });
                    }
                    self.bump();
                    Ok(match name.as_str() {
                        "exp" => Expr::Exp(Box::new(arg)),
                        "log" => Expr::Log(Box::new(arg)),
                        "sin" => Expr::Sin(Box::new(arg)),
                        _ => Expr::Cos(Box::new(arg)),
                    })
                }
                other => Err(ParseError {
                    col,
                    msg: format!("unknown identifier '{other}'; only the variable 'x' and exp/log/sin/cos are allowed"),
                }),
            },
            Tok::LParen => {
                let e = self.expr()?;
                if !matches!(self.peek(), Tok::RParen) {
                    return Err(ParseError {
                        col: self.col(),
                        msg: "expected ')'".into(),
                    });
                }
                self.bump();
                Ok(e)
            }
            _ => Err(ParseError {
                col,
                msg: "expected a number, 'x', a function, or '('".into(),
            }),
        }
    }
}
