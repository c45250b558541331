//! Expression syntax tree and its recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' integer)?
//! base   := number | ident | '(' expr ')' | 'exp' '(' expr ')'
//! ```
//!
//! Implicit multiplication is rejected. Numbers may carry a decimal point
//! and are converted to exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::coeff::Coeff;
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    /// Identifiers referenced by the expression, in first-use order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) => a.collect_symbols(out),
        }
    }

    /// Syntactic partial derivative with respect to an ordinary (commuting)
    /// symbol. Only light constant folding is applied.
    pub fn derive(&self, var: &str) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Expr::int(0),
            Sym(s) => Expr::int(if s == var { 1 } else { 0 }),
            Add(a, b) => add(a.derive(var), b.derive(var)),
            Sub(a, b) => sub(a.derive(var), b.derive(var)),
            Neg(a) => neg(a.derive(var)),
            Mul(a, b) => add(
                mul(a.derive(var), (**b).clone()),
                mul((**a).clone(), b.derive(var)),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derive(var), (**b).clone()),
                    mul((**a).clone(), b.derive(var)),
                ),
                Pow(b.clone(), 2),
            ),
            Pow(a, k) => match k {
                0 => Expr::int(0),
                _ => mul(mul(Expr::int(*k), pow((**a).clone(), k - 1)), a.derive(var)),
            },
            Exp(a) => mul(self.clone(), a.derive(var)),
        }
    }

    /// Canonical form, resolving each symbol through `lookup`.
    pub fn to_coeff(&self, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<Coeff> {
        use Expr::*;
        Ok(match self {
            Num(q) => Coeff::from_rational(q.clone()),
            Sym(s) => Coeff::var(lookup(s).ok_or_else(|| Error::UnknownCoordinate(s.clone()))?),
            Add(a, b) => a.to_coeff(lookup)?.add(&b.to_coeff(lookup)?),
            Sub(a, b) => a.to_coeff(lookup)?.sub(&b.to_coeff(lookup)?),
            Mul(a, b) => a.to_coeff(lookup)?.mul(&b.to_coeff(lookup)?),
            Div(a, b) => a.to_coeff(lookup)?.div(&b.to_coeff(lookup)?)?,
            Neg(a) => a.to_coeff(lookup)?.neg(),
            Pow(a, k) => a.to_coeff(lookup)?.powi(*k)?,
            Exp(a) => Coeff::exp(&a.to_coeff(lookup)?),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(q) if !q.is_integer() || q < &Rational::zero() => 2,
            _ => 5,
        }
    }
}

fn is_num(e: &Expr, v: i64) -> bool {
    matches!(e, Expr::Num(q) if *q == Rational::from_integer(v.into()))
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0) {
        b
    } else if is_num(&b, 0) {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 0) {
        a
    } else if is_num(&a, 0) {
        neg(b)
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(q) => Expr::Num(-q),
        other => Expr::Neg(Box::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0) || is_num(&b, 0) {
        Expr::int(0)
    } else if is_num(&a, 1) {
        b
    } else if is_num(&b, 1) {
        a
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0) {
        Expr::int(0)
    } else {
        Expr::Div(Box::new(a), Box::new(b))
    }
}

fn pow(a: Expr, k: i64) -> Expr {
    match k {
        0 => Expr::int(1),
        1 => a,
        _ => Expr::Pow(Box::new(a), k),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " + ")?;
                wrap(b, 2, f)
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " - ")?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "*")?;
                wrap(b, 3, f)
            }
            Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "/")?;
                wrap(b, 4, f)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 3, f)
            }
            Expr::Pow(a, k) => {
                wrap(a, 5, f)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: String) -> Error {
        Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected `{c}`, found `{x}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        let parens = self.peek() == Some('(');
        if parens {
            self.pos += 1;
        }
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer exponent".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let k: i64 = s
            .parse()
            .map_err(|_| self.error(format!("exponent `{s}` out of range")))?;
        if parens {
            self.expect(')')?;
        }
        Ok(if negative { -k } else { k })
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if name == "exp" && self.peek() == Some('(') {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Exp(Box::new(e)));
                }
                Ok(Expr::Sym(name))
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut seen_dot = false;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_digit() {
                self.pos += 1;
            } else if c == '.' && !seen_dot {
                seen_dot = true;
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.error("malformed number".into()));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits
            .parse()
            .map_err(|_| self.error(format!("malformed number `{text}`")))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(numer, denom);
        // implicit multiplication such as `2x` is not part of the grammar
        if let Some(c) = self.chars.get(self.pos) {
            if c.is_alphabetic() || *c == '(' {
                return Err(self.error("implicit multiplication is not allowed".into()));
            }
        }
        Ok(Expr::Num(if value.is_zero() {
            Rational::zero()
        } else {
            value * Rational::one()
        }))
    }
}
