use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::{DiffForm, MultiVector, Poly, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
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

#[derive(Clone, Debug, PartialEq)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int: String = chars[start..i].iter().collect();
            let mut value = Rational::from_integer(int.parse::<BigInt>().expect("digits"));
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if fs == i {
                    return Err(err(l0, c0 + (i - start), "expected digits after '.'"));
                }
                let frac: String = chars[fs..i].iter().collect();
                let den = BigInt::from(10u32).pow((i - fs) as u32);
                value += Rational::new(frac.parse::<BigInt>().expect("digits"), den);
            }
            out.push(Token { tok: Tok::Num(value), line: l0, col: c0 });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
        } else {
            return Err(err(l0, c0, format!("unexpected character '{c}'")));
        }
        col += i - start;
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

/// Expression tree with source positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Number(Rational),
    /// 1-based coordinate index.
    Variable(usize),
    Covector(usize),
    Vector(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn has_basis(&self) -> bool {
        use ExprKind::*;
        match &self.kind {
            Number(_) | Variable(_) => false,
            Covector(_) | Vector(_) => true,
            Neg(a) | Pow(a, _) => a.has_basis(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Wedge(a, b) => a.has_basis() || b.has_basis(),
        }
    }
}

/// How bare identifiers map to variables.
#[derive(Clone, Debug)]
pub(crate) enum Names {
    /// `x<i>`, `dx<i>`, `e<i>`.
    Coordinates,
    /// A single variable spelled by any of the given names.
    Univariate(&'static [&'static str]),
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    names: &'a Names,
    seen_name: Option<String>,
}

fn indexed(s: &str, prefix: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn node(kind: ExprKind, at: &Token) -> Expr {
        Expr { kind, line: at.line, col: at.col }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.wedge()?;
        loop {
            let op = self.peek().clone();
            let kind = match op.tok {
                Tok::Plus => ExprKind::Add as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Tok::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.wedge()?;
            lhs = Self::node(kind(Box::new(lhs), Box::new(rhs)), &op);
        }
    }

    fn wedge(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.peek().tok == Tok::Caret {
            let op = self.next();
            let rhs = self.term()?;
            lhs = Self::node(ExprKind::Wedge(Box::new(lhs), Box::new(rhs)), &op);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = self.peek().clone();
            let kind = match op.tok {
                Tok::Star => ExprKind::Mul as fn(Box<Expr>, Box<Expr>) -> ExprKind,
                Tok::Slash => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Self::node(kind(Box::new(lhs), Box::new(rhs)), &op);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            let op = self.next();
            let inner = self.unary()?;
            return Ok(Self::node(ExprKind::Neg(Box::new(inner)), &op));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        // `^` followed by an integer is a power of a scalar; otherwise it is left for the wedge
        while self.peek().tok == Tok::Caret {
            let Tok::Num(e) = &self.toks[self.pos + 1].tok else { break };
            let op = self.peek().clone();
            if base.has_basis() {
                return Err(err(op.line, op.col, "power of a non-scalar; use '^' only between non-scalar factors"));
            }
            if !e.is_integer() || e.numer() > &BigInt::from(u32::MAX) {
                let at = &self.toks[self.pos + 1];
                return Err(err(at.line, at.col, "exponent must be a nonnegative integer"));
            }
            let e: u32 = e.numer().try_into().expect("checked range");
            self.next();
            self.next();
            base = Self::node(ExprKind::Pow(Box::new(base), e), &op);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Num(q) => Ok(Self::node(ExprKind::Number(q.clone()), &t)),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Err(err(close.line, close.col, "expected ')'"));
                }
                Ok(inner)
            }
            Tok::Ident(s) => self.ident(s, &t),
            Tok::End => Err(err(t.line, t.col, "unexpected end of input")),
            other => Err(err(t.line, t.col, format!("unexpected token {}", describe(other)))),
        }
    }

    fn ident(&mut self, s: &str, t: &Token) -> Result<Expr> {
        match self.names {
            Names::Coordinates => {
                let check = |i: usize| if i == 0 { Err(err(t.line, t.col, "indices start at 1")) } else { Ok(i) };
                let kind = if let Some(i) = indexed(s, "dx") {
                    ExprKind::Covector(check(i)?)
                } else if let Some(i) = indexed(s, "x") {
                    ExprKind::Variable(check(i)?)
                } else if let Some(i) = indexed(s, "e") {
                    ExprKind::Vector(check(i)?)
                } else {
                    return Err(err(t.line, t.col, format!("unknown identifier '{s}'")));
                };
                Ok(Self::node(kind, t))
            }
            Names::Univariate(allowed) => {
                if !allowed.contains(&s) {
                    return Err(err(t.line, t.col, format!("unknown identifier '{s}'; expected one of {}", allowed.join(", "))));
                }
                match &self.seen_name {
                    Some(prev) if prev != s => {
                        return Err(err(t.line, t.col, format!("mixes the variables '{prev}' and '{s}'")));
                    }
                    _ => self.seen_name = Some(s.to_string()),
                }
                Ok(Self::node(ExprKind::Variable(1), t))
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(q) => format!("'{q}'"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::End => "end of input".into(),
    }
}

pub(crate) fn parse_expr(text: &str, names: &Names) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, names, seen_name: None };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(err(t.line, t.col, format!("unexpected token {}", describe(&t.tok))));
    }
    Ok(e)
}

/// Intermediate value during elaboration.
#[derive(Clone, Debug)]
pub(crate) enum Elem {
    Scalar(Poly),
    Form(DiffForm),
    Vector(MultiVector),
}

impl Elem {
    fn describe(&self) -> String {
        match self {
            Elem::Scalar(_) => "a scalar (degree 0)".into(),
            Elem::Form(w) => format!("a form of degree {}", w.degree()),
            Elem::Vector(p) => format!("a multivector of degree {}", p.degree()),
        }
    }
}

fn is_zero_scalar(e: &Elem) -> bool {
    matches!(e, Elem::Scalar(p) if p.is_zero())
}

pub(crate) fn elaborate(e: &Expr, dim: usize) -> Result<Elem> {
    use ExprKind::*;
    let here = |msg: String| err(e.line, e.col, msg);
    let coord = |i: usize| {
        if i > dim {
            Err(err(e.line, e.col, format!("index {i} exceeds the dimension {dim}")))
        } else {
            Ok(i - 1)
        }
    };
    Ok(match &e.kind {
        Number(q) => Elem::Scalar(Poly::constant(dim, q.clone())),
        Variable(i) => Elem::Scalar(Poly::var(dim, coord(*i)?)),
        Covector(i) => Elem::Form(DiffForm::basis(dim, &[coord(*i)?])),
        Vector(i) => Elem::Vector(MultiVector::basis(dim, &[coord(*i)?])),
        Neg(a) => match elaborate(a, dim)? {
            Elem::Scalar(p) => Elem::Scalar(-&p),
            Elem::Form(w) => Elem::Form(-&w),
            Elem::Vector(v) => Elem::Vector(-&v),
        },
        Add(a, b) | Sub(a, b) => {
            let (x, mut y) = (elaborate(a, dim)?, elaborate(b, dim)?);
            if matches!(e.kind, Sub(..)) {
                y = match y {
                    Elem::Scalar(p) => Elem::Scalar(-&p),
                    Elem::Form(w) => Elem::Form(-&w),
                    Elem::Vector(v) => Elem::Vector(-&v),
                };
            }
            match (x, y) {
                (x, y) if is_zero_scalar(&x) => y,
                (x, y) if is_zero_scalar(&y) => x,
                (Elem::Scalar(p), Elem::Scalar(q)) => Elem::Scalar(&p + &q),
                (Elem::Form(w), Elem::Form(v)) if w.degree() == v.degree() => Elem::Form(&w + &v),
                (Elem::Vector(w), Elem::Vector(v)) if w.degree() == v.degree() => Elem::Vector(&w + &v),
                (x, y) => {
                    return Err(here(format!(
                        "inhomogeneous sum of {} and {}",
                        x.describe(),
                        y.describe()
                    )))
                }
            }
        }
        Mul(a, b) => match (elaborate(a, dim)?, elaborate(b, dim)?) {
            (Elem::Scalar(p), Elem::Scalar(q)) => Elem::Scalar(&p * &q),
            (Elem::Scalar(p), Elem::Form(w)) | (Elem::Form(w), Elem::Scalar(p)) => Elem::Form(w.scale_poly(&p)),
            (Elem::Scalar(p), Elem::Vector(v)) | (Elem::Vector(v), Elem::Scalar(p)) => Elem::Vector(v.scale_poly(&p)),
            (x, y) => {
                return Err(here(format!("'*' between {} and {}; use '^' for the wedge", x.describe(), y.describe())))
            }
        },
        Div(a, b) => {
            let x = elaborate(a, dim)?;
            let q = match elaborate(b, dim)? {
                Elem::Scalar(p) if p.is_constant() && !p.is_zero() => p.constant_term(),
                Elem::Scalar(p) if p.is_zero() => return Err(here("division by zero".into())),
                y => return Err(here(format!("divisor must be a nonzero number, found {}", y.describe()))),
            };
            let inv = Rational::one() / q;
            match x {
                Elem::Scalar(p) => Elem::Scalar(p.scale(&inv)),
                Elem::Form(w) => Elem::Form(w.scale(&inv)),
                Elem::Vector(v) => Elem::Vector(v.scale(&inv)),
            }
        }
        Wedge(a, b) => match (elaborate(a, dim)?, elaborate(b, dim)?) {
            (Elem::Scalar(_), Elem::Scalar(_)) => {
                return Err(here("'^' between scalars; exponents must be integer literals".into()))
            }
            (Elem::Scalar(p), Elem::Form(w)) | (Elem::Form(w), Elem::Scalar(p)) => Elem::Form(w.scale_poly(&p)),
            (Elem::Scalar(p), Elem::Vector(v)) | (Elem::Vector(v), Elem::Scalar(p)) => Elem::Vector(v.scale_poly(&p)),
            (Elem::Form(w), Elem::Form(v)) => Elem::Form(w.wedge(&v)?),
            (Elem::Vector(w), Elem::Vector(v)) => Elem::Vector(w.wedge(&v)?),
            (x, y) => return Err(here(format!("wedge of {} with {}", x.describe(), y.describe()))),
        },
        Pow(a, k) => match elaborate(a, dim)? {
            Elem::Scalar(p) => Elem::Scalar(if *k == 0 { Poly::one(dim) } else { p.pow(*k) }),
            x => return Err(here(format!("power of {}", x.describe()))),
        },
    })
}
