//! Text syntax for polynomials, forms and multivectors, the canonical
//! serializer, and the report and CSV layouts used by the command line tool.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum   := wedge (('+' | '-') wedge)*
//! wedge := term ('^' term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' INTEGER)*        scalar bases only
//! atom  := NUMBER | x<i> | dx<i> | e<i> | '(' sum ')'
//! ```
//!
//! Indices are 1-based and checked against the declared dimension.

mod format;
mod parse;
mod report;

use crate::error::{Error, Result};
use crate::{DiffForm, MultiVector, Poly};

pub use format::{format_alternating, format_poly, format_poly_named, format_rational, serialize};
pub use parse::{Expr, ExprKind};
pub use report::{trajectory_csv_header, trajectory_csv_rows, Provenance, Report, StageRecord, SCHEMA_VERSION};

use parse::{elaborate, parse_expr, Elem, Names};

/// What the caller wants back; `None` accepts any degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Poly,
    Form(Option<usize>),
    MultiVector(Option<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Poly(Poly),
    Form(DiffForm),
    MultiVector(MultiVector),
}

impl Value {
    pub fn expected(&self) -> Expected {
        match self {
            Value::Poly(_) => Expected::Poly,
            Value::Form(w) => Expected::Form(Some(w.degree())),
            Value::MultiVector(p) => Expected::MultiVector(Some(p.degree())),
        }
    }
}

fn mismatch(found: &str, wanted: &str) -> Error {
    Error::Parse { line: 1, col: 1, msg: format!("expected {wanted}, found {found}") }
}

fn degree_label(d: Option<usize>) -> String {
    d.map_or_else(String::new, |d| format!(" of degree {d}"))
}

/// Parses `text` in dimension `dim`.
pub fn parse(text: &str, dim: usize, expected: Expected) -> Result<Value> {
    let elem = elaborate(&parse_expr(text, &Names::Coordinates)?, dim)?;
    Ok(match (elem, expected) {
        (Elem::Scalar(p), Expected::Poly) => Value::Poly(p),
        (Elem::Scalar(p), Expected::Form(d)) if p.is_zero() => Value::Form(DiffForm::zero(dim, d.unwrap_or(0))),
        (Elem::Scalar(p), Expected::MultiVector(d)) if p.is_zero() => {
            Value::MultiVector(MultiVector::zero(dim, d.unwrap_or(0)))
        }
        (Elem::Scalar(p), Expected::Form(None | Some(0))) => Value::Form(DiffForm::scalar(dim, p)),
        (Elem::Scalar(p), Expected::MultiVector(None | Some(0))) => Value::MultiVector(MultiVector::scalar(dim, p)),
        (Elem::Form(w), Expected::Form(d)) if d.is_none_or(|d| d == w.degree()) => Value::Form(w),
        (Elem::Vector(v), Expected::MultiVector(d)) if d.is_none_or(|d| d == v.degree()) => Value::MultiVector(v),
        (found, wanted) => {
            let wanted = match wanted {
                Expected::Poly => "a polynomial".to_string(),
                Expected::Form(d) => format!("a form{}", degree_label(d)),
                Expected::MultiVector(d) => format!("a multivector{}", degree_label(d)),
            };
            let found = match found {
                Elem::Scalar(_) => "a scalar".to_string(),
                Elem::Form(w) => format!("a form of degree {}", w.degree()),
                Elem::Vector(v) => format!("a multivector of degree {}", v.degree()),
            };
            return Err(mismatch(&found, &wanted));
        }
    })
}

pub fn parse_poly(text: &str, dim: usize) -> Result<Poly> {
    match parse(text, dim, Expected::Poly)? {
        Value::Poly(p) => Ok(p),
        _ => unreachable!("parse honours the expected kind"),
    }
}

pub fn parse_form(text: &str, dim: usize, degree: Option<usize>) -> Result<DiffForm> {
    match parse(text, dim, Expected::Form(degree))? {
        Value::Form(w) => Ok(w),
        _ => unreachable!("parse honours the expected kind"),
    }
}

pub fn parse_multivector(text: &str, dim: usize, degree: Option<usize>) -> Result<MultiVector> {
    match parse(text, dim, Expected::MultiVector(degree))? {
        Value::MultiVector(p) => Ok(p),
        _ => unreachable!("parse honours the expected kind"),
    }
}

/// Names accepted by [`parse_univariate`].
pub const UNIVARIATE_NAMES: &[&str] = &["u", "f", "t", "x", "x1"];

/// Parses a polynomial in one variable, written with any one of
/// [`UNIVARIATE_NAMES`].
pub fn parse_univariate(text: &str) -> Result<Poly> {
    match elaborate(&parse_expr(text, &Names::Univariate(UNIVARIATE_NAMES))?, 1)? {
        Elem::Scalar(p) => Ok(p),
        _ => unreachable!("no basis elements in univariate mode"),
    }
}

/// Parses the whole expression tree without elaborating it.
pub fn parse_tree(text: &str) -> Result<Expr> {
    parse_expr(text, &Names::Coordinates)
}
