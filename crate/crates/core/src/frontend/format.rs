use num_traits::{One, Signed};

use crate::exterior::{Alternating, Kind};
use crate::{Poly, Rational};

use super::Value;

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Terms as `(negative, magnitude text)`, highest monomial first.
fn signed_terms(p: &Poly, names: &[String], basis: Option<&str>) -> Vec<(bool, String)> {
    p.terms()
        .rev()
        .map(|(m, c)| {
            let mut factors: Vec<String> = Vec::new();
            let mag = c.abs();
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{e}", names[i])),
                }
            }
            if let Some(b) = basis {
                factors.push(b.to_string());
            }
            if !mag.is_one() || factors.is_empty() {
                factors.insert(0, format_rational(&mag));
            }
            (c.is_negative(), factors.join("*"))
        })
        .collect()
}

fn join(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, t)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&t);
    }
    out
}

fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Canonical text of a polynomial in `x1, .., xn`.
pub fn format_poly(p: &Poly) -> String {
    join(signed_terms(p, &coordinate_names(p.num_vars()), None))
}

/// Canonical text with custom variable names.
pub fn format_poly_named(p: &Poly, names: &[&str]) -> String {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    join(signed_terms(p, &names, None))
}

/// Canonical text of a form or multivector: blades in lexicographic order,
/// each coefficient expanded into monomials.
pub fn format_alternating<K: Kind>(a: &Alternating<Rational, K>) -> String {
    let names = coordinate_names(a.num_vars());
    let mut terms = Vec::new();
    for (blade, c) in a.components() {
        if c.is_zero() {
            continue;
        }
        let basis: Vec<String> = blade.iter().map(|i| format!("{}{}", K::BASIS, i + 1)).collect();
        let basis = basis.join("^");
        terms.extend(signed_terms(c, &names, (!basis.is_empty()).then_some(basis.as_str())));
    }
    join(terms)
}

pub fn serialize(v: &Value) -> String {
    match v {
        Value::Poly(p) => format_poly(p),
        Value::Form(w) => format_alternating(w),
        Value::MultiVector(p) => format_alternating(p),
    }
}
