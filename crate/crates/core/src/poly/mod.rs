//! Sparse multivariate polynomials over a [`Scalar`] field.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, and zero coefficients are never stored, so two
//! polynomials are mathematically equal exactly when they are structurally
//! equal. Every symbolic identity in the crate is ultimately checked with
//! [`Polynomial::is_zero`].

mod float_poly;
mod rational_func;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

pub use float_poly::FloatPoly;
pub use rational_func::RationalFunction;

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C: Scalar> {
    num_vars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: C) -> Self {
        Self::term(num_vars, Monomial::one(num_vars), c)
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, C::one())
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable index {i} out of range");
        Self::term(num_vars, Monomial::var(num_vars, i), C::one())
    }

    pub fn term(num_vars: usize, m: Monomial, c: C) -> Self {
        assert_eq!(m.0.len(), num_vars, "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { num_vars, terms }
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "monomial arity");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.num_vars))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.clone() + c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: other.num_vars });
        }
        Ok(())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i` (zero-based).
    pub fn diff(&self, i: usize) -> Result<Self> {
        if i >= self.num_vars {
            return Err(Error::IndexOutOfRange { index: i, len: self.num_vars });
        }
        Ok(self.partial(i))
    }

    pub(crate) fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.0.clone();
            dm[i] -= 1;
            let factor = C::from_u32(e).expect("exponent embeds");
            out.add_term(Monomial(dm), c.clone() * factor);
        }
        out
    }

    /// Substitutes `images[i]` for variable `i`; all images share one arity.
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Result<Self> {
        if images.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: images.len() });
        }
        let m = match images.first() {
            Some(p) => p.num_vars,
            None => return Ok(Polynomial::constant(0, self.constant_term())),
        };
        if let Some(bad) = images.iter().find(|p| p.num_vars != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.num_vars });
        }
        // Cache powers per variable so each is computed once.
        let mut powers: Vec<Vec<Polynomial<C>>> = images.iter().map(|p| vec![Polynomial::one(p.num_vars)]).collect();
        let mut out = Polynomial::zero(m);
        for (mono, c) in &self.terms {
            let mut acc = Polynomial::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                acc = &acc * &powers[i][e as usize];
            }
            out += &acc;
        }
        Ok(out)
    }

    /// `k(f)` for univariate `k`.
    pub fn compose(k: &Polynomial<C>, f: &Polynomial<C>) -> Result<Self> {
        if k.num_vars != 1 {
            return Err(Error::NotUnivariate);
        }
        let top = k.degree().unwrap_or(0);
        let mut acc = Polynomial::zero(f.num_vars);
        for e in (0..=top).rev() {
            acc = &acc * f;
            acc.add_term(Monomial::one(f.num_vars), k.coeff(&Monomial(vec![e])));
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: point.len() });
        }
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    v = v * x.clone();
                }
            }
            total = total + v;
        }
        Ok(total)
    }

    pub fn eval_float<F: Real>(&self, point: &[F]) -> Result<F> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: point.len() });
        }
        let mut total = F::zero();
        for (m, c) in &self.terms {
            let mut v = F::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan);
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = v * x.powi(e as i32);
                }
            }
            total = total + v;
        }
        Ok(total)
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.num_vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Appends `extra` trailing variables that the polynomial does not use.
    pub fn extend_vars(&self, extra: usize) -> Self {
        Polynomial {
            num_vars: self.num_vars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(self.num_vars + extra, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Exact quotient by a single term, `None` if some term is not divisible.
    pub fn div_by_term(&self, m: &Monomial, c: &C) -> Option<Self> {
        if c.is_zero() {
            return None;
        }
        let mut out = Self::zero(self.num_vars);
        for (mono, a) in &self.terms {
            out.add_term(mono.div(m)?, a.clone() / c.clone());
        }
        Some(out)
    }

    /// The single term of a monomial polynomial.
    pub fn as_term(&self) -> Option<(&Monomial, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

pub fn poly_arith<C: Scalar>(a: &Polynomial<C>, b: &Polynomial<C>, op: ArithOp) -> Result<Polynomial<C>> {
    a.check_same(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl<'a, C: Scalar> AddAssign<&'a Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &'a Polynomial<C>) {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial arity mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a, C: Scalar> SubAssign<&'a Polynomial<C>> for Polynomial<C> {
    fn sub_assign(&mut self, rhs: &'a Polynomial<C>) {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial arity mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<C: Scalar> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Scalar> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Scalar> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial arity mismatch");
        let mut out = Polynomial::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Scalar> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Scalar> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(mut self, rhs: Self) -> Polynomial<C> {
        self += &rhs;
        self
    }
}

impl<C: Scalar> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(mut self, rhs: Self) -> Polynomial<C> {
        self -= &rhs;
        self
    }
}

impl<C: Scalar> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        &self * &rhs
    }
}

impl<C: Scalar> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}
