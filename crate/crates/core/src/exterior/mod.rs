//! Multivector fields and differential forms on coordinate n-space.
//!
//! Both are sparse maps from strictly increasing index tuples ("blades") to
//! polynomial coefficients; the two only differ in which calculus applies, so
//! they share one container parametrized by a marker type. Coefficients may
//! carry trailing parameter variables beyond the ambient dimension (the Moser
//! time `t`, say); derivatives only ever act on the first `dim` variables.
//!
//! Indices are zero-based in code: blade `[0, 2]` is `dx1 ^ dx3` or `e1 ^ e3`.

mod calculus;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{Real, Scalar};

pub use calculus::{contract_volume, multivector_from_form};

pub type Blade = Vec<usize>;

pub trait Kind: Clone + Copy + Debug + PartialEq + Send + Sync + 'static {
    const NAME: &'static str;
    /// Prefix of the basis elements in the text syntax.
    const BASIS: &'static str;
}

/// Marker for multivector fields (`e<i>` basis vectors).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vectors;

/// Marker for differential forms (`dx<i>` basis covectors).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covectors;

impl Kind for Vectors {
    const NAME: &'static str = "multivector";
    const BASIS: &'static str = "e";
}

impl Kind for Covectors {
    const NAME: &'static str = "form";
    const BASIS: &'static str = "dx";
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alternating<C: Scalar, K: Kind> {
    dim: usize,
    degree: usize,
    num_vars: usize,
    comps: BTreeMap<Blade, Polynomial<C>>,
    _kind: PhantomData<K>,
}

pub type MultiVectorOf<C> = Alternating<C, Vectors>;
pub type DiffFormOf<C> = Alternating<C, Covectors>;

/// Sorts the concatenation `a ++ b` of two increasing tuples.
///
/// Returns the merged tuple and `true` when the sorting permutation is odd,
/// or `None` if the tuples share an index.
pub(crate) fn merge(a: &[usize], b: &[usize]) -> Option<(Blade, bool)> {
    let mut inversions = 0usize;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a[i..]
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, inversions % 2 == 1))
}

/// Sorts an arbitrary index list, returning the parity, or `None` on repeats.
pub(crate) fn sort_blade(idx: &[usize]) -> Option<(Blade, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    // insertion sort to count transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

/// All increasing `k`-tuples of `0..n` in lexicographic order.
pub fn blades(n: usize, k: usize) -> Vec<Blade> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Blade, out: &mut Vec<Blade>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub(crate) fn complement(n: usize, b: &[usize]) -> Blade {
    (0..n).filter(|i| !b.contains(i)).collect()
}

impl<C: Scalar, K: Kind> Alternating<C, K> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self::zero_with_vars(dim, degree, dim)
    }

    pub fn zero_with_vars(dim: usize, degree: usize, num_vars: usize) -> Self {
        assert!(num_vars >= dim, "coefficients need at least `dim` variables");
        Alternating { dim, degree, num_vars, comps: BTreeMap::new(), _kind: PhantomData }
    }

    /// Degree-0 element.
    pub fn scalar(dim: usize, p: Polynomial<C>) -> Self {
        let mut out = Self::zero_with_vars(dim, 0, p.num_vars());
        out.insert(Vec::new(), p);
        out
    }

    /// `coeff * b_{i1} ^ ... ^ b_{ik}` for an arbitrary index list.
    pub fn monomial(dim: usize, indices: &[usize], coeff: Polynomial<C>) -> Self {
        assert!(indices.iter().all(|&i| i < dim), "basis index out of range");
        let mut out = Self::zero_with_vars(dim, indices.len(), coeff.num_vars());
        if let Some((blade, odd)) = sort_blade(indices) {
            out.insert(blade, if odd { -coeff } else { coeff });
        }
        out
    }

    /// Constant basis element with coefficient 1.
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        Self::monomial(dim, indices, Polynomial::one(dim))
    }

    pub fn from_components<I>(dim: usize, degree: usize, num_vars: usize, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Polynomial<C>)>,
    {
        let mut out = Self::zero_with_vars(dim, degree, num_vars);
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "component of degree {} in a {} of degree {degree}",
                    idx.len(),
                    K::NAME
                )));
            }
            if let Some(&i) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange { index: i, len: dim });
            }
            if p.num_vars() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, found: p.num_vars() });
            }
            if let Some((blade, odd)) = sort_blade(&idx) {
                out.insert(blade, if odd { -p } else { p });
            }
        }
        Ok(out)
    }

    fn insert(&mut self, blade: Blade, p: Polynomial<C>) {
        if p.is_zero() {
            return;
        }
        match self.comps.get_mut(&blade) {
            Some(existing) => {
                *existing += &p;
                if existing.is_zero() {
                    self.comps.remove(&blade);
                }
            }
            None => {
                self.comps.insert(blade, p);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components in lexicographic blade order.
    pub fn components(&self) -> impl Iterator<Item = (&Blade, &Polynomial<C>)> {
        self.comps.iter()
    }

    pub fn component(&self, blade: &[usize]) -> Polynomial<C> {
        self.comps.get(blade).cloned().unwrap_or_else(|| Polynomial::zero(self.num_vars))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: other.num_vars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let rest = if self.is_zero() { self } else { other };
        for (b, p) in &rest.comps {
            out.insert(b.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_components(|p| p.scale(c))
    }

    /// Multiplication by a function.
    pub fn scale_poly(&self, g: &Polynomial<C>) -> Self {
        assert_eq!(g.num_vars(), self.num_vars, "coefficient arity mismatch");
        self.map_components(|p| p * g)
    }

    pub fn map_components(&self, f: impl Fn(&Polynomial<C>) -> Polynomial<C>) -> Self {
        let mut out = Self::zero_with_vars(self.dim, self.degree, self.num_vars);
        for (b, p) in &self.comps {
            out.insert(b.clone(), f(p));
        }
        out
    }

    /// Truncates every coefficient to its homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        self.map_components(|p| p.homogeneous_part(d))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero_with_vars(self.dim, degree, self.num_vars);
        if degree > self.dim {
            return Ok(out);
        }
        for (a, pa) in &self.comps {
            for (b, pb) in &other.comps {
                if let Some((blade, odd)) = merge(a, b) {
                    let prod = pa * pb;
                    out.insert(blade, if odd { -prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Appends trailing parameter variables to all coefficients.
    pub fn extend_vars(&self, extra: usize) -> Self {
        let mut out = Self::zero_with_vars(self.dim, self.degree, self.num_vars + extra);
        for (b, p) in &self.comps {
            out.insert(b.clone(), p.extend_vars(extra));
        }
        out
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D + Copy) -> Alternating<D, K> {
        let mut out = Alternating::zero_with_vars(self.dim, self.degree, self.num_vars);
        for (b, p) in &self.comps {
            out.insert(b.clone(), p.map_coeffs(f));
        }
        out
    }

    /// Component values at a point, one entry per blade of [`blades`]`(dim, degree)`.
    pub fn eval_float<F: Real>(&self, point: &[F]) -> Result<Vec<F>> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: point.len() });
        }
        blades(self.dim, self.degree)
            .iter()
            .map(|b| match self.comps.get(b) {
                Some(p) => p.eval_float(point),
                None => Ok(F::zero()),
            })
            .collect()
    }
}

impl<C: Scalar, K: Kind> Add for &Alternating<C, K> {
    type Output = Alternating<C, K>;
    fn add(self, rhs: Self) -> Alternating<C, K> {
        self.try_add(rhs).expect("incompatible summands")
    }
}

impl<C: Scalar, K: Kind> Sub for &Alternating<C, K> {
    type Output = Alternating<C, K>;
    fn sub(self, rhs: Self) -> Alternating<C, K> {
        self.try_add(&-rhs).expect("incompatible summands")
    }
}

impl<C: Scalar, K: Kind> Neg for &Alternating<C, K> {
    type Output = Alternating<C, K>;
    fn neg(self) -> Alternating<C, K> {
        self.map_components(|p| -p)
    }
}

/// Volume form `h dx1 ^ .. ^ dxn` with `h(0) != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeDensity<C: Scalar> {
    dim: usize,
    h: Polynomial<C>,
}

impl<C: Scalar> VolumeDensity<C> {
    pub fn new(dim: usize, h: Polynomial<C>) -> Result<Self> {
        if h.num_vars() < dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.num_vars() });
        }
        if h.constant_term().is_zero() {
            return Err(Error::DegenerateVolume);
        }
        Ok(VolumeDensity { dim, h })
    }

    /// The standard volume `dx1 ^ .. ^ dxn`.
    pub fn standard(dim: usize) -> Self {
        VolumeDensity { dim, h: Polynomial::one(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self) -> &Polynomial<C> {
        &self.h
    }

    pub fn form(&self) -> DiffFormOf<C> {
        let all: Vec<usize> = (0..self.dim).collect();
        DiffFormOf::monomial(self.dim, &all, self.h.clone())
    }
}

/// Numeric component array of a multivector field at a point.
pub fn eval_multivector<C: Scalar, F: Real>(p: &MultiVectorOf<C>, point: &[F]) -> Result<Vec<F>> {
    p.eval_float(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DiffForm, MultiVector, Poly, Rational};

    pub(crate) fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn merge_signs() {
        assert_eq!(merge(&[0], &[1]), Some((vec![0, 1], false)));
        assert_eq!(merge(&[1], &[0]), Some((vec![0, 1], true)));
        assert_eq!(merge(&[1, 2], &[0]), Some((vec![0, 1, 2], false)));
        assert_eq!(merge(&[0, 2], &[1]), Some((vec![0, 1, 2], true)));
        assert_eq!(merge(&[0, 2], &[2]), None);
        assert_eq!(sort_blade(&[2, 0, 1]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_blade(&[1, 0, 2]), Some((vec![0, 1, 2], true)));
    }

    #[test]
    fn blade_enumeration() {
        assert_eq!(blades(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(blades(4, 0), vec![Vec::<usize>::new()]);
        assert!(blades(2, 3).is_empty());
    }

    #[test]
    fn wedge_basis_cases() {
        let dx1 = DiffForm::basis(3, &[0]);
        let dx2 = DiffForm::basis(3, &[1]);
        let w = dx1.wedge(&dx2).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.component(&[0, 1]), Poly::one(3));
        assert!(dx1.wedge(&dx1).unwrap().is_zero());
        assert_eq!(dx1.wedge(&DiffForm::basis(4, &[0])), Err(Error::DimensionMismatch { expected: 3, found: 4 }));
    }

    #[test]
    fn wedge_sign_against_permutation_count() {
        // (x1 dx2) ^ (dx1 ^ dx3): sorting (2, 1, 3) needs one transposition.
        let a = DiffForm::monomial(3, &[1], x(3, 0));
        let b = DiffForm::basis(3, &[0, 2]);
        let (_, odd) = sort_blade(&[1, 0, 2]).unwrap();
        assert!(odd);
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.component(&[0, 1, 2]), -x(3, 0));
    }

    #[test]
    fn monomial_sorts_and_kills_repeats() {
        let v = MultiVector::basis(3, &[2, 0]);
        assert_eq!(v.component(&[0, 2]), -Poly::one(3));
        assert!(MultiVector::basis(3, &[1, 1]).is_zero());
    }

    #[test]
    fn inhomogeneous_sum_is_rejected() {
        let a = MultiVector::basis(3, &[0]);
        let b = MultiVector::basis(3, &[0, 1]);
        assert!(matches!(a.try_add(&b), Err(Error::DegreeMismatch(_))));
        // zero of any degree is neutral
        assert_eq!(a.try_add(&MultiVector::zero(3, 2)).unwrap(), a);
    }

    #[test]
    fn evaluation_of_components() {
        let p = MultiVector::monomial(3, &[1, 2], x(3, 0));
        let vals = eval_multivector(&p, &[2.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(vals, vec![0.0, 0.0, 2.0]);
        assert!(p.eval_float(&[1.0f64, 2.0]).is_err());
        let _ = Rational::from_ratio(1, 1);
    }
}
