use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::contract_volume;
use crate::{linalg, MultiVector, Poly, Rational, RationalMatrix};

/// Sylvester signature: numbers of positive and negative squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
}

impl Signature {
    pub fn new(pos: usize, neg: usize) -> Self {
        Signature { pos, neg }
    }

    pub fn rank(&self) -> usize {
        self.pos + self.neg
    }

    /// The unordered pair `{pos, neg}` as `(min, max)`.
    pub fn unordered(&self) -> (usize, usize) {
        (self.pos.min(self.neg), self.pos.max(self.neg))
    }

    /// Equality up to swapping positive and negative squares.
    pub fn same_class(&self, other: &Signature) -> bool {
        self.unordered() == other.unordered()
    }

    pub fn swapped(&self) -> Signature {
        Signature { pos: self.neg, neg: self.pos }
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.pos, self.neg)
    }
}

impl std::str::FromStr for Signature {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `pos,neg`, got `{s}`"))?;
        let pos = a.trim().parse().map_err(|e| format!("bad signature `{s}`: {e}"))?;
        let neg = b.trim().parse().map_err(|e| format!("bad signature `{s}`: {e}"))?;
        Ok(Signature { pos, neg })
    }
}

/// `C^T H C = diag(diagonal)` with positive entries first, then negative,
/// then zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Congruence {
    pub transform: RationalMatrix,
    pub diagonal: Vec<Rational>,
}

impl Congruence {
    pub fn signature(&self) -> Signature {
        Signature {
            pos: self.diagonal.iter().filter(|d| d.is_positive()).count(),
            neg: self.diagonal.iter().filter(|d| d.is_negative()).count(),
        }
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Exact symmetric elimination (congruence diagonalization) over the rationals.
pub fn symmetric_congruence(h: &RationalMatrix) -> Congruence {
    let n = h.len();
    let mut a = h.clone();
    let mut c = linalg::identity(n);

    let swap = |a: &mut RationalMatrix, c: &mut RationalMatrix, i: usize, j: usize| {
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in c.iter_mut() {
            row.swap(i, j);
        }
    };
    // column op col_dst += f * col_src, mirrored on rows
    let combine = |a: &mut RationalMatrix, c: &mut RationalMatrix, dst: usize, src: usize, f: &Rational| {
        for row in a.iter_mut() {
            let v = &row[src] * f;
            row[dst] += v;
        }
        let src_row = a[src].clone();
        for (v, s) in a[dst].iter_mut().zip(&src_row) {
            *v += s * f;
        }
        for row in c.iter_mut() {
            let v = &row[src] * f;
            row[dst] += v;
        }
    };

    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap(&mut a, &mut c, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // a[k][k] becomes 2 a[k][j] since a[j][j] = 0
                combine(&mut a, &mut c, k, j, &Rational::from_integer(1.into()));
            } else {
                continue;
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if !a[i][k].is_zero() {
                let f = -(&a[i][k] / &pivot);
                combine(&mut a, &mut c, i, k, &f);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let rank_of = |d: &Rational| {
        if d.is_positive() {
            0
        } else if d.is_negative() {
            1
        } else {
            2
        }
    };
    order.sort_by_key(|&i| rank_of(&a[i][i]));
    let diagonal = order.iter().map(|&i| a[i][i].clone()).collect();
    let transform = c.iter().map(|row| order.iter().map(|&i| row[i].clone()).collect()).collect();
    Congruence { transform, diagonal }
}

/// Hessian of `g` at the origin, over the first `n` variables.
pub fn hessian_at_origin(g: &Poly, n: usize) -> RationalMatrix {
    (0..n)
        .map(|i| {
            let gi = g.partial(i);
            (0..n).map(|j| gi.partial(j).constant_term()).collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignatureData {
    pub signature: Signature,
    /// `C` with `C^T H C` diagonal, positive squares first.
    pub congruence: RationalMatrix,
    pub diagonal: Vec<Rational>,
    /// Quadratic `F` with `dF = i_{P_l} dx1..dxn`.
    pub quadratic: Poly,
}

/// Signature of the quadratic potential of a linear coorder-1 structure.
pub fn nondeg_signature(pl: &MultiVector) -> Result<SignatureData> {
    let n = pl.dim();
    if pl.degree() + 1 != n {
        return Err(Error::DegreeMismatch(format!("signature needs coorder 1, got order {}", pl.degree())));
    }
    if pl.components().any(|(_, c)| !c.is_homogeneous(1)) {
        return Err(Error::DegreeMismatch("structure is not linear".into()));
    }
    let w = contract_volume(pl, &Poly::one(n))?;
    if !w.d().is_zero() {
        return Err(Error::NotClosed);
    }
    let quadratic = w.radial_potential()?;
    let h = hessian_at_origin(&quadratic, n);
    let cg = symmetric_congruence(&h);
    if cg.rank() < n {
        return Err(Error::SingularHessian { rank: cg.rank(), dim: n });
    }
    Ok(SignatureData { signature: cg.signature(), congruence: cg.transform, diagonal: cg.diagonal, quadratic })
}
