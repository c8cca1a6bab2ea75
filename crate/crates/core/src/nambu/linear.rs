use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::contract_volume;
use crate::{linalg, MultiVector, Poly, Rational, RationalMatrix, Scalar};

use super::signature::{hessian_at_origin, symmetric_congruence, Signature};

/// Parameters of a Type 1 linear Nambu structure of order `q` on n-space:
///
/// `sum_{i=1}^{r+1} e_i x_i d_1^..^hat(d_i)^..^d_{q+1}
///  + sum_{i=1}^{s} e_{r+1+i} x_{q+1+i} d_1^..^hat(d_{r+i})^..^d_{q+1}`
///
/// with `0 <= r <= q+1` and `0 <= s <= min(n-q-1, q+1-r)`. For `r = q+1`
/// the first sum would reach the nonexistent hat index `q+2`; it is capped
/// at `q+1` terms and the last sign is unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearType1Spec {
    pub n: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub signs: Vec<i8>,
}

impl LinearType1Spec {
    pub fn new(n: usize, q: usize, r: usize, s: usize, signs: Vec<i8>) -> Result<Self> {
        let spec = LinearType1Spec { n, q, r, s, signs };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let LinearType1Spec { n, q, r, s, .. } = *self;
        if q == 0 || q + 1 > n {
            return Err(Error::InvalidType1(format!("need 1 <= q <= n-1, got q = {q}, n = {n}")));
        }
        if r > q + 1 {
            return Err(Error::InvalidType1(format!("r = {r} exceeds q+1 = {}", q + 1)));
        }
        let s_max = (n - q - 1).min(q + 1 - r);
        if s > s_max {
            return Err(Error::InvalidType1(format!("s = {s} exceeds {s_max}")));
        }
        if self.signs.len() != r + 1 + s {
            return Err(Error::InvalidType1(format!(
                "expected {} signs, got {}",
                r + 1 + s,
                self.signs.len()
            )));
        }
        if self.signs.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidType1("signs must be +1 or -1".into()));
        }
        Ok(())
    }

    /// Every valid `(r, s)` with all sign patterns whose first sign is `+1`.
    pub fn grid(n: usize, q: usize) -> Vec<LinearType1Spec> {
        let mut out = Vec::new();
        if q == 0 || q + 1 > n {
            return out;
        }
        for r in 0..=q + 1 {
            for s in 0..=(n - q - 1).min(q + 1 - r) {
                let len = r + 1 + s;
                for mask in 0..(1u32 << (len - 1)) {
                    let signs = std::iter::once(1)
                        .chain((0..len - 1).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }))
                        .collect();
                    out.push(LinearType1Spec { n, q, r, s, signs });
                }
            }
        }
        out
    }
}

fn hatted(q: usize, skip: usize) -> Vec<usize> {
    (0..=q).filter(|&i| i != skip).collect()
}

pub fn linear_type1(spec: &LinearType1Spec) -> Result<MultiVector> {
    spec.validate()?;
    let LinearType1Spec { n, q, r, s, ref signs } = *spec;
    let sign = |e: i8| Rational::from_ratio(e as i64, 1);
    let mut out = MultiVector::zero(n, q);
    for i in 0..(r + 1).min(q + 1) {
        let term = MultiVector::monomial(n, &hatted(q, i), Poly::var(n, i).scale(&sign(signs[i])));
        out = &out + &term;
    }
    for i in 1..=s {
        let coord = q + i; // x_{q+1+i}, zero-based
        let hat = r + i - 1;
        let term = MultiVector::monomial(n, &hatted(q, hat), Poly::var(n, coord).scale(&sign(signs[r + i])));
        out = &out + &term;
    }
    Ok(out)
}

/// `d_1 ^ .. ^ d_{q-1} ^ (sum_{i,j >= q} b_i^j x_j d_i)`, `b` indexed from `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearType2Spec {
    pub n: usize,
    pub q: usize,
    pub b: RationalMatrix,
}

impl LinearType2Spec {
    pub fn new(n: usize, q: usize, b: RationalMatrix) -> Result<Self> {
        let size = n + 1 - q;
        if q == 0 || q > n || b.len() != size || b.iter().any(|row| row.len() != size) {
            return Err(Error::InvalidType2 { expected: size });
        }
        Ok(LinearType2Spec { n, q, b })
    }
}

pub fn linear_type2(spec: &LinearType2Spec) -> Result<MultiVector> {
    let LinearType2Spec { n, q, ref b } = *spec;
    let mut field = MultiVector::zero(n, 1);
    for (i, row) in b.iter().enumerate() {
        for (j, bij) in row.iter().enumerate() {
            if !bij.is_zero() {
                let term = MultiVector::monomial(n, &[q - 1 + i], Poly::var(n, q - 1 + j).scale(bij));
                field = &field + &term;
            }
        }
    }
    let base: Vec<usize> = (0..q - 1).collect();
    MultiVector::basis(n, &base).wedge(&field)
}

/// `f = 1/2 (x1^2 + .. + x_l^2 - x_{l+1}^2 - .. - x_n^2)` with `l = sig.pos`.
pub fn normal_form_quadratic(n: usize, sig: Signature) -> Result<Poly> {
    if sig.pos + sig.neg != n {
        return Err(Error::DimensionMismatch { expected: n, found: sig.pos + sig.neg });
    }
    let half = Rational::from_ratio(1, 2);
    let mut f = Poly::zero(n);
    for i in 0..n {
        let sq = Poly::var(n, i).pow(2).scale(&half);
        if i < sig.pos {
            f += &sq;
        } else {
            f -= &sq;
        }
    }
    Ok(f)
}

/// Nondegenerate Type 1 structure of order `n-1` whose dual form under the
/// standard volume is `df` for the normal-form quadratic of `sig`.
pub fn nondegenerate_type1(n: usize, sig: Signature) -> Result<MultiVector> {
    if sig.pos + sig.neg != n {
        return Err(Error::DimensionMismatch { expected: n, found: sig.pos + sig.neg });
    }
    // i_{hat i} dx1..dxn = (-1)^(n-i) dx_i (one-based i)
    let mut signs: Vec<i8> = (0..n)
        .map(|i| {
            let parity: i8 = if (n - 1 - i).is_multiple_of(2) { 1 } else { -1 };
            let square: i8 = if i < sig.pos { 1 } else { -1 };
            parity * square
        })
        .collect();
    signs.push(1);
    linear_type1(&LinearType1Spec::new(n, n - 1, n, 0, signs)?)
}

/// Coarse type of a linear coorder-1 structure.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearClass {
    /// Closed dual form `dF`; `rank` of the Hessian of `F` equals `r + 1`.
    Type1 { rank: usize, signature: Signature },
    /// Integrable but not closed dual form.
    Type2,
    /// Dual form not integrable: not a linear Nambu structure.
    NotNambu,
}

/// Type of a linear structure of order `n-1`, read off its dual form under
/// the standard volume (closedness is invariant under linear changes of
/// coordinates, which only rescale the volume).
pub fn classify_linear(pl: &MultiVector) -> Result<LinearClass> {
    let n = pl.dim();
    if pl.degree() + 1 != n {
        return Err(Error::DegreeMismatch(format!("classification needs coorder 1, got order {}", pl.degree())));
    }
    if pl.components().any(|(_, c)| !c.is_homogeneous(1)) {
        return Err(Error::DegreeMismatch("structure is not linear".into()));
    }
    let w = contract_volume(pl, &Poly::one(n))?;
    if !super::is_integrable(&w)?.holds() {
        return Ok(LinearClass::NotNambu);
    }
    if !w.d().is_zero() {
        return Ok(LinearClass::Type2);
    }
    let f = w.radial_potential()?;
    let h = hessian_at_origin(&f, n);
    let cg = symmetric_congruence(&h);
    Ok(LinearClass::Type1 { rank: linalg::rank(&h), signature: cg.signature() })
}

#[cfg(test)]
mod tests {
    use super::super::{coordinate_tuples, fundamental_identity_residual, is_nambu, NambuCandidate};
    use super::*;
    use crate::exterior::multivector_from_form;
    use crate::{DiffForm, VolumeDensity};

    fn q(a: i64) -> Rational {
        Rational::from_ratio(a, 1)
    }

    #[test]
    fn nondegenerate_matches_eq_normal_form() {
        // n = 3, l = 3: signs (+, -, +)
        let spec = LinearType1Spec::new(3, 2, 3, 0, vec![1, -1, 1, 1]).unwrap();
        let pl = linear_type1(&spec).unwrap();
        assert_eq!(pl, nondegenerate_type1(3, Signature::new(3, 0)).unwrap());
        assert_eq!(pl.component(&[1, 2]), Poly::var(3, 0));
        assert_eq!(pl.component(&[0, 2]), -Poly::var(3, 1));
        assert_eq!(pl.component(&[0, 1]), Poly::var(3, 2));
        for sig in [Signature::new(2, 1), Signature::new(1, 2), Signature::new(0, 3)] {
            let f = normal_form_quadratic(3, sig).unwrap();
            assert_eq!(nondegenerate_type1(3, sig).unwrap(), multivector_from_form(&DiffForm::exact(3, &f)));
        }
    }

    #[test]
    fn smallest_type1_is_single_term() {
        let pl = linear_type1(&LinearType1Spec::new(4, 3, 0, 0, vec![1]).unwrap()).unwrap();
        assert_eq!(pl, MultiVector::monomial(4, &[1, 2, 3], Poly::var(4, 0)));
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(LinearType1Spec::new(3, 2, 4, 0, vec![1; 5]).is_err());
        assert!(LinearType1Spec::new(5, 3, 4, 1, vec![1; 6]).is_err());
        assert!(LinearType1Spec::new(5, 3, 2, 1, vec![1; 3]).is_err());
        assert!(LinearType1Spec::new(5, 3, 2, 1, vec![1, 2, 1, 1]).is_err());
        assert!(LinearType2Spec::new(4, 3, vec![vec![q(1)]]).is_err());
    }

    #[test]
    fn mixed_sum_structure_is_nambu() {
        let spec = LinearType1Spec::new(5, 3, 2, 1, vec![1, -1, 1, 1]).unwrap();
        let pl = linear_type1(&spec).unwrap();
        // second sum: x5 e1^e2^e4 (hat index r+1 = 3)
        assert_eq!(pl.component(&[0, 1, 3]), Poly::var(5, 4) + Poly::var(5, 2));
        let c = NambuCandidate::new(pl).unwrap();
        assert!(is_nambu(&c, &VolumeDensity::standard(5)).unwrap().holds());
        for fs in coordinate_tuples(5, 3) {
            assert!(fundamental_identity_residual(&c, &fs).unwrap().is_zero());
        }
    }

    #[test]
    fn type2_examples() {
        let id = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let pl = linear_type2(&LinearType2Spec::new(4, 3, id).unwrap()).unwrap();
        let e = &MultiVector::monomial(4, &[2], Poly::var(4, 2)) + &MultiVector::monomial(4, &[3], Poly::var(4, 3));
        assert_eq!(pl, MultiVector::basis(4, &[0, 1]).wedge(&e).unwrap());

        let zero = vec![vec![q(0), q(0)], vec![q(0), q(0)]];
        assert!(linear_type2(&LinearType2Spec::new(4, 3, zero).unwrap()).unwrap().is_zero());

        let rot = vec![vec![q(0), q(1)], vec![q(-1), q(0)]];
        let pr = linear_type2(&LinearType2Spec::new(4, 3, rot).unwrap()).unwrap();
        let c = NambuCandidate::new(pr.clone()).unwrap();
        assert!(is_nambu(&c, &VolumeDensity::standard(4)).unwrap().holds());
        // a rotation gives the closed dual form d(x3^2 + x4^2)/2
        assert!(matches!(classify_linear(&pr).unwrap(), LinearClass::Type1 { rank: 2, .. }));
        assert_eq!(classify_linear(&pl).unwrap(), LinearClass::Type2);
    }

    #[test]
    fn classification_of_type1() {
        let pl = nondegenerate_type1(4, Signature::new(2, 2)).unwrap();
        assert_eq!(classify_linear(&pl).unwrap(), LinearClass::Type1 { rank: 4, signature: Signature::new(2, 2) });
        let deg = linear_type1(&LinearType1Spec::new(3, 2, 1, 0, vec![1, 1]).unwrap()).unwrap();
        assert!(matches!(classify_linear(&deg).unwrap(), LinearClass::Type1 { rank: 2, .. }));
    }

    #[test]
    fn grid_counts() {
        // (r, s) pairs: n=3,q=2: 4; n=4,q=3: 5; n=5,q=3: 9; n=5,q=4: 6
        let pairs = |n, q| {
            let mut v: Vec<(usize, usize)> = LinearType1Spec::grid(n, q).iter().map(|s| (s.r, s.s)).collect();
            v.dedup();
            v.len()
        };
        assert_eq!(pairs(3, 2), 4);
        assert_eq!(pairs(4, 3), 5);
        assert_eq!(pairs(5, 3), 9);
        assert_eq!(pairs(5, 4), 6);
    }
}
