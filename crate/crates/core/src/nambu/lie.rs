use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::sort_blade;
use crate::poly::Monomial;
use crate::{MultiVector, Poly, Rational, RationalMatrix, Scalar};

use super::signature::{symmetric_congruence, Signature};

/// Structure constants `[e_i, e_j] = sum_k c[k][i][j] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants { dim, c: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    /// Builds constants from the brackets `[e_i, e_j]` for `i < j`; the
    /// remaining entries follow by antisymmetry.
    pub fn from_brackets<I>(dim: usize, brackets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Vec<Rational>)>,
    {
        let mut cs = Self::zero(dim);
        for (i, j, v) in brackets {
            if i >= dim || j >= dim {
                return Err(Error::IndexOutOfRange { index: i.max(j), len: dim });
            }
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            for (k, ck) in v.into_iter().enumerate() {
                cs.set(k, i, j, ck);
            }
        }
        Ok(cs)
    }

    /// `[e,f] = h, [h,e] = 2e, [h,f] = -2f` in the basis `(e, f, h)`.
    pub fn sl2() -> Self {
        let r = |a: i64| Rational::from_ratio(a, 1);
        Self::from_brackets(
            3,
            [
                (0, 1, vec![r(0), r(0), r(1)]),
                (0, 2, vec![r(-2), r(0), r(0)]),
                (1, 2, vec![r(0), r(2), r(0)]),
            ],
        )
        .expect("valid constants")
    }

    /// `[e_i, e_j] = eps_ijk e_k`.
    pub fn so3() -> Self {
        let r = |a: i64| Rational::from_ratio(a, 1);
        Self::from_brackets(
            3,
            [
                (0, 1, vec![r(0), r(0), r(1)]),
                (0, 2, vec![r(0), r(-1), r(0)]),
                (1, 2, vec![r(1), r(0), r(0)]),
            ],
        )
        .expect("valid constants")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.c[k][i][j]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: Rational) {
        self.c[k][j][i] = -v.clone();
        self.c[k][i][j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().flatten().all(Zero::is_zero)
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.dim).map(|k| self.c[k][i][j].clone()).collect()
    }

    /// Largest Jacobiator entry in absolute value, zero for a Lie algebra.
    pub fn jacobi_defect(&self) -> Rational {
        let n = self.dim;
        let mut worst = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        // [[e_i,e_j],e_k] + cyclic, component m
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += &self.c[l][i][j] * &self.c[m][l][k];
                            s += &self.c[l][j][k] * &self.c[m][l][i];
                            s += &self.c[l][k][i] * &self.c[m][l][j];
                        }
                        if s.abs() > worst {
                            worst = s.abs();
                        }
                    }
                }
            }
        }
        worst
    }
}

/// `pi = sum_{i<j,k} c^k_ij x_k d_i ^ d_j`, so that `pi(dx_i, dx_j)` is the
/// bracket `[e_i, e_j]` read as a linear function.
pub fn lie_poisson(cs: &StructureConstants) -> Result<MultiVector> {
    if !cs.jacobi_defect().is_zero() {
        return Err(Error::JacobiFailure);
    }
    let n = cs.dim;
    let mut comps = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = Poly::from_terms(n, (0..n).map(|k| (Monomial::var(n, k).exponents().to_vec(), cs.c[k][i][j].clone())));
            comps.push((vec![i, j], p));
        }
    }
    MultiVector::from_components(n, 2, n, comps)
}

/// Linear-part coefficients of the component `args` of `p`:
/// `[dx_{a1}, .., dx_{aq}] = sum_k c_k dx_k`, with `c_k` the coefficient of
/// `x_k` in `p(dx_{a1}, .., dx_{aq})`. Antisymmetric in `args`.
pub fn filippov_bracket(p: &MultiVector, args: &[usize]) -> Result<Vec<Rational>> {
    let n = p.dim();
    if args.len() != p.degree() {
        return Err(Error::Arity { expected: p.degree(), found: args.len() });
    }
    if let Some(&a) = args.iter().find(|&&a| a >= n) {
        return Err(Error::IndexOutOfRange { index: a, len: n });
    }
    if p.components().any(|(_, c)| !c.constant_term().is_zero()) {
        return Err(Error::NonvanishingAtOrigin);
    }
    let Some((blade, odd)) = sort_blade(args) else {
        return Ok(vec![Rational::zero(); n]);
    };
    let comp = p.component(&blade);
    Ok((0..n)
        .map(|k| {
            let c = comp.coeff(&Monomial::var(p.num_vars(), k));
            if odd {
                -c
            } else {
                c
            }
        })
        .collect())
}

/// Structure constants of the isotropy algebra at the origin.
pub fn isotropy_constants(pi: &MultiVector) -> Result<StructureConstants> {
    if pi.degree() != 2 {
        return Err(Error::DegreeMismatch(format!("isotropy needs a bivector, got degree {}", pi.degree())));
    }
    let n = pi.dim();
    let mut cs = StructureConstants::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            for (k, v) in filippov_bracket(pi, &[i, j])?.into_iter().enumerate() {
                cs.set(k, i, j, v);
            }
        }
    }
    Ok(cs)
}

/// `K_ij = tr(ad_i ad_j) = sum_{m,k} c^m_ik c^k_jm`.
pub fn killing_form(cs: &StructureConstants) -> RationalMatrix {
    let n = cs.dim;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        for k in 0..n {
                            s += &cs.c[m][i][k] * &cs.c[k][j][m];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraLabel {
    Abelian,
    So3,
    Sl2,
    Other,
}

impl std::fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlgebraLabel::Abelian => "abelian",
            AlgebraLabel::So3 => "so3",
            AlgebraLabel::Sl2 => "sl2",
            AlgebraLabel::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraClass {
    pub label: AlgebraLabel,
    pub killing: RationalMatrix,
    pub killing_signature: Signature,
}

/// Label of a three-dimensional Lie algebra read off its Killing form.
pub fn classify_3d_algebra(cs: &StructureConstants) -> Result<AlgebraClass> {
    if cs.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: cs.dim });
    }
    if !cs.jacobi_defect().is_zero() {
        return Err(Error::JacobiFailure);
    }
    let killing = killing_form(cs);
    let sig = symmetric_congruence(&killing).signature();
    let label = if cs.is_zero() {
        AlgebraLabel::Abelian
    } else if sig == Signature::new(2, 1) {
        AlgebraLabel::Sl2
    } else if sig == Signature::new(0, 3) {
        AlgebraLabel::So3
    } else {
        AlgebraLabel::Other
    };
    Ok(AlgebraClass { label, killing, killing_signature: sig })
}

#[cfg(test)]
mod tests {
    use super::super::{is_unimodular, jacobi_residual, linear_part, nondeg_signature, NambuCandidate};
    use super::*;
    use crate::exterior::contract_volume;
    use crate::{linalg, DiffForm};

    fn r(a: i64) -> Rational {
        Rational::from_ratio(a, 1)
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn killing_forms_by_hand() {
        // sl2 in (e, f, h): K(e,f) = 4, K(h,h) = 8
        let k = killing_form(&StructureConstants::sl2());
        let expected = vec![vec![r(0), r(4), r(0)], vec![r(4), r(0), r(0)], vec![r(0), r(0), r(8)]];
        assert_eq!(k, expected);
        let k = killing_form(&StructureConstants::so3());
        assert_eq!(k, linalg::identity(3).into_iter().map(|row| row.into_iter().map(|v| v * r(-2)).collect()).collect::<Vec<Vec<_>>>());
    }

    #[test]
    fn classification() {
        let c = classify_3d_algebra(&StructureConstants::sl2()).unwrap();
        assert_eq!((c.label, c.killing_signature), (AlgebraLabel::Sl2, Signature::new(2, 1)));
        let c = classify_3d_algebra(&StructureConstants::so3()).unwrap();
        assert_eq!((c.label, c.killing_signature), (AlgebraLabel::So3, Signature::new(0, 3)));
        assert_eq!(classify_3d_algebra(&StructureConstants::zero(3)).unwrap().label, AlgebraLabel::Abelian);
        // Heisenberg: [e1, e2] = e3
        let heis = StructureConstants::from_brackets(3, [(0, 1, vec![r(0), r(0), r(1)])]).unwrap();
        assert_eq!(classify_3d_algebra(&heis).unwrap().label, AlgebraLabel::Other);
        assert!(classify_3d_algebra(&StructureConstants::zero(2)).is_err());
    }

    #[test]
    fn jacobi_failure_is_rejected() {
        // [e1,e2] = e1, [e2,e3] = e2, [e1,e3] = e3 breaks Jacobi
        let bad = StructureConstants::from_brackets(
            3,
            [(0, 1, vec![r(1), r(0), r(0)]), (1, 2, vec![r(0), r(1), r(0)]), (0, 2, vec![r(0), r(0), r(1)])],
        )
        .unwrap();
        assert!(!bad.jacobi_defect().is_zero());
        assert_eq!(lie_poisson(&bad), Err(Error::JacobiFailure));
        assert_eq!(classify_3d_algebra(&bad).unwrap_err(), Error::JacobiFailure);
    }

    #[test]
    fn lie_poisson_examples() {
        assert!(lie_poisson(&StructureConstants::zero(3)).unwrap().is_zero());
        let so3 = lie_poisson(&StructureConstants::so3()).unwrap();
        let expected = &(&MultiVector::monomial(3, &[0, 1], x(2)) + &MultiVector::monomial(3, &[1, 2], x(0)))
            + &MultiVector::monomial(3, &[2, 0], x(1));
        assert_eq!(so3, expected);
        let w = contract_volume(&so3, &Poly::one(3)).unwrap();
        let f = (&(&x(0).pow(2) + &x(1).pow(2)) + &x(2).pow(2)).scale(&Rational::from_ratio(1, 2));
        assert_eq!(w, DiffForm::exact(3, &f));
        assert_eq!(nondeg_signature(&so3).unwrap().signature, Signature::new(3, 0));

        let sl2 = lie_poisson(&StructureConstants::sl2()).unwrap();
        let c = NambuCandidate::new(sl2.clone()).unwrap();
        assert!(jacobi_residual(&c).unwrap().is_zero());
        assert!(is_unimodular(&c, &Poly::one(3)).unwrap().unimodular);
        assert!(nondeg_signature(&sl2).unwrap().signature.same_class(&Signature::new(2, 1)));
    }

    #[test]
    fn isotropy_round_trips() {
        for cs in [StructureConstants::sl2(), StructureConstants::so3(), StructureConstants::zero(3)] {
            let pi = lie_poisson(&cs).unwrap();
            assert_eq!(isotropy_constants(&pi).unwrap(), cs);
            // quadratic perturbation
            let pert = &pi + &MultiVector::monomial(3, &[1, 2], &x(0).pow(2) + &(&x(1) * &x(2)));
            assert_eq!(isotropy_constants(&pert).unwrap(), cs);
        }
        let off = &lie_poisson(&StructureConstants::sl2()).unwrap() + &MultiVector::basis(3, &[0, 1]);
        assert_eq!(isotropy_constants(&off), Err(Error::NonvanishingAtOrigin));
    }

    #[test]
    fn weinstein_type_structure_has_sl2_isotropy() {
        // pi_sl2 scaled by a Casimir-type factor 1 + C, C the Casimir h^2/4 + ef
        let sl2 = lie_poisson(&StructureConstants::sl2()).unwrap();
        let casimir = &x(2).pow(2).scale(&Rational::from_ratio(1, 4)) + &(&x(0) * &x(1));
        let pi = sl2.scale_poly(&(&Poly::one(3) + &casimir));
        let c = NambuCandidate::new(pi.clone()).unwrap();
        assert!(jacobi_residual(&c).unwrap().is_zero());
        let cs = isotropy_constants(&pi).unwrap();
        assert_eq!(classify_3d_algebra(&cs).unwrap().label, AlgebraLabel::Sl2);
    }

    #[test]
    fn filippov_bracket_matches_linear_part() {
        let sig = Signature::new(2, 2);
        let pl = super::super::nondegenerate_type1(4, sig).unwrap();
        let f = super::super::normal_form_quadratic(4, sig).unwrap();
        let scale = &Poly::one(4) + &f;
        let pi = pl.scale_poly(&scale);
        let lin = linear_part(&NambuCandidate::new(pi.clone()).unwrap()).unwrap();
        assert_eq!(lin, pl);
        for args in [[0, 1, 2], [2, 1, 0], [1, 3, 2], [0, 0, 1]] {
            assert_eq!(filippov_bracket(&pi, &args).unwrap(), filippov_bracket(&lin, &args).unwrap());
        }
        // antisymmetry
        let a = filippov_bracket(&pl, &[0, 1, 3]).unwrap();
        let b = filippov_bracket(&pl, &[1, 0, 3]).unwrap();
        assert_eq!(a, b.into_iter().map(|v| -v).collect::<Vec<_>>());
        assert!(filippov_bracket(&pl, &[0, 1]).is_err());
    }
}
