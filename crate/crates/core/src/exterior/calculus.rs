use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

use super::{complement, merge, DiffFormOf, MultiVectorOf};

impl<C: Scalar> DiffFormOf<C> {
    /// Exterior derivative in the first `dim` variables.
    pub fn d(&self) -> Self {
        let mut out = Self::zero_with_vars(self.dim, self.degree + 1, self.num_vars);
        if self.degree >= self.dim {
            return out;
        }
        for (blade, w) in &self.comps {
            for j in 0..self.dim {
                let dw = w.partial(j);
                if dw.is_zero() {
                    continue;
                }
                if let Some((b, odd)) = merge(&[j], blade) {
                    out.insert(b, if odd { -dw } else { dw });
                }
            }
        }
        out
    }

    /// `(i_xi w)(Y..) = w(X1, .., Xk, Y..)` for `xi = X1 ^ .. ^ Xk`.
    pub fn interior(&self, xi: &MultiVectorOf<C>) -> Result<Self> {
        if xi.dim != self.dim || xi.num_vars != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.dim, found: xi.dim });
        }
        if xi.degree > self.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot contract a {}-vector into a {}-form",
                xi.degree, self.degree
            )));
        }
        let mut out = Self::zero_with_vars(self.dim, self.degree - xi.degree, self.num_vars);
        for (j, xj) in &xi.comps {
            for (i, wi) in &self.comps {
                if !j.iter().all(|a| i.contains(a)) {
                    continue;
                }
                let rest: Vec<usize> = i.iter().copied().filter(|a| !j.contains(a)).collect();
                let (_, odd) = merge(j, &rest).expect("disjoint by construction");
                let prod = xj * wi;
                out.insert(rest, if odd { -prod } else { prod });
            }
        }
        Ok(out)
    }

    /// Radial homotopy potential of a 1-form `sum_i a_i dx_i`:
    /// `g(x) = sum_i int_0^1 x_i a_i(t x) dt`, so `g(0) = 0`.
    ///
    /// Exact on monomials: `x_i x^a` integrates to `x_i x^a / (|a| + 1)`.
    /// `dg` equals the input exactly when the input is closed.
    pub fn radial_potential(&self) -> Result<Polynomial<C>> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch(format!("potential of a {}-form", self.degree)));
        }
        let mut g = Polynomial::zero(self.num_vars);
        for (b, a) in &self.comps {
            let i = b[0];
            for (m, c) in a.terms() {
                let spatial: u32 = m.exponents()[..self.dim].iter().sum();
                let mut e = m.exponents().to_vec();
                e[i] += 1;
                let w = C::from_u32(spatial + 1).expect("degree embeds");
                g += &Polynomial::term(self.num_vars, crate::poly::Monomial::new(e), c.clone() / w);
            }
        }
        Ok(g)
    }

    /// The 1-form `dg`.
    pub fn exact(dim: usize, g: &Polynomial<C>) -> Self {
        let mut out = Self::zero_with_vars(dim, 1, g.num_vars());
        for j in 0..dim {
            out.insert(vec![j], g.partial(j));
        }
        out
    }
}

impl<C: Scalar> MultiVectorOf<C> {
    /// Left derivative with respect to the odd generator `e_i`.
    fn odd_derivative(&self, i: usize) -> Self {
        let mut out = Self::zero_with_vars(self.dim, self.degree.saturating_sub(1), self.num_vars);
        for (blade, p) in &self.comps {
            if let Some(pos) = blade.iter().position(|&a| a == i) {
                let mut rest = blade.clone();
                rest.remove(pos);
                out.insert(rest, if pos % 2 == 1 { -p.clone() } else { p.clone() });
            }
        }
        out
    }

    fn coefficient_derivative(&self, i: usize) -> Self {
        self.map_components(|p| p.partial(i))
    }

    /// Contraction of a 1-form into the first slot: `P(alpha, ..)`.
    pub fn contract_form(&self, alpha: &DiffFormOf<C>) -> Result<Self> {
        if alpha.degree != 1 {
            return Err(Error::DegreeMismatch(format!("expected a 1-form, got degree {}", alpha.degree)));
        }
        if alpha.dim != self.dim || alpha.num_vars != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.dim, found: alpha.dim });
        }
        if self.degree == 0 {
            return Err(Error::DegreeMismatch("cannot contract a 1-form into a function".into()));
        }
        let mut out = Self::zero_with_vars(self.dim, self.degree - 1, self.num_vars);
        for (b, a) in &alpha.comps {
            let part = self.odd_derivative(b[0]).scale_poly(a);
            for (blade, p) in part.comps {
                out.insert(blade, p);
            }
        }
        Ok(out)
    }

    /// Schouten–Nijenhuis bracket, normalized so that `[X, Q]` is the Lie
    /// derivative for a vector field `X` and `[P, g]` is `P(dg, ..)`.
    ///
    /// In odd-variable notation with left derivatives `d/de_i`:
    /// `[P, Q] = sum_i (-1)^((p-1)q) dP/de_i ^ dQ/dx_i - (-1)^(q-1) dQ/de_i ^ dP/dx_i`.
    /// The bracket of two functions is the zero function.
    pub fn schouten(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (p, q) = (self.degree, other.degree);
        if p + q == 0 {
            return Ok(Self::zero_with_vars(self.dim, 0, self.num_vars));
        }
        let first_odd = ((p + 1) * q) % 2 == 1; // (p-1)q with p >= 0
        let second_odd = (q + 1) % 2 == 1; // q-1
        let mut out = Self::zero_with_vars(self.dim, p + q - 1, self.num_vars);
        if p + q - 1 > self.dim {
            return Ok(out);
        }
        for i in 0..self.dim {
            if p > 0 {
                let t = self.odd_derivative(i).wedge(&other.coefficient_derivative(i))?;
                for (b, c) in t.comps {
                    out.insert(b, if first_odd { -c } else { c });
                }
            }
            if q > 0 {
                let t = other.odd_derivative(i).wedge(&self.coefficient_derivative(i))?;
                // overall minus sign on the second sum
                for (b, c) in t.comps {
                    out.insert(b, if second_odd { c } else { -c });
                }
            }
        }
        Ok(out)
    }

    /// `L_X P`, the Schouten bracket with a vector field.
    pub fn lie_derivative(x: &Self, p: &Self) -> Result<Self> {
        if x.degree != 1 {
            return Err(Error::DegreeMismatch(format!("Lie derivative along a {}-vector", x.degree)));
        }
        x.schouten(p)
    }

    /// Divergence of a vector field with respect to `dx1 ^ .. ^ dxn`.
    pub fn divergence(&self) -> Result<Polynomial<C>> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch(format!("divergence of a {}-vector", self.degree)));
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (b, p) in &self.comps {
            out += &p.partial(b[0]);
        }
        Ok(out)
    }

    /// The Euler field `sum_i x_i e_i`.
    pub fn euler(dim: usize) -> Self {
        let mut out = Self::zero(dim, 1);
        for i in 0..dim {
            out.insert(vec![i], Polynomial::var(dim, i));
        }
        out
    }
}

/// `i_P (h dx1 ^ .. ^ dxn)`.
pub fn contract_volume<C: Scalar>(p: &MultiVectorOf<C>, h: &Polynomial<C>) -> Result<DiffFormOf<C>> {
    let n = p.dim;
    let all: Vec<usize> = (0..n).collect();
    let vol = DiffFormOf::monomial(n, &all, h.clone());
    vol.interior(p)
}

/// The multivector `P` with `i_P (dx1 ^ .. ^ dxn) = w`.
pub fn multivector_from_form<C: Scalar>(w: &DiffFormOf<C>) -> MultiVectorOf<C> {
    let n = w.dim;
    let mut out = MultiVectorOf::zero_with_vars(n, n - w.degree, w.num_vars);
    for (k, c) in &w.comps {
        let j = complement(n, k);
        let (_, odd) = merge(&j, k).expect("complementary blades");
        out.insert(j, if odd { -c.clone() } else { c.clone() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{blades, Alternating, Kind};
    use super::*;
    use crate::{DiffForm, MultiVector, Poly, Rational};
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn q(a: i64) -> Rational {
        Rational::from_ratio(a, 1)
    }

    #[test]
    fn d_examples() {
        let w = DiffForm::monomial(3, &[1], x(3, 0));
        assert_eq!(w.d(), DiffForm::basis(3, &[0, 1]));
        let closed = &(&DiffForm::monomial(3, &[0], x(3, 0)) + &DiffForm::monomial(3, &[1], x(3, 1)))
            - &DiffForm::monomial(3, &[2], x(3, 2));
        assert!(closed.d().is_zero());
        assert!(DiffForm::basis(3, &[0, 1, 2]).d().is_zero());
    }

    #[test]
    fn interior_examples() {
        let mu = DiffForm::basis(3, &[0, 1, 2]);
        assert_eq!(mu.interior(&MultiVector::basis(3, &[1, 2])).unwrap(), DiffForm::basis(3, &[0]));
        let one = MultiVector::scalar(3, Poly::one(3));
        let w = DiffForm::monomial(3, &[0, 2], x(3, 1));
        assert_eq!(w.interior(&one).unwrap(), w);
        assert!(DiffForm::basis(3, &[0]).interior(&MultiVector::basis(3, &[0, 1])).is_err());
    }

    fn so3_like() -> MultiVector {
        // x1 e2^e3 + x2 e3^e1 + x3 e1^e2
        let mut p = MultiVector::monomial(3, &[1, 2], x(3, 0));
        p = &p + &MultiVector::monomial(3, &[2, 0], x(3, 1));
        &p + &MultiVector::monomial(3, &[0, 1], x(3, 2))
    }

    #[test]
    fn contraction_with_standard_volume() {
        let w = contract_volume(&so3_like(), &Poly::one(3)).unwrap();
        let expected = DiffForm::exact(3, &(&(&x(3, 0).pow(2) + &x(3, 1).pow(2)) + &x(3, 2).pow(2)).scale(&Rational::from_ratio(1, 2)));
        assert_eq!(w, expected);
        assert_eq!(multivector_from_form(&w), so3_like());
    }

    #[test]
    fn radial_potential_inverts_d_on_closed_forms() {
        let g = &(&x(3, 0).pow(3) + &(&x(3, 0) * &x(3, 1))) - &x(3, 2).pow(2);
        let w = DiffForm::exact(3, &g);
        assert_eq!(w.radial_potential().unwrap(), g);
        // non-closed input: the potential exists but d of it differs
        let bad = DiffForm::monomial(3, &[1], x(3, 0));
        let p = bad.radial_potential().unwrap();
        assert_ne!(DiffForm::exact(3, &p), bad);
    }

    #[test]
    fn schouten_anchor_cases() {
        let d1 = MultiVector::basis(3, &[0]);
        let v = MultiVector::monomial(3, &[1], x(3, 0));
        assert_eq!(d1.schouten(&v).unwrap(), MultiVector::basis(3, &[1]));

        // [P, g] = P(dg, .)
        let p = MultiVector::basis(3, &[0, 1]);
        let g = MultiVector::scalar(3, x(3, 0));
        assert_eq!(p.schouten(&g).unwrap(), MultiVector::basis(3, &[1]));
        assert_eq!(p.schouten(&g).unwrap(), p.contract_form(&DiffForm::exact(3, &x(3, 0))).unwrap());

        // L_{e1}(x1 e2^e3) = e2^e3
        let t = MultiVector::monomial(3, &[1, 2], x(3, 0));
        assert_eq!(MultiVector::lie_derivative(&d1, &t).unwrap(), MultiVector::basis(3, &[1, 2]));
        assert!(MultiVector::lie_derivative(&MultiVector::zero(3, 1), &t).unwrap().is_zero());
    }

    #[test]
    fn lie_poisson_of_a_single_bracket_satisfies_jacobi() {
        let pi = MultiVector::monomial(3, &[0, 1], x(3, 2));
        assert!(pi.schouten(&pi).unwrap().is_zero());
        // e1^e2 + x1 e3^e1: {x2,{x3,x1}} = -1 is the only nonzero Jacobi term
        let bad = &MultiVector::basis(3, &[0, 1]) + &MultiVector::monomial(3, &[2, 0], x(3, 0));
        let r = bad.schouten(&bad).unwrap();
        // twice the Jacobiator, up to the global sign of the convention
        assert_eq!(r.component(&[0, 1, 2]), Poly::constant(3, q(2)));
        // e1^e2 + x1 x3 e2^e3 is Poisson after all: every Jacobi term vanishes
        let ok = &MultiVector::basis(3, &[0, 1]) + &MultiVector::monomial(3, &[1, 2], &x(3, 0) * &x(3, 2));
        assert!(ok.schouten(&ok).unwrap().is_zero());
    }

    #[test]
    fn euler_homogeneity_on_linear_trivector_dual() {
        // L_E of linear coefficients times an (n-1)-blade scales by 1 - (n-1)
        let p = so3_like();
        let l = MultiVector::lie_derivative(&MultiVector::euler(3), &p).unwrap();
        assert_eq!(l, p.scale(&q(-1)));
    }

    // --- random generators ---------------------------------------------

    fn arb_poly(n: usize, deg: u32) -> impl Strategy<Value = Poly> {
        proptest::collection::vec((proptest::collection::vec(0..=deg, n), -3i64..=3), 0..4).prop_map(
            move |ts| Poly::from_terms(n, ts.into_iter().filter(|(e, _)| e.iter().sum::<u32>() <= deg).map(|(e, c)| (e, q(c)))),
        )
    }

    fn arb_elem<K: Kind>(n: usize, k: usize, deg: u32) -> impl Strategy<Value = Alternating<Rational, K>> {
        let bl = blades(n, k);
        let m = bl.len();
        proptest::collection::vec((0..m.max(1), arb_poly(n, deg)), 0..4).prop_map(move |cs| {
            Alternating::from_components(n, k, n, cs.into_iter().filter(|_| m > 0).map(|(i, p)| (bl[i].clone(), p)))
                .unwrap()
        })
    }

    fn arb_form(n: usize, k: usize) -> impl Strategy<Value = DiffForm> {
        arb_elem(n, k, 3)
    }

    fn arb_mv(n: usize, k: usize) -> impl Strategy<Value = MultiVector> {
        arb_elem(n, k, 2)
    }

    fn sign(odd: bool) -> Rational {
        if odd {
            q(-1)
        } else {
            q(1)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn d_squared_vanishes(w in (2usize..=5).prop_flat_map(|n| (0usize..=3.min(n)).prop_flat_map(move |k| arb_form(n, k)))) {
            prop_assert!(w.d().d().is_zero());
        }

        #[test]
        fn wedge_graded_commutative(
            (a, b) in (2usize..=4).prop_flat_map(|n| (0usize..=2, 0usize..=2).prop_flat_map(move |(i, j)| (arb_form(n, i), arb_form(n, j))))
        ) {
            let s = sign((a.degree() * b.degree()) % 2 == 1);
            prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&s));
        }

        #[test]
        fn interior_is_function_linear(
            (xi, w, g) in (2usize..=4).prop_flat_map(|n| (0usize..=2).prop_flat_map(move |k| (arb_mv(n, k), arb_form(n, (k + 1).min(n)), arb_poly(n, 2))))
        ) {
            let lhs = w.interior(&xi.scale_poly(&g)).unwrap();
            let rhs = w.interior(&xi).unwrap().scale_poly(&g);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn schouten_graded_antisymmetry(
            (p, r) in (2usize..=4).prop_flat_map(|n| (0usize..=3.min(n), 0usize..=2).prop_flat_map(move |(i, j)| (arb_mv(n, i), arb_mv(n, j))))
        ) {
            let (a, b) = (p.degree(), r.degree());
            if a + b > 0 {
                // [P,Q] = -(-1)^((p-1)(q-1)) [Q,P]
                let s = sign(((a + 1) * (b + 1)) % 2 == 0);
                prop_assert_eq!(p.schouten(&r).unwrap(), r.schouten(&p).unwrap().scale(&s));
            }
        }

        #[test]
        fn schouten_graded_leibniz(
            (p, a, b) in (2usize..=4).prop_flat_map(|n| (0usize..=2, 0usize..=2, 0usize..=1).prop_flat_map(move |(i, j, k)| (arb_mv(n, i), arb_mv(n, j), arb_mv(n, k))))
        ) {
            // [P, A^B] = (-1)^((p-1) b) [P,A]^B + A^[P,B]
            let (pd, bd) = (p.degree(), b.degree());
            if pd + a.degree() > 0 && pd + bd > 0 {
                let lhs = p.schouten(&a.wedge(&b).unwrap()).unwrap();
                let s = sign(((pd + 1) * bd) % 2 == 1);
                let t1 = p.schouten(&a).unwrap().wedge(&b).unwrap().scale(&s);
                let t2 = a.wedge(&p.schouten(&b).unwrap()).unwrap();
                prop_assert_eq!(lhs, t1.try_add(&t2).unwrap());
            }
        }

        #[test]
        fn schouten_jacobi_on_vector_fields(
            (a, b, c) in (2usize..=3).prop_flat_map(|n| (arb_mv(n, 1), arb_mv(n, 1), arb_mv(n, 1)))
        ) {
            let t1 = a.schouten(&b.schouten(&c).unwrap()).unwrap();
            let t2 = b.schouten(&c.schouten(&a).unwrap()).unwrap();
            let t3 = c.schouten(&a.schouten(&b).unwrap()).unwrap();
            prop_assert!((&(&t1 + &t2) + &t3).is_zero());
        }

        #[test]
        fn cartan_formula_matches_duality_transport(
            (xf, p) in (2usize..=4).prop_flat_map(|n| (1usize..n).prop_flat_map(move |k| (arb_mv(n, 1), arb_mv(n, k))))
        ) {
            // L_X (i_P mu) computed as d i_X + i_X d equals i_[X,P] mu + div(X) i_P mu
            let n = p.dim();
            let one = Poly::one(n);
            let w = contract_volume(&p, &one).unwrap();
            let cartan = &w.interior(&xf).unwrap().d() + &w.d().interior(&xf).unwrap();
            let bracket = contract_volume(&xf.schouten(&p).unwrap(), &one).unwrap();
            let div = w.scale_poly(&xf.divergence().unwrap());
            prop_assert_eq!(cartan, &bracket + &div);
        }
    }

    #[test]
    fn exhaustive_basis_laws_small_dims() {
        for n in 1..=4 {
            for k in 0..=n {
                for b in blades(n, k) {
                    let coeff = &x(n, 0) * &x(n, n - 1);
                    let w = DiffForm::monomial(n, &b, coeff);
                    assert!(w.d().d().is_zero());
                    for l in 0..=n - k {
                        for c in blades(n, l) {
                            let v = DiffForm::basis(n, &c);
                            let s = sign((k * l) % 2 == 1);
                            assert_eq!(w.wedge(&v).unwrap(), v.wedge(&w).unwrap().scale(&s));
                        }
                    }
                }
            }
        }
    }
}
