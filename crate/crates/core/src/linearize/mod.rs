//! Linearization of coorder-1 Nambu structures with a nondegenerate Type 1
//! linear part.
//!
//! The pipeline recovers the potential `g` of the closed dual form, reads off
//! the Hessian signature, and then, given the normal-form factor `k` with
//! `P = k(f) P_l`, solves the Moser equation `L_{r E} P_t + d/dt P_t = 0` for
//! `P_t = (1 + t(k(f) - 1)) P_l` symbolically. The radial flow of `r_t(f) E`
//! is integrated numerically and the pullback identity `Phi_1^* P = P_l` is
//! checked pointwise.

mod flow;
mod report;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exterior::contract_volume;
use crate::nambu::{
    is_unimodular, nondegenerate_type1, normal_form_quadratic, symmetric_congruence, hessian_at_origin,
    NambuCandidate, Signature,
};
use crate::poly::Monomial;
use crate::{DiffForm, MultiVector, Poly, Rational, RationalFunc, RationalMatrix, Scalar};

pub use flow::{
    full_flow, pullback_at, quadratic_value, sample_points, scalar_flow, FlowSample, Linearizer, MoserField,
    ScalarFlow,
};
pub use report::{linearize_report, normal_form_candidate, LinearizeOptions, LinearizeReport, LinearizeVerdict, Stage, StageStatus, Witness};

/// Potential of the dual form `i_P (h dx1..dxn) = dg` with `g(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialData {
    pub g: Poly,
    pub h: Poly,
    pub signature: Signature,
    /// `C` with `C^T Hess(g)(0) C` diagonal, positive squares first.
    pub congruence: RationalMatrix,
    pub diagonal: Vec<Rational>,
}

pub fn potential_from(c: &NambuCandidate, h: &Poly) -> Result<PotentialData> {
    let n = c.dim();
    if c.coorder() != 1 {
        return Err(Error::DegreeMismatch(format!("potential needs coorder 1, got {}", c.coorder())));
    }
    if !c.vanishes_at_origin() {
        return Err(Error::NonvanishingAtOrigin);
    }
    if !is_unimodular(c, h)?.unimodular {
        return Err(Error::NotClosed);
    }
    let w = contract_volume(c.multivector(), h)?;
    let g = w.radial_potential()?;
    if DiffForm::exact(n, &g) != w {
        return Err(Error::NotClosed);
    }
    let cg = symmetric_congruence(&hessian_at_origin(&g, n));
    if cg.rank() < n {
        return Err(Error::SingularHessian { rank: cg.rank(), dim: n });
    }
    Ok(PotentialData { g, h: h.clone(), signature: cg.signature(), congruence: cg.transform, diagonal: cg.diagonal })
}

/// Normal-form data `(n, signature, k)` with `P = k(f) P_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoserSpec {
    n: usize,
    signature: Signature,
    k: Poly,
}

impl MoserSpec {
    pub fn new(n: usize, signature: Signature, k: Poly) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidMoserSpec(format!("dimension {n} < 3")));
        }
        if signature.rank() != n {
            return Err(Error::InvalidMoserSpec(format!("signature {signature} does not fill dimension {n}")));
        }
        if k.num_vars() != 1 {
            return Err(Error::InvalidMoserSpec("k must be univariate".into()));
        }
        if k.constant_term() != Rational::from_ratio(1, 1) {
            return Err(Error::InvalidMoserSpec(format!("k(0) must be 1, got {}", k.constant_term())));
        }
        Ok(MoserSpec { n, signature, k })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn k(&self) -> &Poly {
        &self.k
    }

    /// `f` of the normal form, in `n` variables.
    pub fn quadratic(&self) -> Poly {
        normal_form_quadratic(self.n, self.signature).expect("validated signature")
    }

    pub fn linear_structure(&self) -> MultiVector {
        nondegenerate_type1(self.n, self.signature).expect("validated signature")
    }

    /// `k(f) P_l`.
    pub fn structure(&self) -> MultiVector {
        let kf = Poly::compose(&self.k, &self.quadratic()).expect("univariate k");
        self.linear_structure().scale_poly(&kf)
    }

    /// `P_t = (1 + t(k(f) - 1)) P_l` over `(x1, .., xn, t)`.
    pub fn family(&self) -> MultiVector {
        let n = self.n;
        let f = self.quadratic().extend_vars(1);
        let t = Poly::var(n + 1, n);
        let kf = Poly::compose(&self.k, &f).expect("univariate k");
        let phi = &Poly::one(n + 1) + &(&t * &(&kf - &Poly::one(n + 1)));
        self.linear_structure().extend_vars(1).scale_poly(&phi)
    }
}

/// Moser coefficient `r(f, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoserCoefficient {
    pub r: RationalFunc,
}

fn ft_vars() -> Vec<String> {
    vec!["f".into(), "t".into()]
}

/// `p / base` when `p` is a polynomial multiple of `base`, whose nonzero
/// components are single terms.
pub(crate) fn proportional_factor(p: &MultiVector, base: &MultiVector) -> Result<Poly> {
    let mut factor: Option<Poly> = None;
    for (b, bc) in base.components() {
        let (m, c) = bc.as_term().ok_or(Error::NotProportional)?;
        let q = p.component(b).div_by_term(m, c).ok_or(Error::NotProportional)?;
        match &factor {
            None => factor = Some(q),
            Some(f) if *f == q => {}
            Some(_) => return Err(Error::NotProportional),
        }
    }
    let factor = factor.ok_or(Error::NotProportional)?;
    if base.scale_poly(&factor) != *p {
        return Err(Error::NotProportional);
    }
    Ok(factor)
}

/// Rewrites `a(x, t)` as `a~(f(x), t)` by restriction to the `x1` axis,
/// then checks the rewrite exactly.
fn as_function_of_f(a: &Poly, spec: &MoserSpec) -> Result<Poly> {
    let n = spec.n;
    // f(s, 0, .., 0) = +-s^2 / 2, so s^(2j) = (+-2 f)^j
    let s2 = if spec.signature.pos > 0 { Rational::from_ratio(2, 1) } else { Rational::from_ratio(-2, 1) };
    let mut terms = Vec::new();
    for (m, c) in a.terms() {
        let e = m.exponents();
        if e[1..n].iter().any(|&v| v > 0) {
            continue;
        }
        if e[0] % 2 == 1 {
            return Err(Error::NotProportional);
        }
        let j = e[0] / 2;
        let coeff = c * num_traits::pow(s2.clone(), j as usize);
        terms.push((vec![j, e[n]], coeff));
    }
    let out = Poly::from_terms(2, terms);
    let f = spec.quadratic().extend_vars(1);
    let t = Poly::var(n + 1, n);
    if out.substitute(&[f, t])? != *a {
        return Err(Error::NotProportional);
    }
    Ok(out)
}

/// Solves the Moser equation for `r`.
///
/// Along the family, `L_E P_t = a P_l`, `d/dt P_t = b P_l`, and
/// `i_{df} P_t = 0`, so the `dr` term of `L_{rE}` drops and `r = -b/a`.
pub fn derive_rt(spec: &MoserSpec) -> Result<MoserCoefficient> {
    let n = spec.n;
    let pl = spec.linear_structure().extend_vars(1);
    let pt = spec.family();
    let f = spec.quadratic().extend_vars(1);
    if !pt.contract_form(&DiffForm::exact(n, &f))?.is_zero() {
        return Err(Error::NotProportional);
    }
    let e = MultiVector::euler(n).extend_vars(1);
    let a = proportional_factor(&MultiVector::lie_derivative(&e, &pt)?, &pl)?;
    let b = proportional_factor(&pt.map_components(|p| p.partial(n)), &pl)?;
    let (a, b) = (as_function_of_f(&a, spec)?, as_function_of_f(&b, spec)?);
    let (mut num, mut den) = (-b, a);
    if den.constant_term().is_negative() {
        num = -num;
        den = -den;
    }
    debug_assert_eq!(den.constant_term(), Rational::from_ratio(n as i64 - 2, 1));
    Ok(MoserCoefficient { r: RationalFunc::new(ft_vars(), num, den)? })
}

/// `(k - 1) / ((n-2)(1 + t(1 - k)) - 2 t f k')`: the coefficient with the
/// sign of `k - 1` inside the first denominator term reversed.
pub fn flipped_rt(spec: &MoserSpec) -> Result<RationalFunc> {
    let n = spec.n;
    let (u, t) = (Poly::var(2, 0), Poly::var(2, 1));
    let one = Poly::one(2);
    let ku = Poly::compose(&spec.k, &u)?;
    let dku = Poly::compose(&spec.k.diff(0)?, &u)?;
    let nm2 = Rational::from_ratio(n as i64 - 2, 1);
    let den = &(&one + &(&t * &(&one - &ku))).scale(&nm2)
        - &(&(&t * &u) * &dku).scale(&Rational::from_ratio(2, 1));
    RationalFunc::new(ft_vars(), &ku - &one, den)
}

/// `r = N/D` pulled back to `(x, t)`.
fn rt_in_xt(spec: &MoserSpec, r: &RationalFunc) -> Result<(Poly, Poly)> {
    if r.num().num_vars() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: r.num().num_vars() });
    }
    let n = spec.n;
    let images = [spec.quadratic().extend_vars(1), Poly::var(n + 1, n)];
    Ok((r.num().substitute(&images)?, r.den().substitute(&images)?))
}

/// `D^2 (L_{rE} P_t + d/dt P_t)` as a multiple of `P_l`, over `(x, t)`,
/// using `L_{aX} P = a L_X P - X ^ i_{da} P`.
pub fn moser_residual(spec: &MoserSpec, r: &RationalFunc) -> Result<Poly> {
    let n = spec.n;
    let (num, den) = rt_in_xt(spec, r)?;
    if den.eval(&vec![Rational::zero(); n + 1])?.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let pl = spec.linear_structure().extend_vars(1);
    let pt = spec.family();
    let e = MultiVector::euler(n).extend_vars(1);
    let lie = MultiVector::lie_derivative(&e, &pt)?.scale_poly(&(&den * &num));
    let dq = &DiffForm::exact(n, &num).scale_poly(&den) - &DiffForm::exact(n, &den).scale_poly(&num);
    let transport = e.wedge(&pt.contract_form(&dq)?)?;
    let dt = pt.map_components(|p| p.partial(n)).scale_poly(&(&den * &den));
    let total = &(&lie - &transport) + &dt;
    proportional_factor(&total, &pl)
}

/// Outcome of the symbolic Moser check for both coefficient variants.
#[derive(Clone, Debug, PartialEq)]
pub struct RtFinding {
    pub derived: MoserCoefficient,
    pub derived_residual: Poly,
    pub flipped: RationalFunc,
    pub flipped_residual: Poly,
}

impl RtFinding {
    pub fn derived_solves(&self) -> bool {
        self.derived_residual.is_zero()
    }

    pub fn flipped_solves(&self) -> bool {
        self.flipped_residual.is_zero()
    }
}

pub fn verify_rt(spec: &MoserSpec) -> Result<RtFinding> {
    let derived = derive_rt(spec)?;
    let derived_residual = moser_residual(spec, &derived.r)?;
    let flipped = flipped_rt(spec)?;
    let flipped_residual = moser_residual(spec, &flipped)?;
    Ok(RtFinding { derived, derived_residual, flipped, flipped_residual })
}

/// Reads `k` off a potential of the form `g = K(q)` with `K' = k` and `q` the
/// quadratic part of `g`; `None` when `g` is not a polynomial in `q`.
pub fn factor_of_potential(g: &Poly) -> Option<Poly> {
    let q = g.homogeneous_part(2);
    let m = q.terms().next_back()?.0.clone();
    if !g.homogeneous_part(0).is_zero() || !g.homogeneous_part(1).is_zero() {
        return None;
    }
    let mut coeffs = vec![(0, Rational::from_ratio(1, 1))];
    for d in 3..=g.degree()? {
        let part = g.homogeneous_part(d);
        if d % 2 == 1 {
            if !part.is_zero() {
                return None;
            }
            continue;
        }
        let j = d / 2;
        let qj = q.pow(j);
        let mj = Monomial::new(m.exponents().iter().map(|e| e * j).collect());
        let a = part.coeff(&mj) / qj.coeff(&mj);
        if part != qj.scale(&a) {
            return None;
        }
        // K = sum a_j s^j and k = K'
        coeffs.push((j - 1, a * Rational::from_ratio(j as i64, 1)));
    }
    Some(univariate(&coeffs))
}

/// Univariate polynomial from `(exponent, coefficient)` pairs.
pub fn univariate(coeffs: &[(u32, Rational)]) -> Poly {
    Poly::from_terms(1, coeffs.iter().map(|(e, c)| (vec![*e], c.clone())))
}
