//! Nambu structures: the duality decision procedure, Hamiltonian vector
//! fields, unimodularity, linear normal forms and signatures, and the
//! Lie–Poisson machinery for isotropy algebras.
//!
//! A q-vector field `P` on n-space is paired with a volume `mu = h dx1..dxn`
//! through `w = i_P mu`, an (n-q)-form. `P` is Nambu exactly when `w` is an
//! integrable form: `i_xi w ^ w = 0` and `i_xi w ^ dw = 0` for every
//! (n-q-1)-vector `xi`. The test is function-linear in `xi`, so constant basis
//! multivectors suffice.

mod lie;
mod linear;
mod signature;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{blades, contract_volume, Blade};
use crate::{linalg, DiffForm, MultiVector, Poly, Rational, VolumeDensity};

pub use lie::{
    classify_3d_algebra, filippov_bracket, isotropy_constants, killing_form, lie_poisson, AlgebraClass, AlgebraLabel,
    StructureConstants,
};
pub use linear::{
    classify_linear, linear_type1, linear_type2, nondegenerate_type1, normal_form_quadratic, LinearClass,
    LinearType1Spec, LinearType2Spec,
};
pub use signature::{
    hessian_at_origin, nondeg_signature, symmetric_congruence, Congruence, Signature, SignatureData,
};

/// A multivector field submitted to the Nambu checks.
#[derive(Clone, Debug, PartialEq)]
pub struct NambuCandidate {
    p: MultiVector,
}

impl NambuCandidate {
    pub fn new(p: MultiVector) -> Result<Self> {
        let (n, q) = (p.dim(), p.degree());
        if q == 0 || q >= n {
            return Err(Error::DegreeMismatch(format!("need 1 <= q <= n-1, got q = {q}, n = {n}")));
        }
        if p.num_vars() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.num_vars() });
        }
        Ok(NambuCandidate { p })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn order(&self) -> usize {
        self.p.degree()
    }

    pub fn coorder(&self) -> usize {
        self.dim() - self.order()
    }

    pub fn multivector(&self) -> &MultiVector {
        &self.p
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.p.components().all(|(_, c)| c.constant_term().is_zero())
    }
}

/// `w = i_P (h dx1 ^ .. ^ dxn)`.
pub fn dual_form(c: &NambuCandidate, mu: &VolumeDensity) -> Result<DiffForm> {
    if mu.dim() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: mu.dim() });
    }
    contract_volume(&c.p, mu.density())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `i_xi w ^ w`
    WedgeSelf,
    /// `i_xi w ^ dw`
    WedgeDifferential,
}

/// First failing instance of the integrability conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityWitness {
    pub xi: Blade,
    pub condition: Condition,
    pub form: DiffForm,
    pub component: (Blade, Poly),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(IntegrabilityWitness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&IntegrabilityWitness> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// Checks both integrability conditions over constant basis multivectors.
pub fn is_integrable(w: &DiffForm) -> Result<Verdict> {
    let (n, p) = (w.dim(), w.degree());
    if p == 0 || p > n {
        return Err(Error::DegreeMismatch(format!("integrability of a {p}-form in dimension {n}")));
    }
    let dw = w.d();
    for xi_blade in blades(n, p - 1) {
        let xi = MultiVector::basis(n, &xi_blade).extend_vars(w.num_vars() - n);
        let contracted = w.interior(&xi)?;
        let checks = [(Condition::WedgeSelf, w), (Condition::WedgeDifferential, &dw)];
        for (condition, other) in checks {
            let form = contracted.wedge(other)?;
            let first = form.components().next().map(|(b, c)| (b.clone(), c.clone()));
            if let Some(component) = first {
                return Ok(Verdict::Fails(IntegrabilityWitness { xi: xi_blade, condition, form, component }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Nambu test through the dual form. Applies for `q >= 3` or coorder 1.
pub fn is_nambu(c: &NambuCandidate, mu: &VolumeDensity) -> Result<Verdict> {
    if c.order() == 2 && c.coorder() >= 2 {
        return Err(Error::UnsupportedDegree { coorder: c.coorder() });
    }
    is_integrable(&dual_form(c, mu)?)
}

/// `[P, P]` for a bivector; zero exactly for Poisson structures.
pub fn jacobi_residual(c: &NambuCandidate) -> Result<MultiVector> {
    if c.order() != 2 {
        return Err(Error::DegreeMismatch(format!("Jacobi residual of a {}-vector", c.order())));
    }
    c.p.schouten(&c.p)
}

/// `X = P(df1, .., df_{q-1}, .)`.
pub fn hamiltonian_vf(c: &NambuCandidate, fs: &[Poly]) -> Result<MultiVector> {
    if fs.len() + 1 != c.order() {
        return Err(Error::Arity { expected: c.order() - 1, found: fs.len() });
    }
    let mut acc = c.p.clone();
    for f in fs {
        if f.num_vars() != c.dim() {
            return Err(Error::DimensionMismatch { expected: c.dim(), found: f.num_vars() });
        }
        acc = acc.contract_form(&DiffForm::exact(c.dim(), f))?;
    }
    Ok(acc)
}

/// `L_X P` for `X = X_{f1..f_{q-1}}`; vanishes for Nambu structures.
pub fn fundamental_identity_residual(c: &NambuCandidate, fs: &[Poly]) -> Result<MultiVector> {
    let x = hamiltonian_vf(c, fs)?;
    MultiVector::lie_derivative(&x, &c.p)
}

/// Every (q-1)-subset of coordinate functions, the sweep used by the checks.
pub fn coordinate_tuples(n: usize, q: usize) -> Vec<Vec<Poly>> {
    blades(n, q.saturating_sub(1)).into_iter().map(|b| b.into_iter().map(|i| Poly::var(n, i)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnimodularVerdict {
    pub unimodular: bool,
    /// `d i_P mu`, zero when unimodular.
    pub witness: DiffForm,
}

/// Whether `d i_P (h dx1..dxn) = 0` exactly.
pub fn is_unimodular(c: &NambuCandidate, h: &Poly) -> Result<UnimodularVerdict> {
    let mu = VolumeDensity::new(c.dim(), h.clone())?;
    let witness = dual_form(c, &mu)?.d();
    Ok(UnimodularVerdict { unimodular: witness.is_zero(), witness })
}

/// Searches for a density `h` of degree `<= max_degree` with `h(0) = 1` and
/// `d(h w) = 0`, where `w = i_P dx1..dxn`. Exact linear algebra over the
/// coefficients of `h`; `None` means no such polynomial volume exists.
pub fn find_unimodular_density(c: &NambuCandidate, max_degree: u32) -> Result<Option<Poly>> {
    let n = c.dim();
    let w = contract_volume(&c.p, &Poly::one(n))?;
    let monos = monomials_up_to(n, max_degree);
    let columns: Vec<DiffForm> = monos.iter().map(|m| w.scale_poly(m).d()).collect();

    // One row per (blade, monomial) coefficient appearing in any column.
    let mut keys: Vec<(Blade, crate::poly::Monomial)> = Vec::new();
    for col in &columns {
        for (b, p) in col.components() {
            for (m, _) in p.terms() {
                let key = (b.clone(), m.clone());
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
    }
    let a: Vec<Vec<Rational>> = keys
        .iter()
        .map(|(b, m)| columns.iter().skip(1).map(|col| col.component(b).coeff(m)).collect())
        .collect();
    let rhs: Vec<Rational> = keys.iter().map(|(b, m)| -columns[0].component(b).coeff(m)).collect();
    if keys.is_empty() {
        return Ok(Some(Poly::one(n)));
    }
    Ok(linalg::solve(&a, &rhs).map(|sol| {
        let mut h = Poly::one(n);
        for (m, coef) in monos.iter().skip(1).zip(sol) {
            h += &m.scale(&coef);
        }
        h
    }))
}

/// Monomials of total degree `<= d`, constant first.
fn monomials_up_to(n: usize, d: u32) -> Vec<Poly> {
    let mut out = vec![Poly::one(n)];
    let mut layer = vec![Poly::one(n)];
    for _ in 0..d {
        let mut next: Vec<Poly> = Vec::new();
        for m in &layer {
            for i in 0..n {
                let p = m * &Poly::var(n, i);
                if !next.contains(&p) {
                    next.push(p);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Degree-one truncation of a structure vanishing at the origin.
pub fn linear_part(c: &NambuCandidate) -> Result<MultiVector> {
    if !c.vanishes_at_origin() {
        return Err(Error::NonvanishingAtOrigin);
    }
    Ok(c.p.homogeneous_part(1))
}
