//! Flow of the non-unimodular coorder-1 structure dual to
//! `a = df + g(f)/rho^2 (x2 dx1 - x1 dx2)`, `f = (x1^2 + x2^2 - x3^2 - .. - xn^2)/2`,
//! where `g` vanishes for `x <= 0` and is positive for `x > 0`.
//!
//! The Hamiltonian field `X = P(dx3, .., dxn, .)` satisfies `X.f = -g(f)` and
//! turns at unit rate in the `(x1, x2)` plane, so orbits with `f > 0` spiral
//! toward the cone `f = 0` while the linear model (`g = 0`) only rotates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{eval_multivector, multivector_from_form};
use crate::nambu::{hamiltonian_vf, normal_form_quadratic, NambuCandidate, Signature};
use crate::ode::{integrate, Control, OdeOptions};
use crate::poly::FloatPoly;
use crate::scalar::Real;
use crate::{DiffForm, MultiVector, Poly};

/// Flat-at-zero bump `g`.
#[derive(Clone, Copy, Debug)]
pub enum Bump {
    /// `exp(-scale / x)` for `x > 0`.
    Exp { scale: f64 },
    /// `x^p` for `x > 0`.
    Power(u32),
    /// Any `g` with `g(x) = 0` for `x <= 0` and `g(x) > 0` otherwise.
    Custom(fn(f64) -> f64),
}

impl Default for Bump {
    fn default() -> Self {
        Bump::Exp { scale: 1.0 }
    }
}

impl Bump {
    pub fn eval<F: Real>(&self, x: F) -> F {
        match *self {
            _ if !matches!(self, Bump::Custom(_)) && !(x > F::zero()) => F::zero(),
            Bump::Exp { scale } => (-F::lit(scale) / x).exp(),
            Bump::Power(p) => x.powi(p as i32),
            // taken as given, including its values for x <= 0
            Bump::Custom(g) => F::lit(g(x.to_f64().unwrap_or(f64::NAN))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CounterexampleSpec {
    pub n: usize,
    pub bump: Bump,
    /// Flips the overall sign of the field, so that the angle increases.
    pub reversed: bool,
}

impl CounterexampleSpec {
    pub fn new(n: usize, bump: Bump, reversed: bool) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: n });
        }
        Ok(CounterexampleSpec { n, bump, reversed })
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, Bump::default(), false)
    }

    pub fn quadratic(&self) -> Poly {
        normal_form_quadratic(self.n, Signature::new(2, self.n - 2)).expect("n >= 3")
    }
}

/// Symbolic parts of `X = X_f + (g(f)/rho^2) X_b`, oriented so that the
/// polar angle in the `(x1, x2)` plane decreases.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldParts {
    /// Hamiltonian field of the structure dual to `df`.
    pub exact: MultiVector,
    /// Hamiltonian field of the structure dual to `x2 dx1 - x1 dx2`.
    pub twist: MultiVector,
}

/// Derives both parts through `P(dx3, .., dxn, .)` with `i_P dx1..dxn = w`.
pub fn field_parts(n: usize) -> Result<FieldParts> {
    let f = normal_form_quadratic(n, Signature::new(2, n - 2))?;
    let beta = &DiffForm::monomial(n, &[0], Poly::var(n, 1)) - &DiffForm::monomial(n, &[1], Poly::var(n, 0));
    let hams: Vec<Poly> = (2..n).map(|i| Poly::var(n, i)).collect();
    let ham = |w: &DiffForm| -> Result<MultiVector> {
        hamiltonian_vf(&NambuCandidate::new(multivector_from_form(w))?, &hams)
    };
    let (mut exact, mut twist) = (ham(&DiffForm::exact(n, &f))?, ham(&beta)?);
    // angle rate of the rotation part: x1 X^2 - x2 X^1 = -rho^2 is the orientation we keep
    let rate = &(&Poly::var(n, 0) * &exact.component(&[1])) - &(&Poly::var(n, 1) * &exact.component(&[0]));
    let rho2 = &Poly::var(n, 0).pow(2) + &Poly::var(n, 1).pow(2);
    if rate == rho2 {
        exact = -&exact;
        twist = -&twist;
    }
    Ok(FieldParts { exact, twist })
}

/// Evaluator for the counterexample field.
#[derive(Clone, Debug)]
pub struct CounterexampleField<F> {
    spec: CounterexampleSpec,
    exact: Vec<FloatPoly<F>>,
    twist: Vec<FloatPoly<F>>,
    linear_only: bool,
}

impl<F: Real> CounterexampleField<F> {
    pub fn new(spec: &CounterexampleSpec) -> Result<Self> {
        let parts = field_parts(spec.n)?;
        let comps = |m: &MultiVector| (0..spec.n).map(|i| FloatPoly::new(&m.component(&[i]))).collect();
        Ok(CounterexampleField {
            spec: spec.clone(),
            exact: comps(&parts.exact),
            twist: comps(&parts.twist),
            linear_only: false,
        })
    }

    /// The field of the linear model, `g = 0`.
    pub fn linear_model(n: usize) -> Result<Self> {
        let mut field = Self::new(&CounterexampleSpec::standard(n)?)?;
        field.linear_only = true;
        Ok(field)
    }

    pub fn dim(&self) -> usize {
        self.spec.n
    }

    pub fn f(&self, x: &[F]) -> F {
        f_value(x)
    }

    pub fn eval_into(&self, x: &[F], out: &mut [F]) -> Result<()> {
        let n = self.spec.n;
        if x.len() != n || out.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let g = if self.linear_only { F::zero() } else { self.spec.bump.eval(f_value(x)) };
        let rho2 = x[0] * x[0] + x[1] * x[1];
        let factor = if g == F::zero() {
            F::zero()
        } else if rho2 == F::zero() {
            return Err(Error::SingularAxis);
        } else {
            g / rho2
        };
        let sign = if self.spec.reversed { -F::one() } else { F::one() };
        for i in 0..n {
            out[i] = sign * (self.exact[i].eval(x) + factor * self.twist[i].eval(x));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[F]) -> Result<Vec<F>> {
        let mut out = vec![F::zero(); self.spec.n];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }
}

fn f_value<F: Real>(x: &[F]) -> F {
    crate::linearize::quadratic_value(2, x)
}

/// `X(x)` for the counterexample.
pub fn counterexample_field<F: Real>(spec: &CounterexampleSpec, x: &[F]) -> Result<Vec<F>> {
    CounterexampleField::new(spec)?.eval(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord<F> {
    pub times: Vec<F>,
    pub points: Vec<Vec<F>>,
    pub f_values: Vec<F>,
    /// Unwrapped polar angle in the `(x1, x2)` plane.
    pub theta: Vec<F>,
}

impl<F> Default for TrajectoryRecord<F> {
    fn default() -> Self {
        TrajectoryRecord { times: Vec::new(), points: Vec::new(), f_values: Vec::new(), theta: Vec::new() }
    }
}

impl<F: Real> TrajectoryRecord<F> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: F, x: &[F]) {
        let raw = x[1].atan2(x[0]);
        let theta = match self.theta.last() {
            None => raw,
            Some(&prev) => {
                let two_pi = F::lit(std::f64::consts::TAU);
                prev + (raw - prev - two_pi * ((raw - prev) / two_pi).round())
            }
        };
        self.times.push(t);
        self.points.push(x.to_vec());
        self.f_values.push(f_value(x));
        self.theta.push(theta);
    }
}

/// Largest step allowed, so the angle moves less than `pi` per step.
const MAX_STEP: f64 = 0.25;

fn run<F: Real>(field: &CounterexampleField<F>, x0: &[F], duration: F, tol: F) -> Result<TrajectoryRecord<F>> {
    if x0.len() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: x0.len() });
    }
    if x0[0] == F::zero() && x0[1] == F::zero() && field.eval(x0)?.iter().all(|v| *v == F::zero()) {
        // a point of the x3.. axis where the field vanishes is stationary
        let mut rec = TrajectoryRecord::default();
        rec.push(F::zero(), x0);
        rec.push(duration, x0);
        return Ok(rec);
    }
    let mut rec = TrajectoryRecord::default();
    let opts = OdeOptions { h_max: Some(F::lit(MAX_STEP)), ..OdeOptions::with_tol(tol) };
    integrate(
        |_, x: &[F], dx: &mut [F]| field.eval_into(x, dx),
        F::zero(),
        x0,
        duration,
        &opts,
        |t, x| {
            rec.push(t, x);
            Control::Continue
        },
    )?;
    Ok(rec)
}

pub fn integrate_trajectory<F: Real>(spec: &CounterexampleSpec, x0: &[F], duration: F, tol: F) -> Result<TrajectoryRecord<F>> {
    run(&CounterexampleField::new(spec)?, x0, duration, tol)
}

/// Orbit of the linear model, whose field preserves `f`.
pub fn linear_model_orbit<F: Real>(x0: &[F], duration: F, tol: F) -> Result<TrajectoryRecord<F>> {
    run(&CounterexampleField::linear_model(x0.len())?, x0, duration, tol)
}

/// Integrates the comparison equation `f' = -g(f)` (`+g(f)` when reversed)
/// and samples it at `times`.
pub fn comparison_f<F: Real>(bump: &Bump, reversed: bool, f0: F, times: &[F], tol: F) -> Result<Vec<F>> {
    let opts = OdeOptions::with_tol(tol);
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut f) = (times.first().copied().unwrap_or(F::zero()), f0);
    for &ti in times {
        if ti > t {
            let sol = integrate(
                |_, y: &[F], dy: &mut [F]| {
                    let g = bump.eval(y[0]);
                    dy[0] = if reversed { g } else { -g };
                    Ok(())
                },
                t,
                &[f],
                ti,
                &opts,
                |_, _| Control::Continue,
            )?;
            f = sol.y[0];
            t = ti;
        }
        out.push(f);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SpiralMetrics {
    /// Least-squares slope of `theta(t)`.
    pub theta_rate: f64,
    pub f_monotone: bool,
    pub f_strictly_decreasing: bool,
    /// Max deviation from the comparison solution of `f' = -+g(f)`.
    pub f_ode_residual: f64,
    pub theta_excursion: f64,
    /// `f(0) - f(T)`.
    pub f_drop: f64,
    pub f_min: f64,
    /// Largest change of `x3, .., xn` along the orbit.
    pub coordinate_drift: f64,
}

/// Summary statistics of a trajectory; an empty record gives all zeros.
pub fn spiral_metrics<F: Real>(spec: &CounterexampleSpec, tr: &TrajectoryRecord<F>, tol: F) -> Result<SpiralMetrics> {
    if tr.is_empty() {
        return Ok(SpiralMetrics::default());
    }
    let to = |v: F| v.to_f64().unwrap_or(f64::NAN);
    let t: Vec<f64> = tr.times.iter().map(|&v| to(v)).collect();
    let th: Vec<f64> = tr.theta.iter().map(|&v| to(v)).collect();
    let f: Vec<f64> = tr.f_values.iter().map(|&v| to(v)).collect();
    let m = t.len() as f64;
    let (tm, thm) = (t.iter().sum::<f64>() / m, th.iter().sum::<f64>() / m);
    let sxx: f64 = t.iter().map(|v| (v - tm).powi(2)).sum();
    let sxy: f64 = t.iter().zip(&th).map(|(a, b)| (a - tm) * (b - thm)).sum();
    let theta_rate = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let reference = comparison_f(&spec.bump, spec.reversed, tr.f_values[0], &tr.times, tol)?;
    let f_ode_residual = tr.f_values.iter().zip(&reference).fold(0.0_f64, |acc, (a, b)| acc.max(to(*a - *b).abs()));
    let x0 = &tr.points[0];
    let coordinate_drift = tr
        .points
        .iter()
        .flat_map(|p| p.iter().zip(x0).skip(2).map(|(a, b)| to(*a - *b).abs()))
        .fold(0.0_f64, f64::max);
    Ok(SpiralMetrics {
        theta_rate,
        f_monotone: f.windows(2).all(|w| w[1] <= w[0]),
        f_strictly_decreasing: f.windows(2).all(|w| w[1] < w[0]),
        f_ode_residual,
        theta_excursion: (th[th.len() - 1] - th[0]).abs(),
        f_drop: f[0] - f[f.len() - 1],
        f_min: f.iter().copied().fold(f64::INFINITY, f64::min),
        coordinate_drift,
    })
}

/// Evaluates the symbolic part of the field at a point, for display.
pub fn field_parts_at(n: usize, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let parts = field_parts(n)?;
    Ok((eval_multivector(&parts.exact, x)?, eval_multivector(&parts.twist, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Scalar};
    use std::f64::consts::{PI, TAU};

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn derived_field_has_the_expected_form() {
        for n in 3..=5 {
            let parts = field_parts(n).unwrap();
            let rot = &MultiVector::monomial(n, &[0], x(n, 1)) - &MultiVector::monomial(n, &[1], x(n, 0));
            let radial = &MultiVector::monomial(n, &[0], x(n, 0)) + &MultiVector::monomial(n, &[1], x(n, 1));
            assert_eq!(parts.exact, rot);
            assert_eq!(parts.twist, -&radial);
        }
    }

    #[test]
    fn contraction_identities() {
        // X_f . f = 0 and X_b . f = -rho^2, so X . f = -g(f)
        let n = 4;
        let parts = field_parts(n).unwrap();
        let df = DiffForm::exact(n, &normal_form_quadratic(n, Signature::new(2, 2)).unwrap());
        assert!(df.interior(&parts.exact).unwrap().is_zero());
        let rho2 = &x(n, 0).pow(2) + &x(n, 1).pow(2);
        assert_eq!(df.interior(&parts.twist).unwrap().component(&[]), -&rho2);
        // the angle form (x1 dx2 - x2 dx1) / rho^2 gives -1 on X_f and 0 on X_b
        let ang = &DiffForm::monomial(n, &[1], x(n, 0)) - &DiffForm::monomial(n, &[0], x(n, 1));
        assert_eq!(ang.interior(&parts.exact).unwrap().component(&[]), -&rho2);
        assert!(ang.interior(&parts.twist).unwrap().is_zero());
        // the field annihilates the dual form up to the factor: i_X a = 0 for a = df + G b
        let beta = &DiffForm::monomial(n, &[0], x(n, 1)) - &DiffForm::monomial(n, &[1], x(n, 0));
        let g = Poly::constant(n, Rational::from_ratio(3, 7));
        let alpha = &df.scale_poly(&rho2) + &beta.scale_poly(&g);
        let xfield = &parts.exact.scale_poly(&rho2) + &parts.twist.scale_poly(&g);
        assert!(alpha.interior(&xfield).unwrap().is_zero());
    }

    #[test]
    fn pointwise_examples() {
        let spec = CounterexampleSpec::standard(3).unwrap();
        assert_eq!(counterexample_field(&spec, &[1.0, 0.0, 1.0]).unwrap(), vec![0.0, -1.0, 0.0]);
        let v = counterexample_field(&spec, &[1.0, 0.0, 0.0]).unwrap();
        let g = (-2.0_f64).exp();
        assert!((v[0] + g).abs() < 1e-15 && (v[1] + 1.0).abs() < 1e-15 && v[2] == 0.0);
        // X . f = -g(f) with the bump
        let p = [0.3_f64, -0.8, 0.2];
        let v = counterexample_field(&spec, &p).unwrap();
        let df = p[0] * v[0] + p[1] * v[1] - p[2] * v[2];
        assert!((df + spec.bump.eval(f_value(&p))).abs() < 1e-15);
        let rev = CounterexampleSpec::new(3, Bump::default(), true).unwrap();
        assert_eq!(counterexample_field(&rev, &[1.0, 0.0, 1.0]).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn axis_is_singular_only_where_the_bump_is_positive() {
        let spec = CounterexampleSpec::standard(3).unwrap();
        // f = 1/2 > 0 on the x1 x2 origin is impossible; f(0,0,x3) <= 0 so the field vanishes there
        assert_eq!(counterexample_field(&spec, &[0.0, 0.0, 1.0]).unwrap(), vec![0.0; 3]);
        let weird = CounterexampleSpec::new(3, Bump::Custom(|_| 1.0), false).unwrap();
        assert_eq!(counterexample_field(&weird, &[0.0, 0.0, 1.0]), Err(Error::SingularAxis));
    }

    #[test]
    fn bumps() {
        assert_eq!(Bump::default().eval(0.0), 0.0);
        assert_eq!(Bump::default().eval(-1.0), 0.0);
        assert!(Bump::default().eval(1e-3_f64) < 1e-300);
        assert_eq!(Bump::Power(2).eval(0.5), 0.25);
        assert_eq!(Bump::Exp { scale: 2.0 }.eval(1.0_f32), (-2.0_f32).exp());
    }

    #[test]
    fn spiral_from_unit_point() {
        let spec = CounterexampleSpec::standard(3).unwrap();
        let tr = integrate_trajectory(&spec, &[1.0, 0.0, 0.0], 50.0, 1e-12).unwrap();
        let m = spiral_metrics(&spec, &tr, 1e-13).unwrap();
        assert!((m.theta_rate + 1.0).abs() <= 1e-6, "{}", m.theta_rate);
        assert!(m.f_strictly_decreasing && m.f_min > 0.0);
        assert!(m.f_ode_residual <= 1e-8, "{}", m.f_ode_residual);
        assert!(m.theta_excursion > 4.0 * PI);
        assert!(m.f_drop > 0.0);
        assert!(m.coordinate_drift <= 1e-10);
    }

    #[test]
    fn inside_the_cone_orbits_close() {
        let spec = CounterexampleSpec::standard(3).unwrap();
        let x0 = [0.5, 0.0, 1.0];
        let tr = integrate_trajectory(&spec, &x0, TAU, 1e-12).unwrap();
        let end = tr.points.last().unwrap();
        assert!(end.iter().zip(&x0).all(|(a, b)| (a - b).abs() < 1e-9));
        let m = spiral_metrics(&spec, &tr, 1e-13).unwrap();
        assert!((m.theta_rate + 1.0).abs() <= 1e-6);
        let spread = tr.f_values.iter().fold(0.0_f64, |acc, v| acc.max((v - tr.f_values[0]).abs()));
        assert!(spread <= 1e-9);
        // on the cone the orbit is periodic as well
        let tr = integrate_trajectory(&spec, &[1.0, 0.0, 1.0], TAU, 1e-12).unwrap();
        assert!((tr.points.last().unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_model_conserves_f() {
        let tr = linear_model_orbit(&[1.0_f64, 0.0, 0.0], 100.0, 1e-12).unwrap();
        let spread = tr.f_values.iter().fold(0.0_f64, |acc, v| acc.max((v - tr.f_values[0]).abs()));
        assert!(spread <= 1e-9, "{spread}");
        let tr = linear_model_orbit(&[1.0_f64, 0.0, 0.0], TAU, 1e-12).unwrap();
        let end = tr.points.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-9 && end[1].abs() < 1e-9);
        let tr = linear_model_orbit(&[0.0, 0.0, 0.0], 5.0, 1e-12).unwrap();
        assert!(tr.points.iter().all(|p| p.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn empty_record_metrics() {
        let tr: TrajectoryRecord<f64> = TrajectoryRecord::default();
        assert_eq!(spiral_metrics(&CounterexampleSpec::standard(3).unwrap(), &tr, 1e-12).unwrap(), SpiralMetrics::default());
    }

    #[test]
    fn higher_dimensions_keep_extra_coordinates() {
        let spec = CounterexampleSpec::standard(5).unwrap();
        let tr = integrate_trajectory(&spec, &[0.9, 0.2, 0.1, -0.3, 0.2], 20.0, 1e-12).unwrap();
        let m = spiral_metrics(&spec, &tr, 1e-13).unwrap();
        assert!(m.coordinate_drift <= 1e-10 && m.f_monotone);
        assert!(m.f_ode_residual <= 1e-8);
    }
}
