//! Numeric side of the linearization: the radial Moser flow, its Jacobian,
//! and the pointwise pullback check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{blades, eval_multivector};
use crate::linalg::{det_float, invert_float};
use crate::ode::{integrate, Control, OdeOptions};
use crate::scalar::Real;
use crate::poly::FloatPoly;
use crate::{MultiVector, RationalFunc};

use super::{MoserCoefficient, MoserSpec};

/// `r(c, t)` and `dr/dc` in floating point.
#[derive(Clone, Debug)]
pub struct MoserField<F> {
    num: FloatPoly<F>,
    den: FloatPoly<F>,
    dnum: FloatPoly<F>,
    dden: FloatPoly<F>,
}

impl<F: Real> MoserField<F> {
    pub fn new(r: &RationalFunc) -> Result<Self> {
        if r.vars().len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: r.vars().len() });
        }
        Ok(MoserField {
            num: FloatPoly::new(r.num()),
            den: FloatPoly::new(r.den()),
            dnum: FloatPoly::new(&r.num().diff(0)?),
            dden: FloatPoly::new(&r.den().diff(0)?),
        })
    }

    /// `(r, dr/dc)` at `(c, t)`. The denominator is positive at `c = 0`; a
    /// nonpositive value means the trajectory left the domain of `r`.
    pub fn eval(&self, c: F, t: F) -> Result<(F, F)> {
        let p = [c, t];
        let den = self.den.eval(&p);
        if !(den > F::zero()) {
            return Err(Error::BlowUp { f: c.to_f64().unwrap_or(f64::NAN), t: t.to_f64().unwrap_or(f64::NAN) });
        }
        let num = self.num.eval(&p);
        let r = num / den;
        let dr = (self.dnum.eval(&p) * den - num * self.dden.eval(&p)) / (den * den);
        Ok((r, dr))
    }
}

/// State of the reduced flow at `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarFlow<F> {
    /// `f` along the trajectory, `c(1)`.
    pub c: F,
    pub lambda: F,
    pub dlambda_dc: F,
}

/// Integrates `c' = 2 r c`, `lambda' = r lambda` and the sensitivity
/// `mu = d lambda / d c0` with `mu' = r_c nu lambda + r mu`, where
/// `nu = dc/dc0 = lambda^2 + 2 c0 lambda mu`.
pub fn scalar_flow<F: Real>(field: &MoserField<F>, c0: F, tol: F) -> Result<ScalarFlow<F>> {
    let two = F::lit(2.0);
    let rhs = |t: F, y: &[F], dy: &mut [F]| {
        let (c, lambda, mu) = (y[0], y[1], y[2]);
        let (r, rc) = field.eval(c, t)?;
        let nu = lambda * lambda + two * c0 * lambda * mu;
        dy[0] = two * r * c;
        dy[1] = r * lambda;
        dy[2] = rc * nu * lambda + r * mu;
        Ok(())
    };
    let y = solve_near_pole(rhs, &[c0, F::one(), F::zero()], tol, |y| y[0])?;
    Ok(ScalarFlow { c: y[0], lambda: y[1], dlambda_dc: y[2] })
}

/// Integrates over `t in [0, 1]`. `r` grows without bound as its
/// denominator approaches zero, so a collapsing step size is reported as
/// a blow-up at the last accepted `(f, t)`.
fn solve_near_pole<F, R>(rhs: R, y0: &[F], tol: F, f_of: impl Fn(&[F]) -> F) -> Result<Vec<F>>
where
    F: Real,
    R: FnMut(F, &[F], &mut [F]) -> Result<()>,
{
    let mut last = (f_of(y0), F::zero());
    let observer = |t: F, y: &[F]| {
        last = (f_of(y), t);
        Control::Continue
    };
    match integrate(rhs, F::zero(), y0, F::one(), &OdeOptions::with_tol(tol), observer) {
        Ok(sol) => Ok(sol.y),
        Err(Error::Integration(_)) => Err(Error::BlowUp {
            f: last.0.to_f64().unwrap_or(f64::NAN),
            t: last.1.to_f64().unwrap_or(f64::NAN),
        }),
        Err(e) => Err(e),
    }
}

/// `1/2 (x1^2 + .. + x_pos^2 - x_{pos+1}^2 - ..)`.
pub fn quadratic_value<F: Real>(pos: usize, x: &[F]) -> F {
    let half = F::lit(0.5);
    x.iter().enumerate().fold(F::zero(), |acc, (i, &v)| if i < pos { acc + half * v * v } else { acc - half * v * v })
}

/// Direct integration of `x' = r_t(f(x)) x` in n dimensions.
pub fn full_flow<F: Real>(field: &MoserField<F>, pos: usize, x0: &[F], tol: F) -> Result<Vec<F>> {
    let rhs = |t: F, x: &[F], dx: &mut [F]| {
        let (r, _) = field.eval(quadratic_value(pos, x), t)?;
        for (d, &v) in dx.iter_mut().zip(x) {
            *d = r * v;
        }
        Ok(())
    };
    solve_near_pole(rhs, x0, tol, |x| quadratic_value(pos, x))
}

/// `(Phi^* P)(x)` from the Jacobian `J = D Phi(x)` and the components of the
/// k-vector `P` at `Phi(x)`: `Lambda^k (J^{-1})` applied through k x k minors.
pub fn pullback_at<F: Real>(jac: &[Vec<F>], degree: usize, value: &[F]) -> Result<Vec<F>> {
    let n = jac.len();
    let bl = blades(n, degree);
    if value.len() != bl.len() {
        return Err(Error::DimensionMismatch { expected: bl.len(), found: value.len() });
    }
    let inv = invert_float(jac).ok_or(Error::SingularJacobian)?;
    Ok(bl
        .iter()
        .map(|rows| {
            bl.iter().zip(value).fold(F::zero(), |acc, (cols, &v)| {
                let minor: Vec<Vec<F>> = rows.iter().map(|&i| cols.iter().map(|&j| inv[i][j]).collect()).collect();
                acc + det_float(&minor) * v
            })
        })
        .collect())
}

/// One verified point of the time-1 map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSample<F> {
    pub x0: Vec<F>,
    /// `f(x0)`.
    pub c0: F,
    pub lambda: F,
    pub dlambda_dc: F,
    pub image: Vec<F>,
    pub jacobian: Vec<Vec<F>>,
    /// Max-norm of `Phi_1^* (k(f) P_l) - P_l` at `x0`.
    pub residual: F,
}

/// Time-1 Moser map for a fixed normal form.
#[derive(Clone, Debug)]
pub struct Linearizer<F> {
    n: usize,
    pos: usize,
    field: MoserField<F>,
    k: FloatPoly<F>,
    pl: MultiVector,
    tol: F,
}

impl<F: Real> Linearizer<F> {
    pub fn new(spec: &MoserSpec, r: &MoserCoefficient, tol: F) -> Result<Self> {
        Ok(Linearizer {
            n: spec.dim(),
            pos: spec.signature().pos,
            field: MoserField::new(&r.r)?,
            k: FloatPoly::new(spec.k()),
            pl: spec.linear_structure(),
            tol,
        })
    }

    pub fn with_tol(&self, tol: F) -> Self {
        Linearizer { tol, ..self.clone() }
    }

    pub fn tol(&self) -> F {
        self.tol
    }

    pub fn field(&self) -> &MoserField<F> {
        &self.field
    }

    fn check(&self, x0: &[F]) -> Result<()> {
        if x0.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x0.len() });
        }
        Ok(())
    }

    /// `Phi_1(x0) = lambda(1; f(x0)) x0` without the Jacobian.
    pub fn image(&self, x0: &[F]) -> Result<Vec<F>> {
        self.check(x0)?;
        let s = scalar_flow(&self.field, quadratic_value(self.pos, x0), self.tol)?;
        Ok(x0.iter().map(|&v| s.lambda * v).collect())
    }

    pub fn flow_map(&self, x0: &[F]) -> Result<FlowSample<F>> {
        self.check(x0)?;
        let c0 = quadratic_value(self.pos, x0);
        let s = scalar_flow(&self.field, c0, self.tol)?;
        let image: Vec<F> = x0.iter().map(|&v| s.lambda * v).collect();
        let grad: Vec<F> = x0.iter().enumerate().map(|(i, &v)| if i < self.pos { v } else { -v }).collect();
        let jacobian: Vec<Vec<F>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let id = if i == j { s.lambda } else { F::zero() };
                        id + s.dlambda_dc * x0[i] * grad[j]
                    })
                    .collect()
            })
            .collect();
        let kf = self.k.eval(&[quadratic_value(self.pos, &image)]);
        let at_image: Vec<F> = eval_multivector(&self.pl, &image)?.into_iter().map(|v| kf * v).collect();
        let pulled = pullback_at(&jacobian, self.n - 1, &at_image)?;
        let target = eval_multivector(&self.pl, x0)?;
        let residual = pulled.iter().zip(&target).fold(F::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        Ok(FlowSample { x0: x0.to_vec(), c0, lambda: s.lambda, dlambda_dc: s.dlambda_dc, image, jacobian, residual })
    }

    pub fn pullback_residual(&self, x0: &[F]) -> Result<F> {
        self.flow_map(x0).map(|s| s.residual)
    }

    /// The unreduced n-dimensional flow, as an independent oracle.
    pub fn full_flow(&self, x0: &[F]) -> Result<Vec<F>> {
        self.check(x0)?;
        full_flow(&self.field, self.pos, x0, self.tol)
    }

    /// Central differences of the time-1 map with step `h`.
    pub fn jacobian_fd(&self, x0: &[F], h: F) -> Result<Vec<Vec<F>>> {
        self.check(x0)?;
        let mut jac = vec![vec![F::zero(); self.n]; self.n];
        for j in 0..self.n {
            let mut xp = x0.to_vec();
            let mut xm = x0.to_vec();
            xp[j] = xp[j] + h;
            xm[j] = xm[j] - h;
            let (yp, ym) = (self.image(&xp)?, self.image(&xm)?);
            for i in 0..self.n {
                jac[i][j] = (yp[i] - ym[i]) / (h + h);
            }
        }
        Ok(jac)
    }
}

/// Sample points in `[-radius, radius]^n`: a regular grid when `samples` is
/// a perfect n-th power, seeded uniform points otherwise.
pub fn sample_points(n: usize, samples: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let m = (samples as f64).powf(1.0 / n as f64).round() as usize;
    if m > 0 && m.checked_pow(n as u32) == Some(samples) {
        let axis: Vec<f64> = if m == 1 {
            vec![0.0]
        } else {
            (0..m).map(|i| -radius + 2.0 * radius * i as f64 / (m - 1) as f64).collect()
        };
        (0..samples)
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let v = axis[idx % m];
                        idx /= m;
                        v
                    })
                    .collect()
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| (0..n).map(|_| rng.gen_range(-radius..=radius)).collect()).collect()
    }
}
