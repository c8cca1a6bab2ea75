//! Adaptive Dormand–Prince 5(4) integrator, generic over the float type.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<F> {
    pub rtol: F,
    pub atol: F,
    /// Initial step; estimated when `None`.
    pub h0: Option<F>,
    pub h_max: Option<F>,
    pub max_steps: usize,
}

impl<F: Real> OdeOptions<F> {
    pub fn with_tol(tol: F) -> Self {
        OdeOptions { rtol: tol, atol: tol, h0: None, h_max: None, max_steps: 1_000_000 }
    }
}

/// Returned by the step observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
pub struct OdeSolution<F> {
    pub t: F,
    pub y: Vec<F>,
    pub accepted: usize,
    pub rejected: usize,
    /// True when the observer stopped the integration early.
    pub stopped: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = rhs(t, y)` from `t0` to `t1 >= t0`. The observer sees
/// the initial state and every accepted step.
pub fn integrate<F, R, O>(mut rhs: R, t0: F, y0: &[F], t1: F, opts: &OdeOptions<F>, mut observer: O) -> Result<OdeSolution<F>>
where
    F: Real,
    R: FnMut(F, &[F], &mut [F]) -> Result<()>,
    O: FnMut(F, &[F]) -> Control,
{
    if t1 < t0 {
        return Err(Error::Integration("backward integration is not supported".into()));
    }
    let n = y0.len();
    let lit = F::lit;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut sol = OdeSolution { t, y: y.clone(), accepted: 0, rejected: 0, stopped: false };
    if observer(t, &y) == Control::Stop {
        sol.stopped = true;
        return Ok(sol);
    }
    if t1 == t0 {
        return Ok(sol);
    }

    let mut k: Vec<Vec<F>> = vec![vec![F::zero(); n]; 7];
    rhs(t, &y, &mut k[0])?;
    let span = t1 - t0;
    let h_max = opts.h_max.unwrap_or(span);
    let mut h = match opts.h0 {
        Some(h) => h,
        None => initial_step(&y, &k[0], opts, span),
    }
    .min(h_max);
    let mut ytmp = vec![F::zero(); n];
    let mut ynew = vec![F::zero(); n];
    let mut fac_old = lit(1e-4);

    loop {
        if sol.accepted + sol.rejected >= opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + h * lit(A[s][j]) * kj[i];
                }
                ytmp[i] = acc;
            }
            rhs(t + lit(C[s]) * h, &ytmp, &mut k[s])?;
            if s == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }
        let mut err = F::zero();
        for i in 0..n {
            let mut e = F::zero();
            for (s, ks) in k.iter().enumerate() {
                e = e + lit(E[s]) * ks[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            let r = h * e / sc;
            err = err + r * r;
        }
        err = (err / lit(n.max(1) as f64)).sqrt();
        if !err.is_finite() {
            sol.rejected += 1;
            h = h * lit(0.2);
            if h <= F::epsilon() * t.abs().max(F::one()) {
                return Err(Error::Integration(format!("non-finite state near t = {t}")));
            }
            continue;
        }
        // PI step control
        let expo = lit(0.2 - 0.04);
        let fac = err.max(lit(1e-10)).powf(expo) / fac_old.powf(lit(0.04));
        let fac = (fac / lit(0.9)).max(lit(0.1)).min(lit(5.0));
        let h_new = h / fac;
        if err <= F::one() {
            fac_old = err.max(lit(1e-4));
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            let fsal = k[6].clone();
            k[0] = fsal;
            sol.accepted += 1;
            if observer(t, &y) == Control::Stop {
                sol.stopped = true;
                break;
            }
            if last {
                break;
            }
            h = h_new.min(h_max);
        } else {
            sol.rejected += 1;
            h = h / (err.powf(lit(0.2)) / lit(0.9)).min(lit(5.0));
            if h <= F::epsilon() * t.abs().max(F::one()) {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
        }
    }
    sol.t = t;
    sol.y = y;
    Ok(sol)
}

fn initial_step<F: Real>(y: &[F], f0: &[F], opts: &OdeOptions<F>, span: F) -> F {
    let sc = |v: F| opts.atol + opts.rtol * v.abs();
    let n = F::lit(y.len().max(1) as f64);
    let d0 = (y.iter().map(|&v| (v / sc(v)).powi(2)).fold(F::zero(), |a, b| a + b) / n).sqrt();
    let d1 = (f0.iter().zip(y).map(|(&f, &v)| (f / sc(v)).powi(2)).fold(F::zero(), |a, b| a + b) / n).sqrt();
    let h = if d0 < F::lit(1e-5) || d1 < F::lit(1e-5) { F::lit(1e-6) } else { F::lit(0.01) * d0 / d1 };
    h.min(span).min(span * F::lit(0.1)).max(F::epsilon() * F::lit(100.0))
}

/// Integrates to `t1` and returns the final state only.
pub fn solve_to<F, R>(rhs: R, t0: F, y0: &[F], t1: F, opts: &OdeOptions<F>) -> Result<Vec<F>>
where
    F: Real,
    R: FnMut(F, &[F], &mut [F]) -> Result<()>,
{
    integrate(rhs, t0, y0, t1, opts, |_, _| Control::Continue).map(|s| s.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let opts = OdeOptions::with_tol(1e-12);
        let y = solve_to(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            1.0,
            &opts,
        )
        .unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let opts = OdeOptions::with_tol(1e-12);
        let mut count = 0;
        let sol = integrate(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &opts,
            |_, _| {
                count += 1;
                Control::Continue
            },
        )
        .unwrap();
        assert!((sol.y[0] - 1.0).abs() < 1e-10 && sol.y[1].abs() < 1e-10);
        assert_eq!(count, sol.accepted + 1);
    }

    #[test]
    fn f32_and_time_dependent_rhs() {
        let opts = OdeOptions::with_tol(1e-5_f32);
        let y = solve_to(
            |t, _y: &[f32], dy: &mut [f32]| {
                dy[0] = 3.0 * t * t;
                Ok(())
            },
            0.0,
            &[0.0],
            2.0,
            &opts,
        )
        .unwrap();
        assert!((y[0] - 8.0).abs() < 1e-4);
    }

    #[test]
    fn observer_can_stop_and_errors_propagate() {
        let opts = OdeOptions::with_tol(1e-10);
        let sol = integrate(
            |_, _y: &[f64], dy: &mut [f64]| {
                dy[0] = 1.0;
                Ok(())
            },
            0.0,
            &[0.0],
            10.0,
            &opts,
            |_, y| if y[0] > 0.5 { Control::Stop } else { Control::Continue },
        )
        .unwrap();
        assert!(sol.stopped && sol.t < 10.0);

        let err = solve_to(|_, _y: &[f64], _dy: &mut [f64]| Err(Error::SingularAxis), 0.0, &[1.0], 1.0, &opts);
        assert_eq!(err.unwrap_err(), Error::SingularAxis);
        assert!(solve_to(|_, _y: &[f64], _dy: &mut [f64]| Ok(()), 1.0, &[1.0], 0.0, &opts).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let opts = OdeOptions { max_steps: 20_000, ..OdeOptions::with_tol(1e-10) };
        let r = solve_to(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            2.0,
            &opts,
        );
        assert!(r.is_err());
    }
}
