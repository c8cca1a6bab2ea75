use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

use super::Polynomial;

/// Quotient of two polynomials over a named variable list.
///
/// Never simplified by gcd cancellation; zero tests look at the numerator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<C: Scalar> {
    vars: Vec<String>,
    num: Polynomial<C>,
    den: Polynomial<C>,
}

impl<C: Scalar> RationalFunction<C> {
    pub fn new(vars: Vec<String>, num: Polynomial<C>, den: Polynomial<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        for p in [&num, &den] {
            if p.num_vars() != vars.len() {
                return Err(Error::DimensionMismatch { expected: vars.len(), found: p.num_vars() });
            }
        }
        Ok(RationalFunction { vars, num, den })
    }

    pub fn from_poly(vars: Vec<String>, p: Polynomial<C>) -> Result<Self> {
        let n = p.num_vars();
        Self::new(vars, p, Polynomial::one(n))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num(&self) -> &Polynomial<C> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Quotient rule; the result has denominator `den^2`.
    pub fn diff(&self, i: usize) -> Result<Self> {
        let dn = self.num.diff(i)?;
        let dd = self.den.diff(i)?;
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Ok(RationalFunction { vars: self.vars.clone(), num, den: &self.den * &self.den })
    }

    pub fn eval(&self, point: &[C]) -> Result<C> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(point)? / d)
    }

    pub fn eval_float<F: Real>(&self, point: &[F]) -> Result<F> {
        let d = self.den.eval_float(point)?;
        if d == F::zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval_float(point)? / d)
    }

    pub fn eval_den<F: Real>(&self, point: &[F]) -> Result<F> {
        self.den.eval_float(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, Rational, RationalFunc};

    fn ft() -> Vec<String> {
        vec!["f".into(), "t".into()]
    }

    #[test]
    fn quotient_rule() {
        // r = f / (1 + t f), dr/df = 1 / (1 + t f)^2
        let f = Poly::var(2, 0);
        let t = Poly::var(2, 1);
        let den = &Poly::one(2) + &(&t * &f);
        let r = RationalFunc::new(ft(), f.clone(), den.clone()).unwrap();
        let dr = r.diff(0).unwrap();
        assert_eq!(dr.num(), &Poly::one(2));
        assert_eq!(dr.den(), &(&den * &den));
        let v = dr.eval(&[Rational::from_ratio(1, 2), Rational::from_ratio(1, 1)]).unwrap();
        assert_eq!(v, Rational::from_ratio(4, 9));
        assert!((dr.eval_float(&[0.5f64, 1.0]).unwrap() - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RationalFunc::new(ft(), Poly::one(2), Poly::zero(2)), Err(Error::DivisionByZero));
        let r = RationalFunc::new(ft(), Poly::one(2), Poly::var(2, 0)).unwrap();
        assert_eq!(r.eval_float(&[0.0f64, 0.3]), Err(Error::DivisionByZero));
    }
}
