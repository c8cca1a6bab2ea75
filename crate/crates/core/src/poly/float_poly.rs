use crate::scalar::{Real, Scalar};

use super::Polynomial;

/// Float copy of a polynomial for repeated evaluation in integrators.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly<F> {
    num_vars: usize,
    terms: Vec<(Vec<u32>, F)>,
}

impl<F: Real> FloatPoly<F> {
    pub fn new<C: Scalar>(p: &Polynomial<C>) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| (m.exponents().to_vec(), F::from_f64(c.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan)))
            .collect();
        FloatPoly { num_vars: p.num_vars(), terms }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Evaluates at `x`; extra trailing coordinates are ignored.
    pub fn eval(&self, x: &[F]) -> F {
        self.terms.iter().fold(F::zero(), |acc, (e, c)| {
            let v = e.iter().zip(x).fold(*c, |v, (&k, &xi)| if k == 0 { v } else { v * xi.powi(k as i32) });
            acc + v
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, Rational};

    #[test]
    fn agrees_with_exact_evaluation() {
        let p = &(&Poly::var(2, 0).pow(3) - &Poly::var(2, 1).scale(&Rational::from_ratio(1, 3))) + &Poly::one(2);
        let fp: FloatPoly<f64> = FloatPoly::new(&p);
        let exact = p.eval(&[Rational::from_ratio(1, 2), Rational::from_ratio(3, 1)]).unwrap();
        assert!((fp.eval(&[0.5, 3.0]) - num_traits::ToPrimitive::to_f64(&exact).unwrap()).abs() < 1e-15);
    }
}
