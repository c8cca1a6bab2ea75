use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

use crate::Rational;

/// Coefficient field for polynomials and exterior objects.
///
/// Both exact rationals and IEEE floats qualify. Zero testing is structural
/// (`is_zero`), so identities are only meaningful over an exact field.
pub trait Scalar:
    Clone + PartialEq + Debug + Num + Neg<Output = Self> + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer embeds") / Self::from_i64(den).expect("integer embeds")
    }

    /// Embeds an exact rational (lossy for floating types).
    fn from_rational(q: &Rational) -> Self;
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num.into(), den.into())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
}

/// Floating type used by the numeric integrators.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits")
    }

    fn from_rational(q: &Rational) -> Self {
        Self::lit(q.to_f64().unwrap_or(f64::NAN))
    }
}

impl<T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static> Real for T {}
