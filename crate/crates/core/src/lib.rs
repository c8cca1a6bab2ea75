//! Symbolic and numeric toolkit for coorder-1 Nambu structures.
//!
//! The symbolic layer ([`poly`], [`exterior`], [`nambu`]) is generic over the
//! coefficient ring through [`Scalar`]; the numeric layer ([`ode`],
//! [`linearize`], [`holonomy`]) is generic over [`Real`]. The aliases below fix
//! the choices used throughout the crate: exact rationals for every identity
//! that must hold symbolically and `f64` for flows.

pub mod error;
pub mod exterior;
pub mod frontend;
pub mod holonomy;
pub mod linalg;
pub mod linearize;
pub mod nambu;
pub mod ode;
pub mod poly;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Exact multivariate polynomial.
pub type Poly = poly::Polynomial<Rational>;
/// Floating-point polynomial, used for fast evaluation of symbolic results.
pub type PolyF64 = poly::Polynomial<f64>;
/// Exact rational function in the Moser variables `(f, t)`.
pub type RationalFunc = poly::RationalFunction<Rational>;

/// Multivector field with exact polynomial coefficients.
pub type MultiVector = exterior::MultiVectorOf<Rational>;
/// Differential form with exact polynomial coefficients.
pub type DiffForm = exterior::DiffFormOf<Rational>;
/// Polynomial volume density against `dx1 ^ .. ^ dxn`.
pub type VolumeDensity = exterior::VolumeDensity<Rational>;
pub type MultiVectorF64 = exterior::MultiVectorOf<f64>;
pub type DiffFormF64 = exterior::DiffFormOf<f64>;

/// Rational square matrix stored row-major.
pub type RationalMatrix = Vec<Vec<Rational>>;
