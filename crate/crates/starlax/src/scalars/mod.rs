//! Exact coefficient scalars.
//!
//! Three scalar rings, all with canonical normal forms so that equality is a
//! structural check:
//!
//! - [`Rational`]: arbitrary-precision rationals, always reduced, positive
//!   denominator.
//! - [`KappaScalar`]: polynomials in the deformation letter `k` over
//!   [`Rational`], sparse, with no stored zero coefficients.
//! - [`QScalar`]: rational functions in `q` over [`Rational`], reduced, with
//!   monic denominator.

mod kappa;
mod qscalar;
mod rational;

pub use kappa::KappaScalar;
pub use qscalar::{QPoly, QScalar};
pub use rational::Rational;
