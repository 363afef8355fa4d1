//! Exact symbolic engine for deformed symbol algebras and integrable hierarchies.
//!
//! Everything is computed over exact scalars (arbitrary-precision rationals,
//! polynomials in the deformation parameter `k`, rational functions in `q`);
//! there is no floating point anywhere in the engine.
//!
//! The crate is organised in layers:
//!
//! - [`scalars`]: rationals, `k`-polynomials ([`scalars::KappaScalar`]) and
//!   `q`-rational functions ([`scalars::QScalar`]).
//! - [`diffalg`]: differential polynomials in jet variables `u`, `u_x`, ...
//!   with total and variational derivatives.
//! - [`symbols`]: truncated Laurent symbols in the momentum letter `p`,
//!   the deformed products (Moyal and one-sided symbol composition) behind
//!   the [`symbols::StarProduct`] registry, brackets, projections and residues.
//! - [`lax`]: star roots, fractional powers, hierarchy flows, conserved
//!   charges, dispersionless limits and the Sato coefficient map.
//! - [`hirota`]: elementary Schur polynomials, Hirota derivatives on
//!   exponential sums, bilinear residuals and dispersionless Fay relations.
//! - [`qcalc`]: the q-derivative/q-shift operator calculus in normal form
//!   and the discrete-hierarchy coefficient map.

pub mod diffalg;
pub mod hirota;
pub mod lax;
pub mod qcalc;
pub mod scalars;
pub mod symbols;

pub use scalars::{KappaScalar, QScalar, Rational};
