//! Differential polynomial ring in jet variables over [`KappaScalar`].
//!
//! Jet variables `u`, `u_x`, `u_xx`, ... (and `u1`, `u2`, ... for further
//! dependent fields) are formal symbols; the total derivative raises the jet
//! order via the product rule. A distinguished field `x` carries the rule
//! `D(x) = 1`, which lets explicit phase-space coordinates live in the same
//! ring. Trace-class equality (equality modulo total `x`-derivatives) is
//! decided through variational derivatives.

mod jet;
mod poly;

pub use jet::{Field, JetVar};
pub use poly::{render_term, DiffPoly, Monomial};
