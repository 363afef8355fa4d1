//! q-deformed operator calculus: the q-derivative `dq` and q-shift `T`
//! acting on Laurent polynomials, normal-form rewriting of operator words,
//! commutators, and the discrete-hierarchy coefficient map.
//!
//! Conventions: `dq f(z) = (f(qz) - f(z)) / ((q-1) z)` and `T f(z) = f(qz)`,
//! with the exchange rule `dq T = q T dq`. Normal form places coefficient
//! functions to the left of all `T` and `dq` letters.

mod laurent;
mod operator;

pub use laurent::QLaurent;
pub use operator::{
    apply_atoms, discrete_kp_map, normal_form_of, q_commutator, BinomialConvention, QAtom,
    QOperator, QcalcError,
};
