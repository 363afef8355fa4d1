//! Truncated Laurent symbols in the momentum letter `p` and their deformed
//! products.
//!
//! A [`PhaseSymbol`] stores coefficients in left-normal form (a
//! [`DiffPoly`](crate::diffalg::DiffPoly) sitting to the left of each
//! `p`-power) together with an explicit truncation [`Floor`]: coefficients
//! below a finite floor are unknown and never silently invented.
//!
//! The deformed products live behind the [`StarProduct`] trait and are
//! registered by name:
//!
//! - `"moyal"` — the full phase-space star product
//!   `f*g = sum_s (k^s/s!) sum_j (-1)^j C(s,j) (d_x^j d_p^{s-j} f)(d_x^{s-j} d_p^j g)`,
//!   bracket normalized by `1/(2k)`;
//! - `"psdo-left"` — the one-sided symbol composition
//!   `A.B = sum_n (k^n/n!) (d_p^n A)(d_x^n B)`, bracket normalized by `1/k`.
//!
//! Both degenerate to the commutative product at `k = 0`. Every product of
//! truncated operands carries a contamination bound; requesting coefficients
//! below it is refused with [`SymbolError::FloorTooDeep`] rather than
//! silently truncated.

mod ops;
mod product;
mod symbol;

pub use ops::{
    bracket, bracket_auto, mul_commutative, poisson_bracket, project, residue, star, star_auto, star_power,
    trace_equal,
};
pub use product::{product_by_name, products, Moyal, PsdoLeft, StarProduct, MOYAL, PSDO_LEFT};
pub use symbol::{Floor, PhaseSymbol, SymbolError};
