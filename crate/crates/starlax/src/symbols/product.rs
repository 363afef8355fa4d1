//! The deformed-product strategies and their registry.

use crate::scalars::Rational;

/// One term of a product expansion at order `s`: differentiate the left
/// coefficient `x_left` times and the right coefficient `x_right` times, and
/// scale by `factor` (the `k^s` weight is applied by the engine).
pub struct ExpansionTerm {
    pub x_left: u32,
    pub x_right: u32,
    pub factor: Rational,
}

/// A deformed associative product on phase-space symbols.
///
/// Implementations describe, for a coefficient pair `a p^i`, `b p^j`, the
/// bilinear differential expansion at each order `s >= 0`; the shared engine
/// in [`super::ops`] drives the sums, tracks floors and forms brackets. Each
/// strategy is registered under a stable name and selected at runtime.
pub trait StarProduct: Sync {
    /// Registry name.
    fn name(&self) -> &'static str;

    /// Alternative names accepted by lookup.
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    /// The bracket of this product is `(f*g - g*f) / (divisor * k)`.
    fn bracket_divisor(&self) -> Rational;

    /// Expansion terms at order `s` for exponent pair `(i, j)`.
    fn terms_for(&self, i: i64, j: i64, s: u32) -> Vec<ExpansionTerm>;

    /// Largest order `s` that can contribute for this pair, given how many
    /// `x`-derivatives each coefficient survives (`None` = forever).
    /// `None` means the pair has an infinite tail.
    fn s_bound(&self, i: i64, j: i64, chain_left: Option<u32>, chain_right: Option<u32>)
        -> Option<u32>;
}

/// The full phase-space star product
/// `f*g = sum_s (k^s/s!) sum_r (-1)^r C(s,r) (d_x^r d_p^{s-r} f)(d_x^{s-r} d_p^r g)`.
pub struct Moyal;

/// One-sided pseudodifferential symbol composition
/// `A.B = sum_n (k^n/n!) (d_p^n A)(d_x^n B)`.
pub struct PsdoLeft;

pub static MOYAL: Moyal = Moyal;
pub static PSDO_LEFT: PsdoLeft = PsdoLeft;

impl StarProduct for Moyal {
    fn name(&self) -> &'static str {
        "moyal"
    }

    fn bracket_divisor(&self) -> Rational {
        Rational::from_int(2)
    }

    fn terms_for(&self, i: i64, j: i64, s: u32) -> Vec<ExpansionTerm> {
        // (k^s/s!)(-1)^r C(s,r)(i)_{s-r}(j)_r = (-1)^r C(i, s-r) C(j, r) k^s
        let mut out = Vec::with_capacity(s as usize + 1);
        for r in 0..=s {
            let mut factor = &Rational::binomial(i, s - r) * &Rational::binomial(j, r);
            if r % 2 == 1 {
                factor = -factor;
            }
            if !factor.is_zero() {
                out.push(ExpansionTerm { x_left: r, x_right: s - r, factor });
            }
        }
        out
    }

    fn s_bound(
        &self,
        i: i64,
        j: i64,
        chain_left: Option<u32>,
        chain_right: Option<u32>,
    ) -> Option<u32> {
        // left coefficient takes r x-derivatives: r <= j when j >= 0 (falling
        // factorial (j)_r dies), r < chain_left when the chain dies.
        let r_max = bound_from(j, chain_left)?;
        // right coefficient takes s-r x-derivatives, capped by (i)_{s-r}.
        let t_max = bound_from(i, chain_right)?;
        Some(r_max + t_max)
    }
}

impl StarProduct for PsdoLeft {
    fn name(&self) -> &'static str {
        "psdo-left"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["psdo"]
    }

    fn bracket_divisor(&self) -> Rational {
        Rational::one()
    }

    fn terms_for(&self, i: i64, _j: i64, s: u32) -> Vec<ExpansionTerm> {
        let factor = Rational::binomial(i, s);
        if factor.is_zero() {
            Vec::new()
        } else {
            vec![ExpansionTerm { x_left: 0, x_right: s, factor }]
        }
    }

    fn s_bound(
        &self,
        i: i64,
        _j: i64,
        _chain_left: Option<u32>,
        chain_right: Option<u32>,
    ) -> Option<u32> {
        bound_from(i, chain_right)
    }
}

/// Joint bound on a derivative count that is limited by a falling factorial
/// of `exp` (only when `exp >= 0`) and by a dying derivative chain.
fn bound_from(exp: i64, chain: Option<u32>) -> Option<u32> {
    let from_exp = if exp >= 0 { Some(exp as u32) } else { None };
    let from_chain = chain.map(|z| z.saturating_sub(1));
    match (from_exp, from_chain) {
        (None, None) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

/// All registered products.
pub fn products() -> &'static [&'static dyn StarProduct] {
    static REGISTRY: [&dyn StarProduct; 2] = [&MOYAL, &PSDO_LEFT];
    &REGISTRY
}

/// Looks a product up by name or alias.
pub fn product_by_name(name: &str) -> Option<&'static dyn StarProduct> {
    products()
        .iter()
        .copied()
        .find(|p| p.name() == name || p.aliases().contains(&name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        assert_eq!(product_by_name("moyal").unwrap().name(), "moyal");
        assert_eq!(product_by_name("psdo").unwrap().name(), "psdo-left");
        assert_eq!(product_by_name("psdo-left").unwrap().name(), "psdo-left");
        assert!(product_by_name("weyl").is_none());
    }
}
