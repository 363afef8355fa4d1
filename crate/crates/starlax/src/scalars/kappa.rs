//! Polynomials in the deformation letter `k` over [`Rational`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Rational;

/// A polynomial `c0 + c1*k + c2*k^2 + ...` in the deformation parameter.
///
/// Sparse map from `k`-exponent to coefficient; zero coefficients are never
/// stored, so equality is structural. The degree-0 embedding agrees with
/// [`Rational`] arithmetic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KappaScalar {
    terms: BTreeMap<u32, Rational>,
}

impl KappaScalar {
    pub fn zero() -> Self {
        KappaScalar::default()
    }

    pub fn one() -> Self {
        KappaScalar::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        KappaScalar { terms }
    }

    pub fn from_int(n: i64) -> Self {
        KappaScalar::from_rational(Rational::from_int(n))
    }

    /// The letter `k` itself.
    pub fn kappa() -> Self {
        KappaScalar::kappa_pow(1)
    }

    /// `c * k^e`.
    pub fn monomial(c: Rational, e: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        KappaScalar { terms }
    }

    pub fn kappa_pow(e: u32) -> Self {
        KappaScalar::monomial(Rational::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Some(&c) when the value is a plain rational (degree 0), including zero.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// Some((c, e)) when the value is a single term `c*k^e`.
    pub fn as_monomial(&self) -> Option<(&Rational, u32)> {
        if self.terms.len() == 1 {
            let (&e, c) = self.terms.iter().next().unwrap();
            Some((c, e))
        } else {
            None
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: u32) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    fn insert_add(&mut self, e: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return KappaScalar::zero();
        }
        KappaScalar {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// Multiplies by `k^e`.
    pub fn mul_kappa_pow(&self, e: u32) -> Self {
        KappaScalar {
            terms: self.terms.iter().map(|(&d, v)| (d + e, v.clone())).collect(),
        }
    }

    /// Evaluates the polynomial at `k = value`, exactly.
    pub fn substitute_kappa(&self, value: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&e, c) in &self.terms {
            acc += &(c * &value.pow(e as i32));
        }
        acc
    }

    /// Exact division by `d * k`: shifts every exponent down by one.
    ///
    /// Returns `None` when a `k`-free term is present, i.e. the division is
    /// not exact. Callers in the bracket machinery treat that as an internal
    /// error (commutator parity guarantees divisibility).
    pub fn div_kappa_exact(&self, d: &Rational) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (&e, c) in &self.terms {
            if e == 0 {
                return None;
            }
            terms.insert(e - 1, c / d);
        }
        Some(KappaScalar { terms })
    }
}

impl Add<&KappaScalar> for &KappaScalar {
    type Output = KappaScalar;
    fn add(self, rhs: &KappaScalar) -> KappaScalar {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.insert_add(e, c.clone());
        }
        out
    }
}

impl Sub<&KappaScalar> for &KappaScalar {
    type Output = KappaScalar;
    fn sub(self, rhs: &KappaScalar) -> KappaScalar {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.insert_add(e, -c);
        }
        out
    }
}

impl Mul<&KappaScalar> for &KappaScalar {
    type Output = KappaScalar;
    fn mul(self, rhs: &KappaScalar) -> KappaScalar {
        let mut out = KappaScalar::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.insert_add(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &KappaScalar {
    type Output = KappaScalar;
    fn neg(self) -> KappaScalar {
        KappaScalar {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl fmt::Display for KappaScalar {
    /// Renders ascending in `k`, e.g. `3/2 + 2*k + k^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", term_text(&mag, e))?;
        }
        Ok(())
    }
}

fn term_text(mag: &Rational, e: u32) -> String {
    match e {
        0 => format!("{mag}"),
        1 if mag.is_one() => "k".into(),
        1 => format!("{mag}*k"),
        _ if mag.is_one() => format!("k^{e}"),
        _ => format!("{mag}*k^{e}"),
    }
}

impl fmt::Debug for KappaScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl KappaScalar {
    pub fn latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        let mut first = true;
        for (&e, c) in &self.terms {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                first = false;
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let kp = match e {
                0 => String::new(),
                1 => "\\kappa".into(),
                _ => format!("\\kappa^{e}"),
            };
            if e == 0 {
                out.push_str(&mag.latex());
            } else if mag.is_one() {
                out.push_str(&kp);
            } else {
                out.push_str(&format!("{} {}", mag.latex(), kp));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> KappaScalar {
        KappaScalar::kappa()
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = &k() + &KappaScalar::one();
        let b = &a - &k();
        assert_eq!(b, KappaScalar::one());
        assert!((&k() - &k()).is_zero());
    }

    #[test]
    fn substitution_examples() {
        // k^2 at 0
        let k2 = KappaScalar::kappa_pow(2);
        assert_eq!(k2.substitute_kappa(&Rational::zero()), Rational::zero());
        // 3/2 + 2k at 1/2
        let s = &KappaScalar::from_rational(Rational::new(3, 2)) + &k().mul_rational(&Rational::from_int(2));
        assert_eq!(s.substitute_kappa(&Rational::new(1, 2)), Rational::new(5, 2));
        // k^3 - k at 1/2, against direct evaluation: 1/8 - 1/2 = -3/8
        let p = &KappaScalar::kappa_pow(3) - &k();
        assert_eq!(p.substitute_kappa(&Rational::new(1, 2)), Rational::new(-3, 8));
    }

    #[test]
    fn substitution_is_ring_hom() {
        let a = &KappaScalar::from_int(3) + &KappaScalar::kappa_pow(2);
        let b = &k() - &KappaScalar::from_rational(Rational::new(1, 3));
        let v = Rational::new(-2, 5);
        assert_eq!(
            (&a * &b).substitute_kappa(&v),
            a.substitute_kappa(&v) * b.substitute_kappa(&v)
        );
    }

    #[test]
    fn exact_division_by_kappa() {
        let p = KappaScalar::monomial(Rational::from_int(6), 3);
        let q = p.div_kappa_exact(&Rational::from_int(2)).unwrap();
        assert_eq!(q, KappaScalar::monomial(Rational::from_int(3), 2));
        assert!(KappaScalar::one().div_kappa_exact(&Rational::one()).is_none());
    }

    #[test]
    fn rendering() {
        let s = &(&KappaScalar::from_rational(Rational::new(3, 2))
            + &k().mul_rational(&Rational::from_int(2)))
            + &KappaScalar::kappa_pow(2);
        assert_eq!(s.to_string(), "3/2 + 2*k + k^2");
        assert_eq!((-&k()).to_string(), "-k");
    }
}
