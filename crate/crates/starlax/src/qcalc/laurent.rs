//! Laurent polynomials in `x` over [`QScalar`], the test-function space of
//! the q-operator calculus.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalars::{QScalar, Rational};

/// A finite Laurent polynomial `sum c_m x^m` with rational-function-in-`q`
/// coefficients. No stored zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QLaurent {
    terms: BTreeMap<i64, QScalar>,
}

impl QLaurent {
    pub fn zero() -> Self {
        QLaurent::default()
    }

    pub fn one() -> Self {
        QLaurent::constant(QScalar::one())
    }

    pub fn constant(c: QScalar) -> Self {
        QLaurent::monomial(c, 0)
    }

    pub fn x_pow(m: i64) -> Self {
        QLaurent::monomial(QScalar::one(), m)
    }

    pub fn monomial(c: QScalar, m: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        QLaurent { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(QScalar::is_one)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &QScalar)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn insert_add(&mut self, m: i64, c: QScalar) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = &*e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    e.insert(v);
                }
            }
        }
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        if c.is_zero() {
            return QLaurent::zero();
        }
        QLaurent {
            terms: self.terms.iter().map(|(&m, v)| (m, v * c)).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        QLaurent {
            terms: self.terms.iter().map(|(&m, v)| (m + k, v.clone())).collect(),
        }
    }

    /// The shift `T^a`: `x^m` goes to `q^{a m} x^m`, exact for any integer.
    pub fn apply_tau(&self, a: i64) -> Self {
        QLaurent {
            terms: self
                .terms
                .iter()
                .map(|(&m, v)| (m, v * &QScalar::q_pow(a * m)))
                .collect(),
        }
    }

    /// The q-derivative: `x^m` goes to `(m)_q x^{m-1}` for every integer m.
    pub fn dq(&self) -> Self {
        let mut out = QLaurent::zero();
        for (&m, c) in &self.terms {
            out.insert_add(m - 1, c * &QScalar::q_number(m));
        }
        out
    }

    /// The q-antiderivative: `x^m` goes to `x^{m+1}/(m+1)_q`; the monomial
    /// `x^-1` is not in the image of `dq` on this space.
    pub fn dq_inverse(&self) -> Result<Self, super::QcalcError> {
        let mut out = QLaurent::zero();
        for (&m, c) in &self.terms {
            if m == -1 {
                return Err(super::QcalcError::NotIntegrable);
            }
            out.insert_add(m + 1, c / &QScalar::q_number(m + 1));
        }
        Ok(out)
    }

    /// Smallest `r` with `dq^r = 0` on this function, `None` when the chain
    /// never dies (some negative power present).
    pub fn dq_chain_zero_after(&self) -> Option<u32> {
        if self.is_zero() {
            return Some(0);
        }
        let mut top = 0i64;
        for &m in self.terms.keys() {
            if m < 0 {
                return None;
            }
            top = top.max(m);
        }
        Some(top as u32 + 1)
    }

    /// Evaluates every coefficient at `q = value`; `None` if any reduced
    /// denominator vanishes there.
    pub fn substitute_q(&self, value: &Rational) -> Option<BTreeMap<i64, Rational>> {
        let mut out = BTreeMap::new();
        for (&m, c) in &self.terms {
            let v = c.substitute_q(value)?;
            if !v.is_zero() {
                out.insert(m, v);
            }
        }
        Some(out)
    }
}

impl Add<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (m, c) in rhs.iter() {
            out.insert_add(m, c.clone());
        }
        out
    }
}

impl Sub<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (m, c) in rhs.iter() {
            out.insert_add(m, -c);
        }
        out
    }
}

impl Mul<&QLaurent> for &QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: &QLaurent) -> QLaurent {
        let mut out = QLaurent::zero();
        for (m1, c1) in self.iter() {
            for (m2, c2) in rhs.iter() {
                out.insert_add(m1 + m2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        QLaurent {
            terms: self.terms.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }
}

impl fmt::Display for QLaurent {
    /// Ascending in `x`, coefficients in `(num)/(den)` form when needed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            let cs = c.to_string();
            let simple = c.denominator().is_one() && c.numerator().iter().count() == 1;
            let xs = match m {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{m}"),
            };
            match (m, simple, c.is_one()) {
                (0, _, _) if simple => write!(f, "{cs}")?,
                (0, _, _) => write!(f, "({cs})")?,
                (_, _, true) => write!(f, "{xs}")?,
                (_, true, _) => write!(f, "{cs} {xs}")?,
                (_, false, _) => write!(f, "({cs}) {xs}")?,
            }
        }
        Ok(())
    }
}
