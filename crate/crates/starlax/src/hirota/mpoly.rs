//! Sparse multivariate polynomials over [`Rational`] with pluggable
//! monomial keys (time letters, bilinear-derivative letters, abstract
//! unknowns).

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalars::Rational;

/// A commutative monomial key.
pub trait MonKey: Ord + Clone {
    fn unit() -> Self;
    fn combine(&self, other: &Self) -> Self;
}

/// Sparse polynomial with [`Rational`] coefficients; no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly<K: MonKey> {
    terms: BTreeMap<K, Rational>,
}

impl<K: MonKey> Default for MPoly<K> {
    fn default() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
}

impl<K: MonKey> MPoly<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(K::unit(), c);
        }
        MPoly { terms }
    }

    pub fn var(k: K) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, Rational::one());
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn insert_add(&mut self, k: K, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
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

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes values for every key-variable via a per-monomial
    /// evaluation callback.
    pub fn eval_with(&self, mono_value: impl Fn(&K) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            acc += &(c * &mono_value(k));
        }
        acc
    }
}

impl<K: MonKey> Add<&MPoly<K>> for &MPoly<K> {
    type Output = MPoly<K>;
    fn add(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(k.clone(), c.clone());
        }
        out
    }
}

impl<K: MonKey> Sub<&MPoly<K>> for &MPoly<K> {
    type Output = MPoly<K>;
    fn sub(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(k.clone(), -c);
        }
        out
    }
}

impl<K: MonKey> Mul<&MPoly<K>> for &MPoly<K> {
    type Output = MPoly<K>;
    fn mul(self, rhs: &MPoly<K>) -> MPoly<K> {
        let mut out = MPoly::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                out.insert_add(k1.combine(k2), c1 * c2);
            }
        }
        out
    }
}

impl<K: MonKey> Neg for &MPoly<K> {
    type Output = MPoly<K>;
    fn neg(self) -> MPoly<K> {
        MPoly {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

/// Exponent maps over an ordered letter set make a monomial key.
impl<L: Ord + Clone> MonKey for BTreeMap<L, u32> {
    fn unit() -> Self {
        BTreeMap::new()
    }

    fn combine(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, e) in other {
            *out.entry(l.clone()).or_insert(0) += e;
        }
        out
    }
}
