//! Differential polynomials and their calculus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalars::{KappaScalar, Rational};

use super::jet::{Field, JetVar};

/// A power product of jet variables, e.g. `u u_x^2`.
///
/// No zero exponents are stored; the empty product is the unit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Monomial {
    exps: BTreeMap<JetVar, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: JetVar) -> Self {
        let mut exps = BTreeMap::new();
        exps.insert(v, 1);
        Monomial { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: &JetVar) -> u32 {
        self.exps.get(v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&JetVar, u32)> {
        self.exps.iter().map(|(v, &e)| (v, e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, &e) in &other.exps {
            *exps.entry(*v).or_insert(0) += e;
        }
        Monomial { exps }
    }

    /// Removes one power of `v`; `None` if `v` does not occur.
    fn reduce(&self, v: &JetVar) -> Option<Monomial> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        if e == 1 {
            exps.remove(v);
        } else {
            exps.insert(*v, e - 1);
        }
        Some(Monomial { exps })
    }

    /// Total weight under the scaling grading (`u^(j)` has weight `j+2`,
    /// `x` has weight `-1`).
    pub fn scaling_weight(&self) -> i64 {
        self.exps
            .iter()
            .map(|(v, &e)| v.scaling_weight() * e as i64)
            .sum()
    }

    /// Rendering order: graded by scaling weight, ties broken by descending
    /// lexicographic comparison of exponents over ascending variables.
    fn render_key_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.scaling_weight().cmp(&other.scaling_weight()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let vars: BTreeSet<&JetVar> = self.exps.keys().chain(other.exps.keys()).collect();
        for v in vars {
            match self.exponent(v).cmp(&other.exponent(v)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// A differential polynomial: finite sum of [`Monomial`]s with
/// [`KappaScalar`] coefficients. No stored zero coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, KappaScalar>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(KappaScalar::one())
    }

    pub fn constant(c: KappaScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        DiffPoly { terms }
    }

    pub fn from_rational(c: Rational) -> Self {
        DiffPoly::constant(KappaScalar::from_rational(c))
    }

    pub fn from_int(n: i64) -> Self {
        DiffPoly::from_rational(Rational::from_int(n))
    }

    pub fn kappa() -> Self {
        DiffPoly::constant(KappaScalar::kappa())
    }

    /// The jet variable `(field, order)` as a polynomial.
    ///
    /// Panics if asked for a prolongation of `x`: the independent letter has
    /// no jets (`D(x) = 1` instead).
    pub fn jet(field: Field, order: u32) -> Self {
        assert!(
            !(field == Field::X && order > 0),
            "the x letter has no jet prolongation"
        );
        DiffPoly::var(JetVar::new(field, order))
    }

    pub fn var(v: JetVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), KappaScalar::one());
        DiffPoly { terms }
    }

    /// Shorthand for the base KdV field `u`.
    pub fn u() -> Self {
        DiffPoly::jet(Field::U(0), 0)
    }

    /// `u` differentiated `n` times.
    pub fn u_der(n: u32) -> Self {
        DiffPoly::jet(Field::U(0), n)
    }

    pub fn x() -> Self {
        DiffPoly::jet(Field::X, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&Monomial::one()).is_some_and(KappaScalar::is_one)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &KappaScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, m: Monomial, c: KappaScalar) {
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

    pub fn mul_scalar(&self, c: &KappaScalar) -> Self {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        let mut out = DiffPoly::zero();
        for (m, v) in &self.terms {
            out.insert_add(m.clone(), v * c);
        }
        out
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        self.mul_scalar(&KappaScalar::from_rational(c.clone()))
    }

    pub fn mul_kappa_pow(&self, e: u32) -> Self {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul_kappa_pow(e)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = DiffPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The coefficient of the empty monomial.
    pub fn constant_term(&self) -> KappaScalar {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(KappaScalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Some(rational) when the polynomial is a plain `k`-free constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if !self.is_constant() {
            return None;
        }
        self.constant_term().as_rational()
    }

    /// All dependent `U` fields occurring in the polynomial.
    pub fn base_fields(&self) -> BTreeSet<Field> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.iter() {
                if matches!(v.field, Field::U(_)) {
                    out.insert(v.field);
                }
            }
        }
        out
    }

    pub fn contains_x(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.iter().any(|(v, _)| v.field == Field::X))
    }

    /// Maximum jet order of `field` occurring, if any.
    pub fn max_order(&self, field: Field) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .filter(|(v, _)| v.field == field)
            .map(|(v, _)| v.order)
            .max()
    }

    /// The total derivative `D` with respect to `x`.
    ///
    /// Linear derivation with `D(u^(j)) = u^(j+1)` and `D(x) = 1`; constants
    /// (including `k`) are killed.
    pub fn total_x_derivative(&self) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (v, e) in m.iter() {
                let rest = m.reduce(v).expect("variable present");
                let factor = c.mul_rational(&Rational::from_int(e as i64));
                match v.field {
                    Field::X => out.insert_add(rest, factor),
                    Field::U(_) => {
                        let raised = rest.mul(&Monomial::var(JetVar::new(v.field, v.order + 1)));
                        out.insert_add(raised, factor);
                    }
                }
            }
        }
        out
    }

    pub fn nth_x_derivative(&self, n: u32) -> Self {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.total_x_derivative();
        }
        acc
    }

    /// Formal partial derivative with respect to a single jet variable.
    pub fn partial(&self, v: &JetVar) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let rest = m.reduce(v).expect("exponent checked");
            out.insert_add(rest, c.mul_rational(&Rational::from_int(e as i64)));
        }
        out
    }

    /// The variational (Euler) derivative with respect to a base field:
    /// `sum_i (-1)^i D^i (d f / d u^(i))`.
    pub fn variational_derivative(&self, field: Field) -> Self {
        assert!(matches!(field, Field::U(_)), "variational derivative of a U field");
        let top = match self.max_order(field) {
            Some(j) => j,
            None => return DiffPoly::zero(),
        };
        let mut acc = DiffPoly::zero();
        for i in 0..=top {
            let term = self
                .partial(&JetVar::new(field, i))
                .nth_x_derivative(i);
            if i % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        acc
    }

    /// Equality modulo the image of the total derivative.
    ///
    /// For `x`-free differential polynomials with zero constant term,
    /// membership of `f - g` in `im(D)` is exactly the vanishing of every
    /// variational derivative. Nonzero constants are never total derivatives
    /// here (decaying-profile convention), and explicit `x`-dependence is
    /// outside the trace calculus: such differences compare equal only when
    /// identical.
    pub fn equals_mod_total_derivative(f: &DiffPoly, g: &DiffPoly) -> bool {
        let d = f - g;
        if d.is_zero() {
            return true;
        }
        if !d.constant_term().is_zero() {
            return false;
        }
        if d.contains_x() {
            return false;
        }
        d.base_fields()
            .into_iter()
            .all(|v| d.variational_derivative(v).is_zero())
    }

    /// Substitutes an exact value for `k` in every coefficient.
    pub fn substitute_kappa(&self, value: &Rational) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.insert_add(
                m.clone(),
                KappaScalar::from_rational(c.substitute_kappa(value)),
            );
        }
        out
    }

    /// Replaces base fields by differential polynomials, prolonging jets:
    /// `(f, j)` goes to `D^j(map[f])`. Fields absent from the map stay.
    pub fn substitute_fields(&self, map: &BTreeMap<Field, DiffPoly>) -> Self {
        let mut der_cache: BTreeMap<(Field, u32), DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut term = DiffPoly::constant(c.clone());
            for (v, e) in m.iter() {
                let factor = if let Some(repl) = map.get(&v.field) {
                    der_cache
                        .entry((v.field, v.order))
                        .or_insert_with(|| repl.nth_x_derivative(v.order))
                        .clone()
                } else {
                    DiffPoly::var(*v)
                };
                term = &term * &factor.pow(e);
            }
            out = &out + &term;
        }
        out
    }

    /// Time derivative along a flow: chain rule through every jet variable,
    /// with `d/dt (u^(j)) = D^j(rhs_u)`.
    pub fn time_derivative(&self, rhs: &BTreeMap<Field, DiffPoly>) -> Self {
        let mut out = DiffPoly::zero();
        let mut vars = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.iter() {
                vars.insert(*v);
            }
        }
        for v in vars {
            if let Some(r) = rhs.get(&v.field) {
                let chain = &self.partial(&v) * &r.nth_x_derivative(v.order);
                out = &out + &chain;
            }
        }
        out
    }

    /// Set of homogeneous weights present, where a monomial weighs
    /// `sum jet_weight(v) * exp + kappa_weight * deg_k`.
    ///
    /// Empty for the zero polynomial; a singleton means homogeneous.
    pub fn weights(
        &self,
        jet_weight: &dyn Fn(&JetVar) -> i64,
        kappa_weight: i64,
    ) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for (m, c) in &self.terms {
            let base: i64 = m.iter().map(|(v, e)| jet_weight(v) * e as i64).sum();
            for (e, _) in c.iter() {
                out.insert(base + kappa_weight * e as i64);
            }
        }
        out
    }

    /// Weights under the scaling grading (`u^(j)` at `j+2`, `k` inert).
    pub fn scaling_weights(&self) -> BTreeSet<i64> {
        self.weights(&|v| v.scaling_weight(), 0)
    }

    /// Weights under the dispersion grading (`u^(j)` at 2 regardless of `j`,
    /// `k` at 1); detects wrong `k`-powers that the scaling grading misses.
    pub fn kappa_weights(&self) -> BTreeSet<i64> {
        self.weights(
            &|v| match v.field {
                Field::U(_) => 2,
                Field::X => 0,
            },
            1,
        )
    }

    /// Exact division of every coefficient by `d * k`.
    ///
    /// `None` when some coefficient has a `k`-free part; bracket callers
    /// assert this never happens.
    pub fn div_kappa_exact(&self, d: &Rational) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), c.div_kappa_exact(d)?);
        }
        Some(DiffPoly { terms })
    }

    /// Smallest `r` such that all `x`-derivatives of order `>= r` vanish,
    /// or `None` when the chain never dies (any `U` jet present).
    pub fn derivative_chain_zero_after(&self) -> Option<u32> {
        if self.is_zero() {
            return Some(0);
        }
        let mut deg_x = 0u32;
        for m in self.terms.keys() {
            for (v, e) in m.iter() {
                match v.field {
                    Field::U(_) => return None,
                    Field::X => deg_x = deg_x.max(e),
                }
            }
        }
        // x^d dies after d+1 derivatives; constants after one.
        Some(deg_x + 1)
    }

    /// Terms in canonical rendering order (descending).
    pub fn render_terms(&self) -> Vec<(&Monomial, &KappaScalar)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.render_key_cmp(a));
        terms
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), -c);
        }
        out
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert_add(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

/// One term rendered as `(is_negative, magnitude text)`; shared with the
/// symbol renderer so coefficient formatting stays identical everywhere.
pub fn render_term(m: &Monomial, c: &KappaScalar, latex: bool) -> (bool, String) {
    let mut factors: Vec<String> = Vec::new();
    let negative;
    match c.as_monomial() {
        Some((r, e)) => {
            negative = r.is_negative();
            let mag = r.abs();
            let show_mag = !mag.is_one() || (e == 0 && m.is_one());
            if show_mag {
                factors.push(if latex { mag.latex() } else { mag.to_string() });
            }
            if e > 0 {
                factors.push(match (latex, e) {
                    (false, 1) => "k".into(),
                    (false, _) => format!("k^{e}"),
                    (true, 1) => "\\kappa".into(),
                    (true, _) => format!("\\kappa^{e}"),
                });
            }
        }
        None => {
            negative = false;
            let inner = if latex { c.latex() } else { c.to_string() };
            factors.push(format!("({inner})"));
        }
    }
    for (v, e) in m.iter() {
        let name = if latex { v.latex() } else { v.name() };
        if e == 1 {
            factors.push(name);
        } else {
            factors.push(format!("{name}^{e}"));
        }
    }
    (negative, factors.join(" "))
}

impl DiffPoly {
    pub fn text(&self) -> String {
        self.render(false)
    }

    pub fn latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.render_terms().into_iter().enumerate() {
            let (neg, body) = render_term(m, c, latex);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}
