//! Operator words in the shift `T` and q-derivative `dq`, kept in normal
//! form (coefficients left of all letters), with truncation bookkeeping for
//! the infinite expansions of negative `dq` powers.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalars::QScalar;
use crate::symbols::Floor;

use super::laurent::QLaurent;

/// Errors of the q-operator calculus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QcalcError {
    /// `dq^-1` met an `x^-1` term, which has no Laurent antiderivative.
    NotIntegrable,
    /// An exact normal form was requested but a negative `dq` power expands
    /// into an infinite tail; supply a finite floor.
    InfiniteTail,
    /// The requested floor lies below what the operand tracking supports.
    FloorTooDeep { required: i64 },
    /// The coefficient list is too short for the requested index.
    InsufficientCoefficients { needed: usize, have: usize },
}

impl fmt::Display for QcalcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QcalcError::NotIntegrable => {
                write!(f, "dq^-1 applied to an x^-1 term (not integrable in Laurent polynomials)")
            }
            QcalcError::InfiniteTail => {
                write!(f, "negative dq power expands into an infinite tail; a finite floor is required")
            }
            QcalcError::FloorTooDeep { required } => write!(
                f,
                "requested floor is below the reliable range; words are only tracked at dq powers >= {required}"
            ),
            QcalcError::InsufficientCoefficients { needed, have } => {
                write!(f, "coefficient list has {have} entries, index {needed} requested")
            }
        }
    }
}

impl std::error::Error for QcalcError {}

/// One parsed factor of an operator expression.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QAtom {
    Coeff(QLaurent),
    Tau(i64),
    Dq(i64),
}

/// A q-operator in normal form: a finite sum of words
/// `coefficient . T^a . dq^b`, keyed by `(a, b)`. Words with `dq`-power
/// below a finite floor are untracked.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QOperator {
    words: BTreeMap<(i64, i64), QLaurent>,
    floor: Floor,
}

impl QOperator {
    pub fn zero() -> Self {
        QOperator { words: BTreeMap::new(), floor: Floor::Exact }
    }

    pub fn identity() -> Self {
        QOperator::word(QLaurent::one(), 0, 0)
    }

    /// The single word `c . T^a . dq^b`.
    pub fn word(c: QLaurent, tau: i64, dq: i64) -> Self {
        let mut words = BTreeMap::new();
        if !c.is_zero() {
            words.insert((tau, dq), c);
        }
        QOperator { words, floor: Floor::Exact }
    }

    pub fn coeff(c: QLaurent) -> Self {
        QOperator::word(c, 0, 0)
    }

    pub fn tau(a: i64) -> Self {
        QOperator::word(QLaurent::one(), a, 0)
    }

    pub fn dq(b: i64) -> Self {
        QOperator::word(QLaurent::one(), 0, b)
    }

    pub fn from_atom(atom: &QAtom) -> Self {
        match atom {
            QAtom::Coeff(c) => QOperator::coeff(c.clone()),
            QAtom::Tau(a) => QOperator::tau(*a),
            QAtom::Dq(b) => QOperator::dq(*b),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn floor(&self) -> Floor {
        self.floor
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &QLaurent)> {
        self.words.iter().map(|(&k, c)| (k, c))
    }

    pub fn get(&self, tau: i64, dq: i64) -> QLaurent {
        self.words.get(&(tau, dq)).cloned().unwrap_or_else(QLaurent::zero)
    }

    /// Highest `dq` power present.
    pub fn top_dq(&self) -> Option<i64> {
        self.words.keys().map(|&(_, b)| b).max()
    }

    fn insert_add(&mut self, key: (i64, i64), c: QLaurent) {
        use std::collections::btree_map::Entry;
        if c.is_zero() || !self.floor.admits(key.1) {
            return;
        }
        match self.words.entry(key) {
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

    pub fn add(&self, other: &QOperator) -> QOperator {
        let mut out = QOperator { words: BTreeMap::new(), floor: self.floor.combine(other.floor) };
        for (k, c) in self.iter().chain(other.iter()) {
            out.insert_add(k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QOperator) -> QOperator {
        let mut out = QOperator { words: BTreeMap::new(), floor: self.floor.combine(other.floor) };
        for (k, c) in self.iter() {
            out.insert_add(k, c.clone());
        }
        for (k, c) in other.iter() {
            out.insert_add(k, -c);
        }
        out
    }

    pub fn scale(&self, c: &QScalar) -> QOperator {
        QOperator {
            words: self.words.iter().map(|(&k, v)| (k, v.scale(c))).collect(),
            floor: self.floor,
        }
    }

    /// Applies the operator to a Laurent polynomial, word by word
    /// (rightmost letter first: `dq` powers, then the shift, then the
    /// coefficient).
    pub fn apply(&self, f: &QLaurent) -> Result<QLaurent, QcalcError> {
        let mut out = QLaurent::zero();
        for (&(a, b), c) in &self.words {
            let mut g = f.clone();
            if b >= 0 {
                for _ in 0..b {
                    g = g.dq();
                }
            } else {
                for _ in 0..(-b) {
                    g = g.dq_inverse()?;
                }
            }
            g = g.apply_tau(a);
            out = &out + &(c * &g);
        }
        Ok(out)
    }

    /// Composition `self . other` in normal form.
    ///
    /// Moving `dq^b` past a coefficient uses the generalized Leibniz
    /// expansion `dq^b u = sum_k [b k]_q (T^{b-k} dq^k u) dq^{b-k}`, which
    /// for negative `b` is an infinite series truncated at the requested
    /// floor; the exchange `dq T = q T dq` handles the shifts.
    pub fn mul(&self, other: &QOperator, want: Floor) -> Result<QOperator, QcalcError> {
        // contamination: untracked words of one side meet stored words of
        // the other at dq powers up to floor - 1 + top.
        let mut bound: Option<i64> = None;
        let mut push = |b: i64| bound = Some(bound.map_or(b, |old: i64| old.max(b)));
        if let Floor::At(mf) = self.floor {
            if let Some(nb) = other.top_dq() {
                push(mf + nb);
            }
            if let Floor::At(mg) = other.floor {
                push(mf + mg - 1);
            }
        }
        if let Floor::At(mg) = other.floor {
            if let Some(na) = self.top_dq() {
                push(mg + na);
            }
        }
        match (want, bound) {
            (Floor::At(r), Some(b)) if r < b => {
                return Err(QcalcError::FloorTooDeep { required: b })
            }
            (Floor::Exact, Some(b)) => return Err(QcalcError::FloorTooDeep { required: b }),
            _ => {}
        }

        let mut out = QOperator { words: BTreeMap::new(), floor: want };
        for (&(a1, b1), c1) in &self.words {
            for (&(a2, b2), c2) in &other.words {
                // k-range: Leibniz index
                let k_hi = match (b1 >= 0, c2.dq_chain_zero_after(), want) {
                    (true, Some(z), _) => (b1 as u32).min(z),
                    (true, None, _) => b1 as u32,
                    (false, Some(z), Floor::Exact) => z,
                    (false, None, Floor::Exact) => return Err(QcalcError::InfiniteTail),
                    (false, chain, Floor::At(r)) => {
                        if b1 + b2 < r {
                            continue;
                        }
                        let cap = (b1 + b2 - r) as u32;
                        chain.map_or(cap, |z| z.min(cap))
                    }
                };
                let mut dkc2 = c2.clone();
                for k in 0..=k_hi {
                    if k > 0 {
                        dkc2 = dkc2.dq();
                    }
                    if dkc2.is_zero() {
                        break;
                    }
                    let qbin = QScalar::q_binomial(b1, k);
                    if qbin.is_zero() {
                        continue;
                    }
                    let moved = dkc2.apply_tau(a1 + b1 - k as i64);
                    let exchange = QScalar::q_pow((b1 - k as i64) * a2);
                    let coeff = (c1 * &moved).scale(&(&qbin * &exchange));
                    out.insert_add((a1 + a2, b1 - k as i64 + b2), coeff);
                }
            }
        }
        Ok(out)
    }

    /// Substitutes `q = 1` in every word coefficient (when defined).
    pub fn substitute_q(
        &self,
        value: &crate::scalars::Rational,
    ) -> Option<BTreeMap<(i64, i64), BTreeMap<i64, crate::scalars::Rational>>> {
        let mut out = BTreeMap::new();
        for (&k, c) in &self.words {
            let v = c.substitute_q(value)?;
            if !v.is_empty() {
                out.insert(k, v);
            }
        }
        Some(out)
    }
}

/// Normal form of a product of atoms, at the requested floor.
pub fn normal_form_of(atoms: &[QAtom], want: Floor) -> Result<QOperator, QcalcError> {
    let mut acc = QOperator::identity();
    for atom in atoms {
        acc = acc.mul(&QOperator::from_atom(atom), want)?;
    }
    Ok(acc)
}

/// Direct action of an atom word on a function, rightmost atom first; the
/// oracle against which normal forms are checked.
pub fn apply_atoms(atoms: &[QAtom], f: &QLaurent) -> Result<QLaurent, QcalcError> {
    let mut g = f.clone();
    for atom in atoms.iter().rev() {
        g = match atom {
            QAtom::Coeff(c) => c * &g,
            QAtom::Tau(a) => g.apply_tau(*a),
            QAtom::Dq(b) => {
                let mut h = g;
                if *b >= 0 {
                    for _ in 0..*b {
                        h = h.dq();
                    }
                } else {
                    for _ in 0..(-b) {
                        h = h.dq_inverse()?;
                    }
                }
                h
            }
        };
    }
    Ok(g)
}

/// `A B - B A` in normal form.
pub fn q_commutator(a: &QOperator, b: &QOperator, want: Floor) -> Result<QOperator, QcalcError> {
    Ok(a.mul(b, want)?.sub(&b.mul(a, want)?))
}

/// Which binomial the discrete-map bracket denotes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BinomialConvention {
    /// Gaussian `[k+i, k]_q` (default reading).
    QBracket,
    /// Ordinary `C(k+i, k)`.
    Ordinary,
}

/// The triangular discrete-hierarchy coefficient map
/// `a_i = sum_{0<=k<=n-i} [k+i, k] / (-y (q-1) q^i)^k . b_{k+i}`,
/// with the evaluation letter `y` carried as the Laurent variable.
pub fn discrete_kp_map(
    b: &[QLaurent],
    n: usize,
    convention: BinomialConvention,
) -> Result<Vec<QLaurent>, QcalcError> {
    if b.len() <= n {
        return Err(QcalcError::InsufficientCoefficients { needed: n, have: b.len() });
    }
    let qm1 = &QScalar::q() - &QScalar::one();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = QLaurent::zero();
        for k in 0..=(n - i) {
            let bracket = match convention {
                BinomialConvention::QBracket => QScalar::q_binomial((k + i) as i64, k as u32),
                BinomialConvention::Ordinary => QScalar::from_rational(
                    crate::scalars::Rational::binomial((k + i) as i64, k as u32),
                ),
            };
            // 1 / (-y (q-1) q^i)^k = (-1)^k (q-1)^-k q^-ik y^-k
            let mut scalar = &bracket / &qm1.pow(k as i32);
            scalar = &scalar * &QScalar::q_pow(-((i * k) as i64));
            if k % 2 == 1 {
                scalar = -&scalar;
            }
            let term = b[k + i].scale(&scalar).shift(-(k as i64));
            acc = &acc + &term;
        }
        out.push(acc);
    }
    Ok(out)
}

impl fmt::Display for QOperator {
    /// Words by descending `dq` power, e.g. `q^2 x^2 dq^2 + (1 + q) x dq`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut words: Vec<(&(i64, i64), &QLaurent)> = self.words.iter().collect();
        words.sort_by(|((a1, b1), _), ((a2, b2), _)| b2.cmp(b1).then(a2.cmp(a1)));
        let mut first = true;
        for (&(a, b), c) in words {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || (a == 0 && b == 0) {
                let body = c.to_string();
                if c.iter().count() > 1 {
                    factors.push(format!("({body})"));
                } else {
                    factors.push(body);
                }
            }
            match a {
                0 => {}
                1 => factors.push("T".into()),
                _ => factors.push(format!("T^{a}")),
            }
            match b {
                0 => {}
                1 => factors.push("dq".into()),
                _ => factors.push(format!("dq^{b}")),
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rational;

    fn x(m: i64) -> QLaurent {
        QLaurent::x_pow(m)
    }

    #[test]
    fn leibniz_single_step() {
        // dq . u = (dq u) + T(u) dq with a concrete u = x^2
        let op = QOperator::dq(1).mul(&QOperator::coeff(x(2)), Floor::Exact).unwrap();
        assert_eq!(op.get(0, 0), x(2).dq());
        assert_eq!(op.get(0, 1), x(2).apply_tau(1));
        assert_eq!(op.iter().count(), 2);
    }

    #[test]
    fn leibniz_second_order() {
        // dq^2 . u = (dq^2 u) + (2)_q T(dq u) dq + T^2(u) dq^2
        let op = QOperator::dq(2).mul(&QOperator::coeff(x(3)), Floor::Exact).unwrap();
        assert_eq!(op.get(0, 0), x(3).dq().dq());
        assert_eq!(op.get(0, 1), x(3).dq().apply_tau(1).scale(&QScalar::q_number(2)));
        assert_eq!(op.get(0, 2), x(3).apply_tau(2));
    }

    #[test]
    fn exchange_rule() {
        // dq T = q T dq
        let lhs = QOperator::dq(1).mul(&QOperator::tau(1), Floor::Exact).unwrap();
        let rhs = QOperator::word(QLaurent::constant(QScalar::q()), 1, 1);
        assert_eq!(lhs, rhs);
        // and on functions: (dq T - q T dq) x^m = 0
        let comm = lhs.sub(&rhs);
        for m in 0..=6 {
            assert!(comm.apply(&x(m)).unwrap().is_zero());
        }
    }

    #[test]
    fn normal_form_is_action_preserving() {
        let word = vec![
            QAtom::Coeff(x(1)),
            QAtom::Dq(2),
            QAtom::Coeff(&x(2) + &x(0)),
            QAtom::Tau(1),
            QAtom::Dq(1),
        ];
        let op = normal_form_of(&word, Floor::Exact).unwrap();
        for m in 0..=6 {
            assert_eq!(
                op.apply(&x(m)).unwrap(),
                apply_atoms(&word, &x(m)).unwrap(),
                "m = {m}"
            );
        }
    }

    #[test]
    fn negative_power_expansion() {
        // the words of dq^-1 . u follow [(-1) k]_q = (-1)^k q^{-k(k+1)/2};
        // for polynomial u the dq-chain dies and the expansion is finite
        let u = x(2);
        let exact = QOperator::dq(-1).mul(&QOperator::coeff(u.clone()), Floor::Exact).unwrap();
        assert_eq!(exact.iter().count(), 3);
        // a coefficient with a negative power never stops expanding
        let err = QOperator::dq(-1).mul(&QOperator::coeff(x(-2)), Floor::Exact);
        assert_eq!(err, Err(QcalcError::InfiniteTail));
        let op = QOperator::dq(-1).mul(&QOperator::coeff(u.clone()), Floor::At(-4)).unwrap();
        for k in 0..=3u32 {
            let expect_scalar = {
                let sign = if k % 2 == 1 { -&QScalar::one() } else { QScalar::one() };
                &sign * &QScalar::q_pow(-((k * (k + 1) / 2) as i64))
            };
            let expect = {
                let mut d = u.clone();
                for _ in 0..k {
                    d = d.dq();
                }
                d.apply_tau(-1 - k as i64).scale(&expect_scalar)
            };
            assert_eq!(op.get(0, -1 - k as i64), expect, "k = {k}");
        }
        // composed with dq . u it reproduces plain multiplication by u above the floor
        let dqu = QOperator::dq(1).mul(&QOperator::coeff(u.clone()), Floor::Exact).unwrap();
        let composed = QOperator::dq(-1).mul(&dqu, Floor::At(-4)).unwrap();
        assert_eq!(composed.get(0, 0), u);
        for ((a, b), c) in composed.iter() {
            if (a, b) != (0, 0) {
                panic!("unexpected residual word T^{a} dq^{b}: {c}");
            }
        }
    }

    #[test]
    fn commutator_of_monomial_words() {
        // [x dq, x^2 dq] = q x^2 dq + (q^2 - q) x^3 dq^2
        let a = QOperator::word(x(1), 0, 1);
        let b = QOperator::word(x(2), 0, 1);
        let c = q_commutator(&a, &b, Floor::Exact).unwrap();
        assert_eq!(c.get(0, 1), x(2).scale(&QScalar::q()));
        let q2mq = &QScalar::q_pow(2) - &QScalar::q();
        assert_eq!(c.get(0, 2), x(3).scale(&q2mq));
        assert_eq!(c.iter().count(), 2);
        // self-commutator vanishes
        assert!(q_commutator(&a, &a, Floor::Exact).unwrap().is_zero());
    }

    #[test]
    fn q_one_degeneration() {
        // dq^n . x^j applied to x^m, at q = 1, is the classical n-th
        // derivative of x^{j+m}
        for (n, j, m) in [(1i64, 2i64, 3i64), (2, 1, 4), (3, 3, 2)] {
            let op = QOperator::dq(n).mul(&QOperator::coeff(x(j)), Floor::Exact).unwrap();
            let applied = op.apply(&x(m)).unwrap();
            let at1 = applied.substitute_q(&Rational::one()).unwrap();
            let classical = Rational::falling(j + m, n as u32);
            let mut expect = BTreeMap::new();
            if !classical.is_zero() {
                expect.insert(j + m - n, classical);
            }
            assert_eq!(at1, expect, "n={n} j={j} m={m}");
        }
    }

    #[test]
    fn discrete_map_shape() {
        let b: Vec<QLaurent> = (0..=3).map(|i| QLaurent::monomial(QScalar::from_int(i + 1), i)).collect();
        let a = discrete_kp_map(&b, 3, BinomialConvention::QBracket).unwrap();
        // top of the triangle: a_n = b_n
        assert_eq!(a[3], b[3]);
        // next row: a_2 = b_2 + [3 1]_q / (-y(q-1)q^2) b_3
        let expect = {
            let scalar = -&(&QScalar::q_binomial(3, 1)
                / &(&(&QScalar::q() - &QScalar::one()) * &QScalar::q_pow(2)));
            &b[2] + &b[3].scale(&scalar).shift(-1)
        };
        assert_eq!(a[2], expect);
        // linearity
        let b2: Vec<QLaurent> = b.iter().map(|f| f.scale(&QScalar::from_int(3))).collect();
        let sum: Vec<QLaurent> = b.iter().zip(&b2).map(|(f, g)| f + g).collect();
        let left = discrete_kp_map(&sum, 3, BinomialConvention::QBracket).unwrap();
        let right: Vec<QLaurent> = discrete_kp_map(&b, 3, BinomialConvention::QBracket)
            .unwrap()
            .iter()
            .zip(discrete_kp_map(&b2, 3, BinomialConvention::QBracket).unwrap().iter())
            .map(|(f, g)| f + g)
            .collect();
        assert_eq!(left, right);
        // ordinary-binomial convention agrees at q -> 1 on the brackets
        let ord = discrete_kp_map(&b, 3, BinomialConvention::Ordinary).unwrap();
        assert_eq!(ord[3], b[3]);
    }

    #[test]
    fn triangularity() {
        // a_i depends only on b_{>= i}: zeroing the head leaves the tail map
        let b: Vec<QLaurent> = (0..=3).map(|i| QLaurent::x_pow(i)).collect();
        let mut headless = b.clone();
        headless[0] = QLaurent::zero();
        headless[1] = QLaurent::zero();
        let a = discrete_kp_map(&b, 3, BinomialConvention::QBracket).unwrap();
        let ah = discrete_kp_map(&headless, 3, BinomialConvention::QBracket).unwrap();
        assert_eq!(a[2], ah[2]);
        assert_eq!(a[3], ah[3]);
    }
}
