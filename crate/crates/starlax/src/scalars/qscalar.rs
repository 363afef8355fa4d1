//! Rational functions in `q` over [`Rational`], reduced with monic denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Rational;

/// Dense univariate polynomial in `q` over [`Rational`].
///
/// Coefficients ascending in degree, trailing zeros trimmed; the zero
/// polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::from_coeffs(vec![Rational::one()])
    }

    /// The letter `q`.
    pub fn q() -> Self {
        QPoly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = QPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Rational::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly::from_coeffs(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// `q^e` for `e >= 0`.
    pub fn q_pow(e: u32) -> Self {
        let mut coeffs = vec![Rational::zero(); e as usize + 1];
        coeffs[e as usize] = Rational::one();
        QPoly::from_coeffs(coeffs)
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v + c;
        }
        acc
    }

    /// Polynomial long division: `(quotient, remainder)`. Panics if `d` is zero.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / &lead;
            let shift = rd - dd;
            quot[shift] = factor.clone();
            // rem -= factor * q^shift * d
            let mut new = rem.coeffs.clone();
            for (i, c) in d.coeffs.iter().enumerate() {
                let idx = i + shift;
                new[idx] = &new[idx] - &(c * &factor);
            }
            rem = QPoly::from_coeffs(new);
        }
        (QPoly::from_coeffs(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.leading() {
            let inv = l.recip();
            a = a.scale(&inv);
        }
        a
    }
}

impl Add<&QPoly> for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(&self.coeff(i) + &rhs.coeff(i));
        }
        QPoly::from_coeffs(coeffs)
    }
}

impl Sub<&QPoly> for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(&self.coeff(i) - &rhs.coeff(i));
        }
        QPoly::from_coeffs(coeffs)
    }
}

impl Mul<&QPoly> for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        QPoly::from_coeffs(coeffs)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for QPoly {
    /// Ascending in `q`, e.g. `1 + q + q^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.iter() {
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
            match e {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "q")?,
                1 => write!(f, "{mag}*q")?,
                _ if mag.is_one() => write!(f, "q^{e}")?,
                _ => write!(f, "{mag}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rational function in `q`: `num/den`, fully reduced, `den` monic.
///
/// The canonical form (gcd-reduced, monic denominator) makes equality a
/// structural check. Houses `q`, the q-integers `(n)_q` and q-binomials.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QScalar {
    num: QPoly,
    den: QPoly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: QPoly::zero(), den: QPoly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: QPoly::one(), den: QPoly::one() }
    }

    pub fn q() -> Self {
        QScalar::from_poly(QPoly::q())
    }

    pub fn from_poly(p: QPoly) -> Self {
        QScalar { num: p, den: QPoly::one() }
    }

    pub fn from_rational(c: Rational) -> Self {
        QScalar::from_poly(QPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_rational(Rational::from_int(n))
    }

    /// Builds `num/den` in canonical form. Panics if `den` is zero.
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "QScalar with zero denominator");
        if num.is_zero() {
            return QScalar::zero();
        }
        let g = num.gcd(&den);
        let (mut num, r1) = num.divrem(&g);
        debug_assert!(r1.is_zero());
        let (mut den, r2) = den.divrem(&g);
        debug_assert!(r2.is_zero());
        let lead = den.leading().expect("nonzero denominator").clone();
        let inv = lead.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
        QScalar { num, den }
    }

    /// `q^e` for any integer `e` (negative exponents go to the denominator).
    pub fn q_pow(e: i64) -> Self {
        if e >= 0 {
            QScalar::from_poly(QPoly::q_pow(e as u32))
        } else {
            QScalar::new(QPoly::one(), QPoly::q_pow((-e) as u32))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    pub fn denominator(&self) -> &QPoly {
        &self.den
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero QScalar");
        QScalar::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = QScalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Evaluates at `q = value`; `None` when the reduced denominator vanishes.
    pub fn substitute_q(&self, value: &Rational) -> Option<Rational> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(value) / d)
    }

    /// The q-integer `(n)_q = (q^n - 1)/(q - 1)` for any integer `n`.
    ///
    /// For `n >= 0` this reduces to the polynomial `1 + q + ... + q^{n-1}`.
    pub fn q_number(n: i64) -> Self {
        if n >= 0 {
            let coeffs = vec![Rational::one(); n as usize];
            QScalar::from_poly(QPoly::from_coeffs(coeffs))
        } else {
            // (q^n - 1)/(q - 1) = -(1 + q + ... + q^{|n|-1}) / q^{|n|}
            let m = (-n) as u32;
            let num = -&QPoly::from_coeffs(vec![Rational::one(); m as usize]);
            QScalar::new(num, QPoly::q_pow(m))
        }
    }

    /// The q-binomial `[m k]_q = (m)_q (m-1)_q ... (m-k+1)_q / ((1)_q ... (k)_q)`.
    ///
    /// The falling-factorial numerator permits negative upper index `m`.
    pub fn q_binomial(m: i64, k: u32) -> Self {
        let mut acc = QScalar::one();
        for t in 0..k as i64 {
            acc = &acc * &QScalar::q_number(m - t);
            acc = &acc / &QScalar::q_number(t + 1);
        }
        acc
    }
}

impl Add<&QScalar> for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        QScalar::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&QScalar> for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        QScalar::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul<&QScalar> for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        QScalar::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div<&QScalar> for &QScalar {
    type Output = QScalar;
    fn div(self, rhs: &QScalar) -> QScalar {
        assert!(!rhs.is_zero(), "division by zero QScalar");
        QScalar::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for QScalar {
    /// `(num)/(den)`, or just the numerator when the denominator is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
