//! Exponential sums and the bilinear derivative calculus acting on them.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalars::Rational;

use super::mpoly::MPoly;
use super::schur::{schur_polys, time_var, TimeMono};

/// Wave vector of one exponential: finite map time-index -> coefficient.
pub type WaveVec = BTreeMap<u32, Rational>;

/// A finite sum `sum c * exp(sum k_n t_n)` of exponentials in the hierarchy
/// times. Terms with equal wave vectors are merged; zero coefficients drop.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExpSum {
    terms: BTreeMap<WaveVec, Rational>,
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum::default()
    }

    pub fn one() -> Self {
        ExpSum::term(Rational::one(), WaveVec::new())
    }

    /// `c * exp(k . t)`.
    pub fn term(c: Rational, wave: WaveVec) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            let wave: WaveVec = wave.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            terms.insert(wave, c);
        }
        ExpSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WaveVec, &Rational)> {
        self.terms.iter()
    }

    pub fn insert_add(&mut self, wave: WaveVec, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        let wave: WaveVec = wave.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        match self.terms.entry(wave) {
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

    pub fn add(&self, other: &ExpSum) -> ExpSum {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> ExpSum {
        if c.is_zero() {
            return ExpSum::zero();
        }
        ExpSum {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// The one-soliton tau function `1 + c exp(eta)` with the dispersion
    /// wave vector `k_j = a^j - b^j` for `j = 1..=top`.
    pub fn one_soliton(a: &Rational, b: &Rational, c: &Rational, top: u32) -> ExpSum {
        let mut wave = WaveVec::new();
        for j in 1..=top {
            let kj = a.pow(j as i32) - b.pow(j as i32);
            if !kj.is_zero() {
                wave.insert(j, kj);
            }
        }
        ExpSum::one().add(&ExpSum::term(c.clone(), wave))
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            if w.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            let body: Vec<String> = w
                .iter()
                .map(|(j, k)| {
                    if k.is_one() {
                        format!("t{j}")
                    } else if (-k).is_one() {
                        format!("-t{j}")
                    } else {
                        format!("{k} t{j}")
                    }
                })
                .collect();
            write!(f, "exp({})", body.join(" + "))?;
        }
        Ok(())
    }
}

/// A polynomial in the bilinear derivative letters `D1, D2, ...`,
/// represented by its exponent monomials; it acts on pairs of exponential
/// sums through the pure-exponential rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HirotaPoly {
    terms: MPoly<TimeMono>,
}

impl HirotaPoly {
    pub fn zero() -> Self {
        HirotaPoly { terms: MPoly::zero() }
    }

    /// The single letter `D_j`.
    pub fn d(j: u32) -> Self {
        HirotaPoly { terms: MPoly::var(time_var(j)) }
    }

    pub fn from_mpoly(terms: MPoly<TimeMono>) -> Self {
        HirotaPoly { terms }
    }

    pub fn mpoly(&self) -> &MPoly<TimeMono> {
        &self.terms
    }

    pub fn add(&self, o: &HirotaPoly) -> Self {
        HirotaPoly { terms: &self.terms + &o.terms }
    }

    pub fn sub(&self, o: &HirotaPoly) -> Self {
        HirotaPoly { terms: &self.terms - &o.terms }
    }

    pub fn mul(&self, o: &HirotaPoly) -> Self {
        HirotaPoly { terms: &self.terms * &o.terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HirotaPoly { terms: self.terms.scale(c) }
    }

    /// Substitutes a time polynomial with `t_j -> D_j / j` (the scaled
    /// letter alphabet used by the bilinear equations).
    pub fn from_time_poly_scaled(p: &MPoly<TimeMono>) -> Self {
        let mut out = MPoly::zero();
        for (m, c) in p.iter() {
            let mut scale = c.clone();
            for (&j, &e) in m {
                scale = scale * Rational::from_int(j as i64).recip().pow(e as i32);
            }
            out.insert_add(m.clone(), scale);
        }
        HirotaPoly { terms: out }
    }

    /// Bilinear action: a `D`-monomial on a pair of pure exponentials with
    /// wave vectors `k`, `l` multiplies by `prod_j (k_j - l_j)^{e_j}` and
    /// lands on the exponential with wave vector `k + l`.
    pub fn apply(&self, a: &ExpSum, b: &ExpSum) -> ExpSum {
        let mut out = ExpSum::zero();
        for (m, c) in self.terms.iter() {
            for (ka, ca) in a.iter() {
                for (lb, cb) in b.iter() {
                    let mut factor = c * ca;
                    factor *= cb;
                    for (&j, &e) in m {
                        let kj = ka.get(&j).cloned().unwrap_or_else(Rational::zero);
                        let lj = lb.get(&j).cloned().unwrap_or_else(Rational::zero);
                        factor *= &(kj - lj).pow(e as i32);
                        if factor.is_zero() {
                            break;
                        }
                    }
                    if factor.is_zero() {
                        continue;
                    }
                    let mut wave = ka.clone();
                    for (&j, v) in lb {
                        let slot = wave.entry(j).or_insert_with(Rational::zero);
                        *slot += v;
                    }
                    out.insert_add(wave, factor);
                }
            }
        }
        out
    }
}

/// Residual of the `n`-th bilinear hierarchy equation on `tau`:
/// `(D_1 D_n - 2 p_{n+1}(D~)) tau . tau`, which vanishes exactly when `tau`
/// satisfies the equation.
pub fn kp_bilinear_residual(n: u32, tau: &ExpSum) -> ExpSum {
    assert!(n >= 2, "bilinear equations start at n = 2");
    let schur = schur_polys(n as usize + 1);
    let p_next = HirotaPoly::from_time_poly_scaled(&schur[n as usize + 1]);
    let op = HirotaPoly::d(1)
        .mul(&HirotaPoly::d(n))
        .sub(&p_next.scale(&Rational::from_int(2)));
    op.apply(tau, tau)
}
