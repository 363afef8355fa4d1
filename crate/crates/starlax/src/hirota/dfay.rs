//! Dispersionless Fay expansion: generation of the polynomial relations
//! among the second-derivative unknowns `F_mn` and the diagnostic
//! cross-check of the closed-form family.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalars::Rational;

use super::mpoly::MPoly;
use super::schur::schur_polys;

/// Index of an unknown `F_mn`; stored canonically with `m <= n` since the
/// unknowns are symmetric second derivatives.
pub type FIdx = (u32, u32);

pub fn fidx(m: u32, n: u32) -> FIdx {
    (m.min(n), m.max(n))
}

/// Monomial in the unknowns, polynomial over the rationals.
pub type FMono = BTreeMap<FIdx, u32>;
pub type FPoly = MPoly<FMono>;

pub fn f_var(m: u32, n: u32) -> FPoly {
    let mut mono = FMono::new();
    mono.insert(fidx(m, n), 1);
    FPoly::var(mono)
}

/// Errors of the relation generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum HirotaError {
    /// A coefficient with `m = 1` or `n = 1` failed to be tautological,
    /// which signals an implementation or convention bug.
    InconsistentExpansion { m: u32, n: u32 },
}

impl fmt::Display for HirotaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HirotaError::InconsistentExpansion { m, n } => {
                write!(f, "expansion coefficient ({m},{n}) is not tautological")
            }
        }
    }
}

impl std::error::Error for HirotaError {}

/// Bivariate series in the two inverse letters, truncated at a total
/// degree, with [`FPoly`] coefficients. Key = (degree in the first letter,
/// degree in the second letter), both >= 1 throughout this module.
#[derive(Clone, Debug, Default)]
struct BiSeries {
    coeffs: BTreeMap<(u32, u32), FPoly>,
}

impl BiSeries {
    fn insert_add(&mut self, key: (u32, u32), value: FPoly) {
        if value.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(key).or_default();
        let sum = &*slot + &value;
        if sum.is_zero() {
            self.coeffs.remove(&key);
        } else {
            *slot = sum;
        }
    }

    fn mul_trunc(&self, other: &BiSeries, order: u32) -> BiSeries {
        let mut out = BiSeries::default();
        for (&(a1, b1), p1) in &self.coeffs {
            for (&(a2, b2), p2) in &other.coeffs {
                let key = (a1 + a2, b1 + b2);
                if key.0 + key.1 > order {
                    continue;
                }
                out.insert_add(key, p1 * p2);
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> BiSeries {
        BiSeries {
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = self.clone();
        for (k, p) in &other.coeffs {
            out.insert_add(*k, p.clone());
        }
        out
    }
}

/// The inner series `X` with `1 - sum_n ((mu^-n - la^-n)/(mu - la)) F_1n / n
/// = 1 + X`: expanding the divided difference gives
/// `X = sum_n (F_1n / n) sum_{i=1}^n mu^-(n+1-i) la^-i`.
fn x_series(order: u32) -> BiSeries {
    let mut x = BiSeries::default();
    for n in 1..order {
        let coeff = f_var(1, n).scale(&Rational::from_int(n as i64).recip());
        for i in 1..=n {
            x.insert_add((n + 1 - i, i), coeff.clone());
        }
    }
    x
}

/// `log(1 + X)` truncated at total degree `order`.
fn log_series(x: &BiSeries, order: u32) -> BiSeries {
    let mut out = BiSeries::default();
    let mut power = x.clone();
    let mut m = 1i64;
    loop {
        if power.coeffs.is_empty() {
            break;
        }
        let sign = if m % 2 == 1 { Rational::one() } else { -Rational::one() };
        out = out.add(&power.scale(&(sign * Rational::from_int(m).recip())));
        // X has lowest total degree 2, so the powers terminate quickly
        if 2 * (m as u32 + 1) > order {
            break;
        }
        power = power.mul_trunc(x, order);
        m += 1;
    }
    out
}

/// One generated relation `F_mn = rhs(F_11, F_12, ...)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FRelation {
    pub m: u32,
    pub n: u32,
    pub rhs: FPoly,
}

/// The relations produced by expanding the dispersionless Fay identity to a
/// truncation order: one for every `(m, n)` with `m, n >= 2`,
/// `m + n <= order`, expressing `F_mn` as a polynomial in the `F_1k`.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub order: u32,
    relations: BTreeMap<(u32, u32), FPoly>,
}

impl RelationSet {
    pub fn get(&self, m: u32, n: u32) -> Option<&FPoly> {
        self.relations.get(&(m, n))
    }

    /// Relations with `m <= n`, in index order.
    pub fn canonical(&self) -> Vec<FRelation> {
        self.relations
            .iter()
            .filter(|((m, n), _)| m <= n)
            .map(|(&(m, n), rhs)| FRelation { m, n, rhs: rhs.clone() })
            .collect()
    }

    /// Both orientations of every pair were generated independently from
    /// the series; they must agree (`F_mn = F_nm`).
    pub fn symmetric_consistent(&self) -> bool {
        self.relations
            .iter()
            .all(|(&(m, n), rhs)| self.relations.get(&(n, m)) == Some(rhs))
    }

    /// Substitutes every `F_mn` with `m, n >= 2` by its generated relation,
    /// leaving a polynomial in the `F_1k` only.
    pub fn resolve(&self, p: &FPoly) -> FPoly {
        let mut out = FPoly::zero();
        for (mono, c) in p.iter() {
            let mut term = FPoly::constant(c.clone());
            for (&(m, n), &e) in mono {
                let factor = if m >= 2 {
                    self.relations
                        .get(&(m, n))
                        .cloned()
                        .unwrap_or_else(|| f_var(m, n))
                } else {
                    f_var(m, n)
                };
                term = &term * &factor.pow(e);
            }
            out = &out + &term;
        }
        out
    }
}

/// Expands the dispersionless Fay identity to `order` and matches
/// coefficients of both inverse letters.
///
/// Rows with `m = 1` or `n = 1` must reduce to tautologies; any failure is
/// reported as [`HirotaError::InconsistentExpansion`].
pub fn dfay_relations(order: u32) -> Result<RelationSet, HirotaError> {
    let x = x_series(order);
    let log = log_series(&x, order);
    let mut relations = BTreeMap::new();
    for m in 1..order {
        for n in 1..order {
            if m + n > order {
                continue;
            }
            let coeff = log.coeffs.get(&(m, n)).cloned().unwrap_or_else(FPoly::zero);
            let rhs = coeff.scale(&Rational::from_int((m * n) as i64));
            if m == 1 || n == 1 {
                if rhs != f_var(m, n) {
                    return Err(HirotaError::InconsistentExpansion { m, n });
                }
            } else {
                relations.insert((m, n), rhs);
            }
        }
    }
    Ok(RelationSet { order, relations })
}

/// Numeric spot check of the generating identity: draws values for the
/// `F_1k`, derives every `F_mn` from the relation set, and compares the
/// full double series against the exact log expansion, coefficient by
/// coefficient.
pub fn numeric_identity_check(
    relations: &RelationSet,
    f1_values: &BTreeMap<u32, Rational>,
) -> bool {
    let order = relations.order;
    let eval = |p: &FPoly| -> Rational {
        p.eval_with(|mono| {
            let mut acc = Rational::one();
            for (&(m, n), &e) in mono {
                assert_eq!(m, 1, "resolved polynomial must be in F_1k only");
                let v = f1_values.get(&n).expect("value for every F_1k");
                acc = acc * v.pow(e as i32);
            }
            acc
        })
    };
    // left side: sum mu^-m la^-n F_mn / (mn) with F_mn from the relations
    let mut lhs: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for m in 1..order {
        for n in 1..order {
            if m + n > order {
                continue;
            }
            let f_mn = if m == 1 || n == 1 {
                relations.resolve(&f_var(m, n))
            } else {
                relations.get(m, n).expect("generated").clone()
            };
            let v = eval(&f_mn) / Rational::from_int((m * n) as i64);
            if !v.is_zero() {
                lhs.insert((m, n), v);
            }
        }
    }
    // right side: numeric log(1 + X)
    let x = x_series(order);
    let log = log_series(&x, order);
    let mut rhs: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (k, p) in &log.coeffs {
        if k.0 + k.1 > order || k.0 >= order || k.1 >= order {
            continue;
        }
        let v = eval(&relations.resolve(p));
        if !v.is_zero() {
            rhs.insert(*k, v);
        }
    }
    lhs == rhs
}

/// Outcome of instantiating the closed-form family `F_ij =
/// p_{j+1}(Z_1 = 0, Z_2, ..., Z_{j+1})` with `Z_j = sum_{m+n=j} F_mn/(mn)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DHirotaStatus {
    /// Both sides are literally the same `F_1k`.
    Tautology,
    /// The difference vanishes after substituting the generated relations.
    Identity,
    /// A nonzero residual polynomial in the `F_1k` remains.
    Residual(FPoly),
}

/// Diagnostic report: the closed form is instantiated as written and
/// compared against the generated relations; nothing here is asserted.
pub fn dhirota_check(order: u32) -> Result<Vec<(u32, u32, DHirotaStatus)>, HirotaError> {
    let relations = dfay_relations(order)?;
    // Z_j resolved into the F_1k
    let mut z: BTreeMap<u32, FPoly> = BTreeMap::new();
    for j in 2..=order {
        let mut acc = FPoly::zero();
        for m in 1..j {
            let n = j - m;
            let term = relations
                .resolve(&f_var(m, n))
                .scale(&Rational::from_int((m * n) as i64).recip());
            acc = &acc + &term;
        }
        z.insert(j, acc);
    }
    let schur = schur_polys(order as usize);
    let mut out = Vec::new();
    for i in 1..order {
        for j in i..order {
            if i + j > order || (j + 1) as usize >= schur.len() + 1 {
                continue;
            }
            if j + 1 > order {
                continue;
            }
            let lhs = relations.resolve(&f_var(i, j));
            // p_{j+1}(0, Z_2, ..., Z_{j+1})
            let mut rhs = FPoly::zero();
            for (mono, c) in schur[(j + 1) as usize].iter() {
                if mono.get(&1).copied().unwrap_or(0) > 0 {
                    continue; // Z_1 = 0
                }
                let mut term = FPoly::constant(c.clone());
                for (&t, &e) in mono {
                    term = &term * &z[&t].pow(e);
                }
                rhs = &rhs + &term;
            }
            let status = if lhs == rhs {
                if i == 1 {
                    DHirotaStatus::Tautology
                } else {
                    DHirotaStatus::Identity
                }
            } else {
                DHirotaStatus::Residual(&lhs - &rhs)
            };
            out.push((i, j, status));
        }
    }
    Ok(out)
}

/// Terms of an F-polynomial in canonical rendering order (descending).
pub fn f_poly_terms_sorted(p: &FPoly) -> Vec<(&FMono, &Rational)> {
    let mut terms: Vec<(&FMono, &Rational)> = p.iter().collect();
    terms.sort_by(|(a, _), (b, _)| f_mono_cmp(b, a));
    terms
}

/// Renders an F-polynomial like `4/3 F_{1,3} - 2 F_{1,1}^2`.
pub fn f_poly_text(p: &FPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms = f_poly_terms_sorted(p);
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        let mut factors: Vec<String> = Vec::new();
        if !mag.is_one() || m.is_empty() {
            factors.push(mag.to_string());
        }
        for (&(a, b), &e) in m {
            if e == 1 {
                factors.push(format!("F_{{{a},{b}}}"));
            } else {
                factors.push(format!("F_{{{a},{b}}}^{e}"));
            }
        }
        out.push_str(&factors.join(" "));
    }
    out
}

/// Graded order with ties broken by higher exponent on the earliest unknown.
fn f_mono_cmp(a: &FMono, b: &FMono) -> std::cmp::Ordering {
    let grade = |m: &FMono| -> i64 {
        m.iter().map(|(&(x, y), &e)| (x + y) as i64 * e as i64).sum()
    };
    grade(a).cmp(&grade(b)).then_with(|| {
        let keys: std::collections::BTreeSet<FIdx> = a.keys().chain(b.keys()).copied().collect();
        for k in keys {
            let (ea, eb) = (a.get(&k).copied().unwrap_or(0), b.get(&k).copied().unwrap_or(0));
            if ea != eb {
                return ea.cmp(&eb);
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Optional re-parameterization `F_1j = j P_{j+1}` of a resolved polynomial.
pub fn reparam_p_text(p: &FPoly) -> String {
    // rewrite each F_{1,j} as j * P_{j+1} and render in the P letters
    if p.is_zero() {
        return "0".into();
    }
    let terms = f_poly_terms_sorted(p);
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let mut scale = c.clone();
        let mut factors: Vec<String> = Vec::new();
        for (&(a, b), &e) in m {
            assert_eq!(a, 1, "reparameterization applies to resolved polynomials");
            scale = scale * Rational::from_int(b as i64).pow(e as i32);
            if e == 1 {
                factors.push(format!("P_{{{}}}", b + 1));
            } else {
                factors.push(format!("P_{{{}}}^{e}", b + 1));
            }
        }
        let neg = scale.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = scale.abs();
        if !mag.is_one() || factors.is_empty() {
            factors.insert(0, mag.to_string());
        }
        out.push_str(&factors.join(" "));
    }
    out
}
