//! Elementary Schur polynomials from the exponential generating series.

use std::collections::BTreeMap;

use crate::scalars::Rational;

use super::mpoly::MPoly;

/// Monomial in the time letters `t1, t2, ...` (index -> exponent).
pub type TimeMono = BTreeMap<u32, u32>;

/// Polynomial in the time letters.
pub type TimePoly = MPoly<TimeMono>;

/// `p_0 ... p_n` with `exp(sum t_m z^m) = sum p_j z^j`, by exact truncated
/// series exponentiation. Each `p_j` involves only `t_1 ... t_j`.
pub fn schur_polys(n: usize) -> Vec<TimePoly> {
    // z-truncated series with TimePoly coefficients, index = z-power.
    let mut result: Vec<TimePoly> = vec![TimePoly::zero(); n + 1];
    result[0] = TimePoly::one();
    if n == 0 {
        return result;
    }
    let mut x: Vec<TimePoly> = vec![TimePoly::zero(); n + 1];
    for (m, slot) in x.iter_mut().enumerate().take(n + 1).skip(1) {
        *slot = TimePoly::var(time_var(m as u32));
    }
    // accumulate X^j / j!
    let mut power: Vec<TimePoly> = vec![TimePoly::zero(); n + 1];
    power[0] = TimePoly::one();
    let mut jfact = Rational::one();
    for j in 1..=n {
        power = mul_trunc(&power, &x, n);
        jfact = jfact * Rational::from_int(j as i64);
        let inv = jfact.recip();
        for (slot, p) in result.iter_mut().zip(power.iter()) {
            *slot = &*slot + &p.scale(&inv);
        }
    }
    result
}

pub fn time_var(j: u32) -> TimeMono {
    let mut m = TimeMono::new();
    m.insert(j, 1);
    m
}

fn mul_trunc(a: &[TimePoly], b: &[TimePoly], n: usize) -> Vec<TimePoly> {
    let mut out = vec![TimePoly::zero(); n + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > n {
                break;
            }
            if bj.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

/// Renders a time polynomial like `1/6 t1^3 + t1 t2 + t3`.
pub fn time_poly_text(p: &TimePoly) -> String {
    render_letter_poly(p, |j| format!("t{j}"))
}

/// Terms in canonical rendering order: graded by `sum j * e`, ties broken
/// by higher exponent on the earliest letter.
pub fn time_poly_terms_sorted(p: &MPoly<TimeMono>) -> Vec<(&TimeMono, &Rational)> {
    let mut terms: Vec<(&TimeMono, &Rational)> = p.iter().collect();
    terms.sort_by(|(a, _), (b, _)| {
        let grade = |m: &TimeMono| -> i64 { m.iter().map(|(&j, &e)| j as i64 * e as i64).sum() };
        grade(b).cmp(&grade(a)).then_with(|| {
            let keys: std::collections::BTreeSet<u32> =
                a.keys().chain(b.keys()).copied().collect();
            for k in keys {
                let (ea, eb) = (a.get(&k).copied().unwrap_or(0), b.get(&k).copied().unwrap_or(0));
                if ea != eb {
                    return eb.cmp(&ea);
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    terms
}

/// Shared renderer for polynomials over indexed letters.
pub fn render_letter_poly(p: &MPoly<TimeMono>, letter: impl Fn(u32) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms = time_poly_terms_sorted(p);
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
        for (&j, &e) in m {
            if e == 1 {
                factors.push(letter(j));
            } else {
                factors.push(format!("{}^{e}", letter(j)));
            }
        }
        out.push_str(&factors.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_schur_polynomials() {
        let p = schur_polys(4);
        assert_eq!(time_poly_text(&p[0]), "1");
        assert_eq!(time_poly_text(&p[1]), "t1");
        assert_eq!(time_poly_text(&p[2]), "1/2 t1^2 + t2");
        assert_eq!(time_poly_text(&p[3]), "1/6 t1^3 + t1 t2 + t3");
        assert_eq!(
            time_poly_text(&p[4]),
            "1/24 t1^4 + 1/2 t1^2 t2 + t1 t3 + 1/2 t2^2 + t4"
        );
    }

    #[test]
    fn generating_identity() {
        // sum p_j(t) z^j * sum p_j(-t) z^j = 1 + O(z^{n+1})
        let n = 8;
        let p = schur_polys(n);
        let pm: Vec<TimePoly> = p
            .iter()
            .map(|poly| {
                let mut out = TimePoly::zero();
                for (m, c) in poly.iter() {
                    let total: u32 = m.values().sum();
                    let c = if total % 2 == 1 { -c } else { c.clone() };
                    out.insert_add(m.clone(), c);
                }
                out
            })
            .collect();
        let prod = mul_trunc(&p, &pm, n);
        assert_eq!(prod[0], TimePoly::one());
        for entry in prod.iter().skip(1) {
            assert!(entry.is_zero());
        }
    }
}
