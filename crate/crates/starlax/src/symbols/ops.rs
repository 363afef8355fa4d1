//! Product, bracket, projection and residue machinery shared by every
//! registered [`StarProduct`].

use crate::diffalg::DiffPoly;

use super::product::StarProduct;
use super::symbol::{Floor, PhaseSymbol, SymbolError};

/// Exponent above which (inclusive) the product of `f` and `g` is exact,
/// or `None` when every coefficient is exact.
///
/// Unknown coefficients of `f` (below a finite floor) meet stored terms of
/// `g` at exponents up to `floor(f) - 1 + top(g)`, and symmetrically; two
/// unknown tails meet below `floor(f) + floor(g) - 1`.
fn exactness_floor(f: &PhaseSymbol, g: &PhaseSymbol) -> Option<i64> {
    let mut bound: Option<i64> = None;
    let mut push = |b: i64| bound = Some(bound.map_or(b, |old: i64| old.max(b)));
    if let Floor::At(mf) = f.floor() {
        if let Some(ng) = g.top() {
            push(mf + ng);
        }
        if let Floor::At(mg) = g.floor() {
            push(mf + mg - 1);
        }
    }
    if let Floor::At(mg) = g.floor() {
        if let Some(nf) = f.top() {
            push(mg + nf);
        }
    }
    bound
}

/// Extends a derivative cache so that index `r` is present.
fn ensure_deriv(cache: &mut Vec<DiffPoly>, r: usize) {
    while cache.len() <= r {
        let next = cache.last().expect("seeded cache").total_x_derivative();
        cache.push(next);
    }
}

/// The deformed product `f * g` with the requested floor.
///
/// With `Floor::At(r)` every coefficient at exponent `>= r` is an exact
/// finite sum; the request is refused (`FloorTooDeep`) when `r` lies below
/// the contamination bound of the operands. `Floor::Exact` is accepted only
/// when the full result is a finite symbol (`InfiniteTail` otherwise).
pub fn star(
    product: &dyn StarProduct,
    f: &PhaseSymbol,
    g: &PhaseSymbol,
    want: Floor,
) -> Result<PhaseSymbol, SymbolError> {
    let bound = exactness_floor(f, g);
    match (want, bound) {
        (Floor::At(r), Some(b)) if r < b => return Err(SymbolError::FloorTooDeep { required: b }),
        (Floor::Exact, Some(b)) => return Err(SymbolError::FloorTooDeep { required: b }),
        _ => {}
    }

    let f_terms: Vec<(i64, &DiffPoly, Option<u32>)> = f
        .iter()
        .map(|(e, c)| (e, c, c.derivative_chain_zero_after()))
        .collect();
    let g_terms: Vec<(i64, &DiffPoly, Option<u32>)> = g
        .iter()
        .map(|(e, c)| (e, c, c.derivative_chain_zero_after()))
        .collect();

    if want == Floor::Exact {
        for &(i, _, ca) in &f_terms {
            for &(j, _, cb) in &g_terms {
                if product.s_bound(i, j, ca, cb).is_none() {
                    return Err(SymbolError::InfiniteTail);
                }
            }
        }
    }

    let mut left_cache: Vec<Vec<DiffPoly>> =
        f_terms.iter().map(|(_, c, _)| vec![(*c).clone()]).collect();
    let mut right_cache: Vec<Vec<DiffPoly>> =
        g_terms.iter().map(|(_, c, _)| vec![(*c).clone()]).collect();

    let mut out = PhaseSymbol::zero_with_floor(want);
    for (fi, &(i, _, ca)) in f_terms.iter().enumerate() {
        for (gi, &(j, _, cb)) in g_terms.iter().enumerate() {
            let pair_bound = product.s_bound(i, j, ca, cb);
            let s_hi = match want {
                Floor::Exact => pair_bound.expect("checked finite above"),
                Floor::At(r) => {
                    if i + j < r {
                        continue;
                    }
                    let cap = (i + j - r) as u32;
                    pair_bound.map_or(cap, |b| b.min(cap))
                }
            };
            for s in 0..=s_hi {
                for term in product.terms_for(i, j, s) {
                    ensure_deriv(&mut left_cache[fi], term.x_left as usize);
                    ensure_deriv(&mut right_cache[gi], term.x_right as usize);
                    let da = &left_cache[fi][term.x_left as usize];
                    let db = &right_cache[gi][term.x_right as usize];
                    if da.is_zero() || db.is_zero() {
                        continue;
                    }
                    let contrib = (da * db).mul_rational(&term.factor).mul_kappa_pow(s);
                    out.insert_add(i + j - s as i64, contrib);
                }
            }
        }
    }
    Ok(out)
}

/// `f * g` at the best floor the operands support (exact when possible).
pub fn star_auto(
    product: &dyn StarProduct,
    f: &PhaseSymbol,
    g: &PhaseSymbol,
) -> Result<PhaseSymbol, SymbolError> {
    match exactness_floor(f, g) {
        None => star(product, f, g, Floor::Exact),
        Some(b) => star(product, f, g, Floor::At(b)),
    }
}

/// `base` star-multiplied with itself `k` times (`k >= 1`), auto-floored.
pub fn star_power(
    product: &dyn StarProduct,
    base: &PhaseSymbol,
    k: u32,
) -> Result<PhaseSymbol, SymbolError> {
    assert!(k >= 1, "star_power wants a positive exponent");
    let mut acc = base.clone();
    for _ in 1..k {
        acc = star_auto(product, &acc, base)?;
    }
    Ok(acc)
}

/// The bracket `(f*g - g*f) / (divisor * k)` of the product.
///
/// Divisibility of the commutator by `k` is a theorem of both registered
/// products; its failure would be an engine bug, so the division is asserted.
pub fn bracket(
    product: &dyn StarProduct,
    f: &PhaseSymbol,
    g: &PhaseSymbol,
    want: Floor,
) -> Result<PhaseSymbol, SymbolError> {
    let fg = star(product, f, g, want)?;
    let gf = star(product, g, f, want)?;
    let d = &fg - &gf;
    let divisor = product.bracket_divisor();
    Ok(d.map_coeffs(|c| {
        c.div_kappa_exact(&divisor)
            .expect("InexactKappaDivision: commutator not divisible by k (engine bug)")
    }))
}

/// Bracket at the best floor the operands support.
pub fn bracket_auto(
    product: &dyn StarProduct,
    f: &PhaseSymbol,
    g: &PhaseSymbol,
) -> Result<PhaseSymbol, SymbolError> {
    match exactness_floor(f, g) {
        None => bracket(product, f, g, Floor::Exact),
        Some(b) => bracket(product, f, g, Floor::At(b)),
    }
}

/// Commutative (undeformed) product with floor bookkeeping.
pub fn mul_commutative(f: &PhaseSymbol, g: &PhaseSymbol) -> PhaseSymbol {
    let want = match exactness_floor(f, g) {
        None => Floor::Exact,
        Some(b) => Floor::At(b),
    };
    let mut out = PhaseSymbol::zero_with_floor(want);
    for (i, a) in f.iter() {
        for (j, b) in g.iter() {
            out.insert_add(i + j, a * b);
        }
    }
    out
}

/// The undeformed bracket `d_p f . d_x g - d_x f . d_p g`.
pub fn poisson_bracket(f: &PhaseSymbol, g: &PhaseSymbol) -> PhaseSymbol {
    let t1 = mul_commutative(&f.p_derivative(), &g.x_derivative());
    let t2 = mul_commutative(&f.x_derivative(), &g.p_derivative());
    &t1 - &t2
}

/// Keeps exactly the terms with `p`-exponent `>= m`; the result is exact.
///
/// Refused when the tracked floor sits above `m`: the kept range would be
/// contaminated, and silent truncation is the one bug this engine refuses
/// to have.
pub fn project(f: &PhaseSymbol, m: i64) -> Result<PhaseSymbol, SymbolError> {
    if let Floor::At(fl) = f.floor() {
        if fl > m {
            return Err(SymbolError::FloorTooShallow { floor: fl, needed: m });
        }
    }
    Ok(PhaseSymbol::from_parts(
        f.iter().filter(|(e, _)| *e >= m).map(|(e, c)| (e, c.clone())).collect(),
        Floor::Exact,
    ))
}

/// The coefficient of `p^{-1}`.
pub fn residue(f: &PhaseSymbol) -> Result<DiffPoly, SymbolError> {
    f.coeff_checked(-1)
}

/// Trace equality: residues agree modulo total `x`-derivatives.
pub fn trace_equal(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<bool, SymbolError> {
    let rf = residue(f)?;
    let rg = residue(g)?;
    Ok(DiffPoly::equals_mod_total_derivative(&rf, &rg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::{DiffPoly, Field};
    use crate::scalars::Rational;
    use crate::symbols::product::{MOYAL, PSDO_LEFT};

    fn u() -> DiffPoly {
        DiffPoly::u()
    }

    fn ux(n: u32) -> DiffPoly {
        DiffPoly::u_der(n)
    }

    fn sym(poly: DiffPoly, e: i64) -> PhaseSymbol {
        PhaseSymbol::monomial(poly, e)
    }

    #[test]
    fn unit_and_low_order() {
        // 1 * f = f, f * 1 = f
        let f = &sym(u(), 2) + &sym(ux(1), -1);
        let f = f.truncated(Floor::At(-1));
        let lhs = star(&MOYAL, &PhaseSymbol::one(), &f, Floor::At(-1)).unwrap();
        assert_eq!(lhs, f);
        // p * u = u p + k u_x ; u * p = u p - k u_x
        let pu = star(&MOYAL, &PhaseSymbol::p(), &sym(u(), 0), Floor::Exact).unwrap();
        let mut expect = PhaseSymbol::monomial(u(), 1);
        expect.insert_add(0, ux(1).mul_kappa_pow(1));
        assert_eq!(pu, expect);
        let up = star(&MOYAL, &sym(u(), 0), &PhaseSymbol::p(), Floor::Exact).unwrap();
        let mut expect = PhaseSymbol::monomial(u(), 1);
        expect.insert_add(0, -&ux(1).mul_kappa_pow(1));
        assert_eq!(up, expect);
    }

    #[test]
    fn momentum_cubed_both_sides() {
        // p^3 * u = u p^3 + 3k u_x p^2 + 3k^2 u_xx p + k^3 u_xxx
        let p3 = PhaseSymbol::p_pow(3);
        let r = star(&MOYAL, &p3, &sym(u(), 0), Floor::Exact).unwrap();
        assert_eq!(r.coeff(3), u());
        assert_eq!(r.coeff(2), ux(1).mul_kappa_pow(1).mul_rational(&Rational::from_int(3)));
        assert_eq!(r.coeff(1), ux(2).mul_kappa_pow(2).mul_rational(&Rational::from_int(3)));
        assert_eq!(r.coeff(0), ux(3).mul_kappa_pow(3));
        // u * p^3 flips the odd-order signs
        let l = star(&MOYAL, &sym(u(), 0), &p3, Floor::Exact).unwrap();
        assert_eq!(l.coeff(2), ux(1).mul_kappa_pow(1).mul_rational(&Rational::from_int(-3)));
        assert_eq!(l.coeff(0), -&ux(3).mul_kappa_pow(3));
    }

    #[test]
    fn psdo_left_single_term() {
        // p . u = u p + k u_x under the one-sided product too
        let r = star(&PSDO_LEFT, &PhaseSymbol::p(), &sym(u(), 0), Floor::Exact).unwrap();
        assert_eq!(r.coeff(1), u());
        assert_eq!(r.coeff(0), ux(1).mul_kappa_pow(1));
        // but u . p = u p exactly (no derivative falls on the right)
        let l = star(&PSDO_LEFT, &sym(u(), 0), &PhaseSymbol::p(), Floor::Exact).unwrap();
        assert_eq!(l, PhaseSymbol::monomial(u(), 1));
    }

    #[test]
    fn floor_refusal_and_infinite_tail() {
        // u * p^-1 has an infinite tail: exact must be refused
        let r = star(&MOYAL, &sym(u(), 0), &PhaseSymbol::p_pow(-1), Floor::Exact);
        assert_eq!(r, Err(SymbolError::InfiniteTail));
        // with a floor it is fine: u * p^-1 = u p^-1 + k u_x p^-2 + ...
        let r = star(&MOYAL, &sym(u(), 0), &PhaseSymbol::p_pow(-1), Floor::At(-3)).unwrap();
        assert_eq!(r.coeff(-1), u());
        assert_eq!(r.coeff(-2), ux(1).mul_kappa_pow(1));
        assert_eq!(r.coeff(-3), ux(2).mul_kappa_pow(2));
        // truncated operand: requests below the contamination bound are refused
        let t = sym(u(), 0).truncated(Floor::At(-1));
        let err = star(&MOYAL, &t, &PhaseSymbol::p_pow(2), Floor::At(-5));
        assert_eq!(err, Err(SymbolError::FloorTooDeep { required: 1 }));
    }

    #[test]
    fn truncation_stability() {
        // recomputing deeper never changes coefficients above the shallower floor
        let f = &sym(u(), 1) + &sym(ux(1), -1);
        let g = &sym(u().pow(2), 0) + &sym(ux(2), -2);
        let shallow = star(&MOYAL, &f, &g, Floor::At(-2)).unwrap();
        let deep = star(&MOYAL, &f, &g, Floor::At(-7)).unwrap();
        assert_eq!(deep.truncated(Floor::At(-2)), shallow);
    }

    #[test]
    fn bracket_examples() {
        // {p, u} = u_x
        let b = bracket(&MOYAL, &PhaseSymbol::p(), &sym(u(), 0), Floor::Exact).unwrap();
        assert_eq!(b, sym(ux(1), 0));
        // {p^3, u} = 3 u_x p^2 + k^2 u_xxx
        let b = bracket(&MOYAL, &PhaseSymbol::p_pow(3), &sym(u(), 0), Floor::Exact).unwrap();
        assert_eq!(b.coeff(2), ux(1).mul_rational(&Rational::from_int(3)));
        assert_eq!(b.coeff(0), ux(3).mul_kappa_pow(2));
        assert!(b.coeff(1).is_zero());
        // antisymmetry on f = f
        let f = &sym(u(), 2) + &sym(ux(2), 0);
        assert!(bracket(&MOYAL, &f, &f, Floor::Exact).unwrap().is_zero());
    }

    #[test]
    fn poisson_degeneration() {
        let f = &PhaseSymbol::p_pow(2) + &sym(u(), 0);
        let g = &PhaseSymbol::p_pow(3) + &sym(u().mul_rational(&Rational::new(3, 2)), 1);
        let pb = poisson_bracket(&f, &g);
        let mb = bracket(&MOYAL, &f, &g, Floor::Exact).unwrap();
        assert_eq!(mb.substitute_kappa(&Rational::zero()), pb);
        // and the zero-k limit of the product is the commutative product
        let st = star(&MOYAL, &f, &g, Floor::Exact).unwrap();
        assert_eq!(st.substitute_kappa(&Rational::zero()), mul_commutative(&f, &g));
    }

    #[test]
    fn projection_and_residue() {
        let f = &PhaseSymbol::p_pow(3) + &sym(u(), -1);
        let plus = project(&f, 0).unwrap();
        assert_eq!(plus, PhaseSymbol::p_pow(3));
        // empty projection
        assert!(project(&sym(u(), -1), 0).unwrap().is_zero());
        assert_eq!(residue(&f).unwrap(), u());
        assert!(residue(&PhaseSymbol::p_pow(3)).unwrap().is_zero());
        // projecting a symbol whose floor hides the range is refused
        let t = sym(u(), 2).truncated(Floor::At(1));
        assert!(matches!(project(&t, 0), Err(SymbolError::FloorTooShallow { .. })));
        assert!(matches!(residue(&t), Err(SymbolError::FloorTooShallow { .. })));
    }

    #[test]
    fn hamilton_relations_with_x_letter() {
        // bracket(H, x) = d_p H and bracket(H, p) = -d_x H for H = (p^2 + x^2)/2
        let h = (&PhaseSymbol::p_pow(2) + &sym(DiffPoly::x().pow(2), 0))
            .mul_rational(&Rational::new(1, 2));
        let x = sym(DiffPoly::x(), 0);
        let bx = bracket(&MOYAL, &h, &x, Floor::Exact).unwrap();
        assert_eq!(bx, h.p_derivative());
        let bp = bracket(&MOYAL, &h, &PhaseSymbol::p(), Floor::Exact).unwrap();
        assert_eq!(bp, -&h.x_derivative());
        let _ = Field::X;
    }
}
