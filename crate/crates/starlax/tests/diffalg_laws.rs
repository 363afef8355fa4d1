//! Derivation and variational-calculus laws on random differential
//! polynomials, at the sample sizes the contracts call for.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use starlax::diffalg::{DiffPoly, Field};
use starlax::scalars::{KappaScalar, Rational};

fn random_poly(rng: &mut StdRng, max_terms: usize) -> DiffPoly {
    let mut acc = DiffPoly::zero();
    let n_terms = rng.random_range(1..=max_terms);
    for _ in 0..n_terms {
        let c = KappaScalar::monomial(
            Rational::new(rng.random_range(-6..=6), rng.random_range(1..=4)),
            rng.random_range(0..=2),
        );
        let mut term = DiffPoly::constant(c);
        for _ in 0..rng.random_range(0..=2) {
            term = &term * &DiffPoly::jet(Field::U(rng.random_range(0..=1)), rng.random_range(0..=3));
        }
        acc = &acc + &term;
    }
    acc
}

#[test]
fn total_derivative_is_a_derivation() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..500 {
        let f = random_poly(&mut rng, 2);
        let g = random_poly(&mut rng, 2);
        let lhs = (&f * &g).total_x_derivative();
        let rhs = &(&f.total_x_derivative() * &g) + &(&f * &g.total_x_derivative());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn variational_derivative_kills_exact_terms() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..500 {
        let f = random_poly(&mut rng, 3);
        let d = f.total_x_derivative();
        for field in [Field::U(0), Field::U(1)] {
            assert!(d.variational_derivative(field).is_zero(), "f = {f}");
        }
    }
}

#[test]
fn trace_equivalence_is_congruence_for_addition() {
    let mut rng = StdRng::seed_from_u64(13);
    let eq = DiffPoly::equals_mod_total_derivative;
    for _ in 0..200 {
        let f = random_poly(&mut rng, 2);
        let g = &f + &random_poly(&mut rng, 2).total_x_derivative();
        let h = random_poly(&mut rng, 2);
        // f ~ g by construction
        assert!(eq(&f, &g));
        // symmetry and congruence under addition
        assert!(eq(&g, &f));
        assert!(eq(&(&f + &h), &(&g + &h)));
    }
}

#[test]
fn exact_derivative_iff_variational_vanishes_spot_checks() {
    // membership decisions on hand cases, both directions
    let u = DiffPoly::u();
    let ux = DiffPoly::u_der(1);
    let uxx = DiffPoly::u_der(2);
    let eq = DiffPoly::equals_mod_total_derivative;
    assert!(eq(&(&u * &ux), &DiffPoly::zero()));
    assert!(eq(&(&(&u * &uxx) + &ux.pow(2)), &DiffPoly::zero()));
    assert!(!eq(&(&u * &uxx), &DiffPoly::zero()));
    assert!(!eq(&u.pow(3), &DiffPoly::zero()));
    // u u_xx ~ -u_x^2
    assert!(eq(&(&u * &uxx), &(-&ux.pow(2))));
}
