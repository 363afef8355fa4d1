//! Faithfulness of the normal-form rewriting against direct operator
//! action, and the degeneration of the q-Leibniz expansion at q = 1.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use starlax::qcalc::{q_commutator, QAtom, QLaurent, QOperator};
use starlax::scalars::{QScalar, Rational};
use starlax::symbols::Floor;

use starlax::qcalc as qc;

fn random_laurent(rng: &mut StdRng, allow_negative: bool) -> QLaurent {
    let mut out = QLaurent::zero();
    let lo = if allow_negative { -2 } else { 0 };
    for _ in 0..rng.random_range(1..=2) {
        let c = QScalar::from_rational(Rational::new(
            rng.random_range(-5..=5),
            rng.random_range(1..=3),
        ));
        out = &out + &QLaurent::monomial(c, rng.random_range(lo..=3));
    }
    out
}

fn random_word(rng: &mut StdRng) -> Vec<QAtom> {
    let mut word = Vec::new();
    let mut dq_degree = 0;
    for _ in 0..rng.random_range(1..=4) {
        match rng.random_range(0..3) {
            0 => word.push(QAtom::Coeff(random_laurent(rng, true))),
            1 => word.push(QAtom::Tau(rng.random_range(-2..=2))),
            _ => {
                if dq_degree < 3 {
                    let b = rng.random_range(1..=2).min(3 - dq_degree);
                    dq_degree += b;
                    word.push(QAtom::Dq(b));
                }
            }
        }
    }
    if word.is_empty() {
        word.push(QAtom::Dq(1));
    }
    word
}

#[test]
fn normal_form_is_faithful_on_random_words() {
    let mut rng = StdRng::seed_from_u64(41);
    for _ in 0..200 {
        let word = random_word(&mut rng);
        let op = qc::QOperator::identity();
        let mut acc = op;
        for atom in &word {
            acc = acc.mul(&QOperator::from_atom(atom), Floor::Exact).unwrap();
        }
        for m in 0..=6i64 {
            let direct = apply_word(&word, &QLaurent::x_pow(m));
            let via_nf = acc.apply(&QLaurent::x_pow(m)).unwrap();
            assert_eq!(via_nf, direct, "word = {word:?}, m = {m}");
        }
    }
}

fn apply_word(word: &[QAtom], f: &QLaurent) -> QLaurent {
    let mut g = f.clone();
    for atom in word.iter().rev() {
        g = match atom {
            QAtom::Coeff(c) => c * &g,
            QAtom::Tau(a) => g.apply_tau(*a),
            QAtom::Dq(b) => {
                let mut h = g;
                for _ in 0..*b {
                    h = h.dq();
                }
                h
            }
        };
    }
    g
}

#[test]
fn commutator_matches_two_route_evaluation() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..60 {
        let a = QOperator::word(random_laurent(&mut rng, false), 0, 1);
        let b = QOperator::word(random_laurent(&mut rng, false), 0, 1);
        let c = q_commutator(&a, &b, Floor::Exact).unwrap();
        for m in 0..=5i64 {
            let f = QLaurent::x_pow(m);
            let direct = &a.apply(&b.apply(&f).unwrap()).unwrap()
                - &b.apply(&a.apply(&f).unwrap()).unwrap();
            assert_eq!(c.apply(&f).unwrap(), direct, "m = {m}");
        }
    }
}

#[test]
fn q_one_degeneration_of_leibniz() {
    // the expansion of dq^n . x^j reduces to the classical Leibniz rule
    // with binomial coefficients when q = 1
    for n in 1..=3i64 {
        for j in 0..=3i64 {
            let op = QOperator::dq(n)
                .mul(&QOperator::coeff(QLaurent::x_pow(j)), Floor::Exact)
                .unwrap();
            for m in 0..=5i64 {
                let applied = op.apply(&QLaurent::x_pow(m)).unwrap();
                let at1 = applied.substitute_q(&Rational::one()).unwrap();
                let classical = Rational::falling(j + m, n as u32);
                let expect: std::collections::BTreeMap<i64, Rational> = if classical.is_zero() {
                    Default::default()
                } else {
                    [(j + m - n, classical)].into_iter().collect()
                };
                assert_eq!(at1, expect, "n={n} j={j} m={m}");
            }
        }
    }
}

#[test]
fn inverse_derivative_identity_to_tracked_floor() {
    // dq^-1 . (dq . u) collapses to multiplication by u above the floor
    let mut rng = StdRng::seed_from_u64(43);
    for _ in 0..40 {
        let u = random_laurent(&mut rng, false);
        if u.is_zero() {
            continue;
        }
        let dqu = QOperator::dq(1).mul(&QOperator::coeff(u.clone()), Floor::Exact).unwrap();
        let composed = QOperator::dq(-1).mul(&dqu, Floor::At(-5)).unwrap();
        assert_eq!(composed.get(0, 0), u);
        for ((a, b), c) in composed.iter() {
            assert!(
                (a, b) == (0, 0),
                "residual word T^{a} dq^{b} with coefficient {c} for u = {u}"
            );
        }
    }
}
