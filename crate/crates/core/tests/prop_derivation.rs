mod common;

use bifree::cumulant::{CumulantSpec, MomentFunctional};
use bifree::derivation::{
    adjoint_apply, adjoint_apply_letterwise, bifree_dq, dq_first_leg, dq_second_leg, free_dq, inner, inner_tensor,
    scalar_identity_residual, test_words, QuotientKind,
};
use bifree::ncalg::{q, AlgebraMode, Letter, NCPolynomial, Rational, Side, TensorConvention, TensorPoly, Word};
use common::{alphabet, poly_strategy};
use num::One;
use proptest::prelude::*;

const ST: TensorConvention = TensorConvention::Straight;

fn free() -> AlgebraMode {
    AlgebraMode::free(2, 2)
}

fn kinds() -> [QuotientKind; 4] {
    [QuotientKind::left(1), QuotientKind::right(1), QuotientKind::flipped_left(2), QuotientKind::flipped_right(2)]
}

fn dq(p: &NCPolynomial, k: &QuotientKind, m: &AlgebraMode) -> TensorPoly {
    bifree_dq(p, k, m).unwrap()
}

fn polys() -> impl Strategy<Value = NCPolynomial> {
    poly_strategy(alphabet(2, 2, true), 5, 4)
}

fn side_polys(side: Side, symbols: bool) -> impl Strategy<Value = NCPolynomial> {
    poly_strategy(alphabet(2, 2, symbols).into_iter().filter(|l| l.side == side).collect(), 4, 3)
}

fn tensor(a: &NCPolynomial, b: &NCPolynomial) -> TensorPoly {
    TensorPoly::from_polys(a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flip_law(z in polys()) {
        let m = free();
        for (plain, flipped) in [
            (QuotientKind::left(1), QuotientKind::flipped_left(1)),
            (QuotientKind::right(2), QuotientKind::flipped_right(2)),
        ] {
            prop_assert_eq!(dq(&z, &flipped, &m), dq(&z.star(), &plain, &m).star());
        }
    }

    #[test]
    fn composition_identities(z in polys()) {
        let m = free();
        let (l, r) = (QuotientKind::left(1), QuotientKind::right(1));
        for k in [l, r, QuotientKind::left(2), QuotientKind::right(2)] {
            let d = dq(&z, &k, &m);
            prop_assert_eq!(dq_first_leg(&d, &k, &m), dq_second_leg(&d, &k, &m));
        }
        let lhs = dq_first_leg(&dq(&z, &r, &m), &l, &m);
        prop_assert_eq!(lhs, dq_first_leg(&dq(&z, &l, &m), &r, &m).swap_23());
    }

    #[test]
    fn restriction_to_pure_left(z in side_polys(Side::Left, true)) {
        let m = free();
        let x = Letter::left(1);
        let want = free_dq(&z, &x, &m).unwrap();
        prop_assert_eq!(dq(&z, &QuotientKind::left(1), &m), want.clone());
        prop_assert_eq!(dq(&z, &QuotientKind::flipped_left(1), &m), want);
    }

    #[test]
    fn flipped_leibniz_rules(
        c in side_polys(Side::Left, true),
        mid in polys(),
        d1 in side_polys(Side::Right, true),
        d2 in side_polys(Side::Right, true),
    ) {
        let m = free();
        let k = QuotientKind::flipped_left(1);
        let one = NCPolynomial::one();
        let lhs = dq(&c.mul(&mid, &m).unwrap(), &k, &m);
        let a = dq(&c, &k, &m).mul(&tensor(&one, &mid), ST, &m).unwrap();
        let b = tensor(&c, &one).mul(&dq(&mid, &k, &m), ST, &m).unwrap();
        prop_assert_eq!(lhs, &a + &b);
        let z = d1.mul(&mid, &m).unwrap().mul(&d2, &m).unwrap();
        let rhs = tensor(&one, &d1)
            .mul(&dq(&mid, &k, &m), ST, &m)
            .unwrap()
            .mul(&tensor(&one, &d2), ST, &m)
            .unwrap();
        prop_assert_eq!(dq(&z, &k, &m), rhs);
    }

    #[test]
    fn commuting_a_left_past_a_right(idx in prop::collection::vec(0usize..8, 2..7), at in 0usize..6) {
        let letters = alphabet(2, 2, true);
        let mut w: Vec<Letter> = idx.iter().map(|&i| letters[i]).collect();
        let at = at % (w.len() - 1);
        prop_assume!(w[at].side != w[at + 1].side);
        let before = NCPolynomial::word(Word::new(w.clone()));
        w.swap(at, at + 1);
        let after = NCPolynomial::word(Word::new(w));
        let (m, b) = (free(), AlgebraMode::bipartite(2, 2));
        for k in kinds() {
            prop_assert_eq!(dq(&before, &k, &m).normalized(&b), dq(&after, &k, &m).normalized(&b), "{}", k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scalar_identity_on_bipartite_polynomials(z in poly_strategy(alphabet(2, 2, false), 5, 4)) {
        let b = AlgebraMode::bipartite(2, 2);
        prop_assert!(scalar_identity_residual(&z.normalized(&b), &b).unwrap().is_zero());
    }
}

fn gaussian_pair(c: Rational) -> MomentFunctional {
    let one = Rational::one();
    let spec = CumulantSpec::gaussian(1, 1, &[vec![one.clone(), c.clone()], vec![c, one]]).unwrap();
    MomentFunctional::from_cumulants(AlgebraMode::free(1, 1), spec).unwrap()
}

fn xi(c: &Rational, side: Side) -> NCPolynomial {
    let s = &Rational::one() / (Rational::one() - c * c);
    let (a, b) = match side {
        Side::Left => (Letter::left(1), Letter::right(1)),
        Side::Right => (Letter::right(1), Letter::left(1)),
    };
    (&NCPolynomial::letter(a) - &NCPolynomial::letter(b).scale(c)).scale(&s)
}

/// Elementary tensors `C ⊗ D` with `C` on `side` and `D` on the other side,
/// each of degree at most one.
fn domain_tensors(side: Side) -> Vec<TensorPoly> {
    let (own, other) = match side {
        Side::Left => (Letter::left(1), Letter::right(1)),
        Side::Right => (Letter::right(1), Letter::left(1)),
    };
    let legs = |l: Letter| [Word::unit(), Word::new(vec![l])];
    let mut out = Vec::new();
    for c in legs(own) {
        for d in legs(other) {
            out.push(TensorPoly::elementary(c.clone(), d, Rational::one()));
        }
    }
    out.push(TensorPoly::elementary(Word::new(vec![own, own]), Word::unit(), q(-2, 3)));
    out
}

#[test]
fn adjoint_pairs_with_the_flipped_quotient() {
    let mode = AlgebraMode::free(1, 1);
    for c in [q(0, 1), q(1, 2), q(-1, 3)] {
        let phi = gaussian_pair(c.clone());
        for (side, kind) in [(Side::Left, QuotientKind::flipped_left(1)), (Side::Right, QuotientKind::flipped_right(1))] {
            let x = xi(&c, side);
            for eta in domain_tensors(side) {
                let adj = adjoint_apply(&phi, &x, &eta, &kind).unwrap();
                assert_eq!(adj, adjoint_apply_letterwise(&phi, &x, &eta, &kind).unwrap(), "{}", eta);
                for w in test_words(&mode, 6) {
                    let p = NCPolynomial::word(w.clone());
                    let lhs = inner(&phi, &adj, &p).unwrap();
                    let rhs = inner_tensor(&phi, &eta, &dq(&p, &kind, &mode)).unwrap();
                    assert_eq!(lhs, rhs, "c = {}, η = {}, p = {}", c, eta, w);
                }
            }
        }
    }
}
