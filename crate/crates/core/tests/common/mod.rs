#![allow(dead_code)]

use bifree::cumulant::CumulantSpec;
use bifree::ncalg::{q, Letter, NCPolynomial, Rational, Word};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Variables X1..Xn, Y1..Ym followed by symbols x1, x2, y1, y2.
pub fn alphabet(n: u32, m: u32, symbols: bool) -> Vec<Letter> {
    let mut v: Vec<Letter> = (1..=n).map(Letter::left).chain((1..=m).map(Letter::right)).collect();
    if symbols {
        v.extend([Letter::left_symbol(1), Letter::left_symbol(2), Letter::right_symbol(1), Letter::right_symbol(2)]);
    }
    v
}

pub fn poly_from(letters: &[Letter], terms: &[(Vec<usize>, i64, i64)]) -> NCPolynomial {
    let mut p = NCPolynomial::zero();
    for (idx, a, b) in terms {
        let w = Word::new(idx.iter().map(|&i| letters[i % letters.len()]).collect());
        p.add_term(w, q(*a, *b));
    }
    p
}

/// Polynomials over `letters` with up to `max_terms` terms of degree `≤ max_deg`.
pub fn poly_strategy(letters: Vec<Letter>, max_deg: usize, max_terms: usize) -> impl Strategy<Value = NCPolynomial> {
    let k = letters.len();
    prop::collection::vec((prop::collection::vec(0..k, 0..=max_deg), -4i64..=4, 1i64..=3), 0..=max_terms)
        .prop_map(move |t| poly_from(&letters, &t))
}

pub fn random_word(r: &mut impl Rng, letters: &[Letter], max_len: usize) -> Word {
    let len = r.gen_range(0..=max_len);
    Word::new((0..len).map(|_| letters[r.gen_range(0..letters.len())]).collect())
}

pub fn random_poly(r: &mut impl Rng, letters: &[Letter], max_deg: usize, max_terms: usize) -> NCPolynomial {
    let terms: Vec<_> = (0..r.gen_range(1..=max_terms))
        .map(|_| {
            let len = r.gen_range(0..=max_deg);
            ((0..len).map(|_| r.gen_range(0..letters.len())).collect(), r.gen_range(-4..=4), r.gen_range(1..=3))
        })
        .collect();
    poly_from(letters, &terms)
}

pub fn random_rational(r: &mut impl Rng) -> Rational {
    q(r.gen_range(-5..=5), r.gen_range(1..=4))
}

/// `B Bᵀ` with `B` of size `n × rank`, entries uniform in `[-1, 1]`.
pub fn random_psd(r: &mut impl Rng, n: usize, rank: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, rank, |_, _| r.gen_range(-1.0..1.0));
    let a = &b * b.transpose();
    (&a + a.transpose()) * 0.5
}

/// Well-conditioned invertible PSD matrix.
pub fn random_spd(r: &mut impl Rng, n: usize) -> DMatrix<f64> {
    random_psd(r, n, n) + DMatrix::identity(n, n) * r.gen_range(0.1..1.0)
}

/// Random cumulants for every letter pattern up to `max_len` over X1..Xn, Y1..Ym.
pub fn random_spec(r: &mut impl Rng, n: u32, m: u32, max_len: usize) -> CumulantSpec {
    let letters = alphabet(n, m, false);
    let mut spec = CumulantSpec::new(n, m);
    for w in bifree::cumulant::words_up_to(&letters, max_len) {
        if !w.is_empty() && r.gen_bool(0.7) {
            spec.set(w.0, random_rational(r)).unwrap();
        }
    }
    spec
}

/// PSD of a uniformly chosen rank in `1..=n`.
pub fn random_psd_any_rank(r: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let rank = r.gen_range(1..=n);
    random_psd(r, n, rank)
}
