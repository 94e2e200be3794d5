mod common;

use bifree::bnclattice::{
    catalan, enumerate_bnc, is_bnc, mobius_to_top, BNCPartition, BncLattice, ChiSeq, HatEmbedding,
};
use bifree::ncalg::Side;
use proptest::prelude::*;
use rand::Rng;

fn all_chis(k: usize) -> Vec<ChiSeq> {
    (0..1u32 << k)
        .map(|bits| ChiSeq::new((0..k).map(|i| if bits >> i & 1 == 0 { Side::Left } else { Side::Right }).collect()).unwrap())
        .collect()
}

/// All set partitions of `0..k` as restricted growth strings.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &out {
            let top = p.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=top {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[test]
fn bnc_counts_are_catalan() {
    for k in 1..=7 {
        for chi in all_chis(k) {
            assert_eq!(enumerate_bnc(&chi).unwrap().len() as u64, catalan(k), "{:?}", chi);
        }
    }
}

#[test]
fn enumeration_matches_brute_force_filter() {
    for k in 1..=6 {
        let all = set_partitions(k);
        for chi in all_chis(k) {
            let mut got: Vec<Vec<usize>> = enumerate_bnc(&chi).unwrap().iter().map(|p| p.labels().to_vec()).collect();
            let mut want: Vec<Vec<usize>> = all.iter().filter(|p| is_bnc(p, &chi)).cloned().collect();
            got.sort();
            want.sort();
            assert_eq!(got, want, "{:?}", chi);
        }
    }
}

#[test]
fn mobius_defining_identity() {
    let mut r = common::rng(7);
    for k in 1..=6 {
        // every χ up to 5, a sample at 6
        let chis: Vec<ChiSeq> = if k < 6 { all_chis(k) } else { (0..6).map(|_| all_chis(6)[r.gen_range(0..64)].clone()).collect() };
        for chi in chis {
            let lat = BncLattice::new(&chi).unwrap();
            for s in lat.elements() {
                for p in lat.elements() {
                    if !s.leq(p).unwrap() {
                        continue;
                    }
                    let sum: i64 = lat.interval(s, p).into_iter().map(|rho| lat.mobius(rho, p).unwrap()).sum();
                    assert_eq!(sum, i64::from(s == p), "{} {}", s, p);
                }
            }
        }
    }
}

#[test]
fn mobius_bottom_to_top_is_signed_catalan() {
    for k in 1..=7 {
        for chi in all_chis(k) {
            let want = if k % 2 == 1 { 1 } else { -1 } * catalan(k - 1) as i64;
            assert_eq!(mobius_to_top(&BNCPartition::zero(&chi)), want);
        }
    }
}

#[test]
fn hat_embedding_preserves_mobius() {
    for p in 1..=4 {
        for extra in 1..=2 {
            for chi in all_chis(p) {
                for chi_prime in all_chis(extra + 1) {
                    let h = HatEmbedding::new(&chi, &chi_prime).unwrap();
                    let lat = BncLattice::new(&chi).unwrap();
                    let hat = BncLattice::new(&h.chi_hat).unwrap();
                    for s in lat.elements() {
                        for t in lat.elements() {
                            let (sh, th) = (h.embed(s).unwrap(), h.embed(t).unwrap());
                            assert_eq!(s.leq(t).unwrap(), sh.leq(&th).unwrap());
                            if s.leq(t).unwrap() {
                                assert_eq!(lat.mobius(s, t).unwrap(), hat.mobius(&sh, &th).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn partial_mobius_inversion(bits in 0u32..32, k in 1usize..=5, g_seed in any::<u64>()) {
        let chi = ChiSeq::new((0..k).map(|i| if bits >> i & 1 == 0 { Side::Left } else { Side::Right }).collect()).unwrap();
        let lat = BncLattice::new(&chi).unwrap();
        let el = lat.elements();
        let mut r = common::rng(g_seed);
        let g: Vec<i64> = el.iter().map(|_| r.gen_range(-9..=9)).collect();
        let f: Vec<i64> = el
            .iter()
            .map(|pi| el.iter().zip(&g).filter(|(s, _)| s.leq(pi).unwrap()).map(|(_, v)| *v).sum())
            .collect();
        for (i, sigma) in el.iter().enumerate() {
            for (j, pi) in el.iter().enumerate() {
                if !sigma.leq(pi).unwrap() {
                    continue;
                }
                let lhs: i64 = el
                    .iter()
                    .zip(&f)
                    .filter(|(rho, _)| sigma.leq(rho).unwrap() && rho.leq(pi).unwrap())
                    .map(|(rho, fv)| fv * lat.mobius(rho, pi).unwrap())
                    .sum();
                let rhs: i64 = el.iter().zip(&g).filter(|(w, _)| w.join(sigma).unwrap() == *pi).map(|(_, v)| *v).sum();
                prop_assert_eq!(lhs, rhs, "σ = {} (#{}), π = {} (#{})", sigma, i, pi, j);
            }
        }
    }
}
