//! Bi-non-crossing partitions.
//!
//! For a side labelling `χ` of `1..k`, the permutation `s_χ` lists the
//! left-labelled positions in increasing order followed by the right-labelled
//! ones in decreasing order. A partition is bi-non-crossing when it becomes
//! non-crossing after relabelling each point by its place in that list. The
//! relabelling is a lattice isomorphism `BNC(χ) ≅ NC(k)`, which is how joins
//! and the Möbius values against the top element are computed.
//!
//! Positions are 0-based internally; `Display` and JSON output are 1-based.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::ncalg::Side;

/// Default ceiling for exhaustive enumeration (`C_12 = 208012`).
pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("length {len} exceeds the enumeration cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("partitions live over different side labellings")]
    ChiMismatch,
    #[error("partitions are not comparable")]
    NotComparable,
    #[error("{0}")]
    Invalid(String),
}

/// A side labelling `χ : {1..k} → {ℓ, r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChiSeq(Vec<Side>);

impl ChiSeq {
    pub fn new(labels: Vec<Side>) -> Result<Self, LatticeError> {
        if labels.is_empty() {
            return Err(LatticeError::Invalid("empty side labelling".into()));
        }
        Ok(ChiSeq(labels))
    }

    /// Parses `lrlr`-style strings.
    pub fn parse(s: &str) -> Result<Self, LatticeError> {
        let labels = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'l' | 'L' | 'ℓ' => Ok(Side::Left),
                'r' | 'R' => Ok(Side::Right),
                _ => Err(LatticeError::Invalid(format!("bad side label `{}`", c))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(labels)
    }

    pub fn all_left(k: usize) -> Self {
        ChiSeq(vec![Side::Left; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Side] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Side {
        self.0[i]
    }

    /// Restriction to the given (increasing) positions.
    pub fn restrict(&self, positions: &[usize]) -> ChiSeq {
        ChiSeq(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// `s_χ` as a 0-based list: entry `j` is the original position visited
    /// `j`-th.
    pub fn sigma(&self) -> Permutation {
        let lefts = (0..self.len()).filter(|&i| self.0[i] == Side::Left);
        let rights = (0..self.len()).rev().filter(|&i| self.0[i] == Side::Right);
        Permutation(lefts.chain(rights).collect())
    }

    /// Inverse of [`sigma`](Self::sigma): the place of each original position.
    pub fn positions(&self) -> Vec<usize> {
        self.sigma().inverse().0
    }
}

impl fmt::Display for ChiSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", if *s == Side::Left { 'l' } else { 'r' })?;
        }
        Ok(())
    }
}

/// A permutation of `0..k` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (j, &i) in self.0.iter().enumerate() {
            inv[i] = j;
        }
        Permutation(inv)
    }

    /// 1-based images, as usually written.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

/// Canonical restricted-growth labels: first occurrence order `0, 1, 2, ...`.
fn canonicalize(labels: &[usize]) -> Vec<usize> {
    let mut map: HashMap<usize, usize> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Ordinary non-crossing test on restricted-growth labels.
pub fn is_noncrossing(labels: &[usize]) -> bool {
    let k = labels.len();
    // a < b < c < d with a~c, b~d, a≁b
    for a in 0..k {
        for b in a + 1..k {
            if labels[b] == labels[a] {
                continue;
            }
            for c in b + 1..k {
                if labels[c] != labels[a] {
                    continue;
                }
                for d in c + 1..k {
                    if labels[d] == labels[b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Relabels a partition on original positions to `s_χ` order (or back).
fn permute_labels(labels: &[usize], perm: &[usize]) -> Vec<usize> {
    // out[j] = labels[perm[j]]
    canonicalize(&perm.iter().map(|&i| labels[i]).collect::<Vec<_>>())
}

/// A partition of `1..k` that is bi-non-crossing for its `χ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BNCPartition {
    chi: ChiSeq,
    labels: Vec<usize>,
}

impl BNCPartition {
    /// Builds from block labels (any values; equal values share a block).
    pub fn from_labels(chi: ChiSeq, labels: &[usize]) -> Result<Self, LatticeError> {
        if labels.len() != chi.len() {
            return Err(LatticeError::Invalid("label count does not match χ".into()));
        }
        let labels = canonicalize(labels);
        if !is_bnc(&labels, &chi) {
            return Err(LatticeError::Invalid("partition is not bi-non-crossing".into()));
        }
        Ok(BNCPartition { chi, labels })
    }

    /// Builds from 0-based blocks.
    pub fn from_blocks(chi: ChiSeq, blocks: &[Vec<usize>]) -> Result<Self, LatticeError> {
        let mut labels = vec![usize::MAX; chi.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= chi.len() || labels[i] != usize::MAX {
                    return Err(LatticeError::Invalid("blocks do not partition 1..k".into()));
                }
                labels[i] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(LatticeError::Invalid("blocks do not cover 1..k".into()));
        }
        Self::from_labels(chi, &labels)
    }

    /// Builds from 1-based blocks, as in `{{1,3},{2},{4}}`.
    pub fn from_one_based(chi: ChiSeq, blocks: &[Vec<usize>]) -> Result<Self, LatticeError> {
        let zero: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| b.iter().map(|&i| i.checked_sub(1)).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| LatticeError::Invalid("block index 0".into()))?;
        Self::from_blocks(chi, &zero)
    }

    pub fn zero(chi: &ChiSeq) -> Self {
        BNCPartition { chi: chi.clone(), labels: (0..chi.len()).collect() }
    }

    pub fn one(chi: &ChiSeq) -> Self {
        BNCPartition { chi: chi.clone(), labels: vec![0; chi.len()] }
    }

    pub fn chi(&self) -> &ChiSeq {
        &self.chi
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// 0-based blocks, each increasing, ordered by least element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l].push(i);
        }
        blocks
    }

    pub fn blocks_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks().into_iter().map(|b| b.into_iter().map(|i| i + 1).collect()).collect()
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &BNCPartition) -> Result<bool, LatticeError> {
        if self.chi != other.chi {
            return Err(LatticeError::ChiMismatch);
        }
        Ok(refines(&self.labels, &other.labels))
    }

    /// Least upper bound inside `BNC(χ)`.
    pub fn join(&self, other: &BNCPartition) -> Result<BNCPartition, LatticeError> {
        if self.chi != other.chi {
            return Err(LatticeError::ChiMismatch);
        }
        let sigma = self.chi.sigma();
        let a = permute_labels(&self.labels, &sigma.0);
        let b = permute_labels(&other.labels, &sigma.0);
        let joined = nc_join(&a, &b);
        let back = permute_labels(&joined, &sigma.inverse().0);
        Ok(BNCPartition { chi: self.chi.clone(), labels: back })
    }

    /// Labels in `s_χ` order; an ordinary non-crossing partition.
    pub fn to_nc_labels(&self) -> Vec<usize> {
        permute_labels(&self.labels, &self.chi.sigma().0)
    }
}

impl fmt::Display for BNCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (bi, block) in self.blocks_one_based().iter().enumerate() {
            if bi > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    let mut image: HashMap<usize, usize> = HashMap::new();
    for (f, c) in fine.iter().zip(coarse) {
        if *image.entry(*f).or_insert(*c) != *c {
            return false;
        }
    }
    true
}

/// Whether `labels` (on original positions) is bi-non-crossing for `chi`.
pub fn is_bnc(labels: &[usize], chi: &ChiSeq) -> bool {
    labels.len() == chi.len() && is_noncrossing(&permute_labels(labels, &chi.sigma().0))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Join in `NC(k)`: set-partition join, then merge crossing blocks until
/// non-crossing.
fn nc_join(a: &[usize], b: &[usize]) -> Vec<usize> {
    let k = a.len();
    let mut uf = UnionFind::new(k);
    for labels in [a, b] {
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            let f = *first.entry(l).or_insert(i);
            uf.union(f, i);
        }
    }
    loop {
        let roots: Vec<usize> = (0..k).map(|i| uf.find(i)).collect();
        let mut merged = false;
        'scan: for p in 0..k {
            for q in p + 1..k {
                if roots[q] == roots[p] {
                    continue;
                }
                for r in q + 1..k {
                    if roots[r] != roots[p] {
                        continue;
                    }
                    for s in r + 1..k {
                        if roots[s] == roots[q] {
                            uf.union(p, q);
                            merged = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !merged {
            return canonicalize(&roots);
        }
    }
}

/// All non-crossing partitions of `0..k` as restricted-growth strings in
/// lexicographic order.
///
/// Placing a point into an existing block closes every block whose last
/// element lies after that block's last element; closed blocks never grow.
pub fn enumerate_nc(k: usize) -> Vec<Vec<usize>> {
    fn rec(
        labels: &mut Vec<usize>,
        last: &mut Vec<usize>,
        closed: &mut Vec<bool>,
        k: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let j = labels.len();
        if j == k {
            out.push(labels.clone());
            return;
        }
        for b in 0..last.len() {
            if closed[b] {
                continue;
            }
            let saved_closed = closed.clone();
            let saved_last = last[b];
            for c in 0..last.len() {
                if last[c] > last[b] {
                    closed[c] = true;
                }
            }
            last[b] = j;
            labels.push(b);
            rec(labels, last, closed, k, out);
            labels.pop();
            last[b] = saved_last;
            *closed = saved_closed;
        }
        last.push(j);
        closed.push(false);
        labels.push(last.len() - 1);
        rec(labels, last, closed, k, out);
        labels.pop();
        closed.pop();
        last.pop();
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(&mut Vec::with_capacity(k), &mut Vec::new(), &mut Vec::new(), k, &mut out);
    out
}

/// `BNC(χ)`: `NC(k)` in lex order of restricted-growth strings, relabelled
/// back to original positions.
pub fn enumerate_bnc(chi: &ChiSeq) -> Result<Vec<BNCPartition>, LatticeError> {
    enumerate_bnc_capped(chi, DEFAULT_CAP)
}

pub fn enumerate_bnc_capped(chi: &ChiSeq, cap: usize) -> Result<Vec<BNCPartition>, LatticeError> {
    if chi.len() > cap {
        return Err(LatticeError::CapExceeded { len: chi.len(), cap });
    }
    let nc = nc_table(chi.len());
    let pos = chi.positions();
    Ok(nc
        .partitions
        .iter()
        .map(|lab| {
            let orig: Vec<usize> = pos.iter().map(|&p| lab[p]).collect();
            BNCPartition { chi: chi.clone(), labels: canonicalize(&orig) }
        })
        .collect())
}

/// Cached `NC(k)` together with `μ(π, 1_k)` for every element.
struct NcTable {
    partitions: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    mobius_to_top: Vec<i64>,
}

static NC_TABLES: Lazy<RwLock<HashMap<usize, Arc<NcTable>>>> = Lazy::new(|| RwLock::new(HashMap::new()));

fn nc_table(k: usize) -> Arc<NcTable> {
    if let Some(t) = NC_TABLES.read().unwrap().get(&k) {
        return t.clone();
    }
    let partitions = enumerate_nc(k);
    let index = partitions.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let mobius_to_top = mobius_to_top_by_recursion(&partitions);
    let t = Arc::new(NcTable { partitions, index, mobius_to_top });
    NC_TABLES.write().unwrap().entry(k).or_insert(t).clone()
}

/// `μ(π, 1)` for every element by the defining recursion
/// `μ(1,1) = 1`, `μ(ρ,1) = -Σ_{ρ<τ≤1} μ(τ,1)`, processing coarser elements
/// first.
fn mobius_to_top_by_recursion(parts: &[Vec<usize>]) -> Vec<i64> {
    let n = parts.len();
    let nblocks: Vec<usize> = parts.iter().map(|p| p.iter().max().map_or(0, |m| m + 1)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| nblocks[i]);
    let mut mu = vec![0i64; n];
    for (oi, &i) in order.iter().enumerate() {
        let mut s = 0i64;
        for &j in &order[..oi] {
            if nblocks[j] < nblocks[i] && refines(&parts[i], &parts[j]) {
                s += mu[j];
            }
        }
        mu[i] = if oi == 0 { 1 } else { -s };
    }
    mu
}

/// `μ(π, 1_χ)` read off the cached `NC(k)` table via `s_χ`.
pub fn mobius_to_top(pi: &BNCPartition) -> i64 {
    let t = nc_table(pi.len());
    t.mobius_to_top[t.index[&pi.to_nc_labels()]]
}

/// The lattice `BNC(χ)` with a memo table for general Möbius values.
pub struct BncLattice {
    chi: ChiSeq,
    elements: Vec<BNCPartition>,
    index: HashMap<Vec<usize>, usize>,
    memo: Mutex<HashMap<(usize, usize), i64>>,
}

impl BncLattice {
    pub fn new(chi: &ChiSeq) -> Result<Self, LatticeError> {
        let elements = enumerate_bnc(chi)?;
        let index = elements.iter().enumerate().map(|(i, p)| (p.labels.clone(), i)).collect();
        Ok(BncLattice { chi: chi.clone(), elements, index, memo: Mutex::new(HashMap::new()) })
    }

    pub fn chi(&self) -> &ChiSeq {
        &self.chi
    }

    pub fn elements(&self) -> &[BNCPartition] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn idx(&self, p: &BNCPartition) -> Result<usize, LatticeError> {
        if p.chi != self.chi {
            return Err(LatticeError::ChiMismatch);
        }
        self.index.get(&p.labels).copied().ok_or(LatticeError::ChiMismatch)
    }

    /// Elements `ρ` with `lo ≤ ρ ≤ hi`.
    pub fn interval(&self, lo: &BNCPartition, hi: &BNCPartition) -> Vec<&BNCPartition> {
        self.elements.iter().filter(|r| refines(&lo.labels, &r.labels) && refines(&r.labels, &hi.labels)).collect()
    }

    /// `μ(σ, π)` by the recursion `Σ_{σ≤ρ≤π} μ(ρ, π) = [σ = π]`, memoized.
    pub fn mobius(&self, sigma: &BNCPartition, pi: &BNCPartition) -> Result<i64, LatticeError> {
        let (si, pj) = (self.idx(sigma)?, self.idx(pi)?);
        if !refines(&sigma.labels, &pi.labels) {
            return Err(LatticeError::NotComparable);
        }
        Ok(self.mobius_idx(si, pj))
    }

    fn mobius_idx(&self, si: usize, pj: usize) -> i64 {
        if si == pj {
            return 1;
        }
        if let Some(v) = self.memo.lock().unwrap().get(&(si, pj)) {
            return *v;
        }
        let lo = &self.elements[si].labels;
        let hi = &self.elements[pj].labels;
        let mut s = 0i64;
        for (ri, r) in self.elements.iter().enumerate() {
            if ri != si && refines(lo, &r.labels) && refines(&r.labels, hi) {
                s += self.mobius_idx(ri, pj);
            }
        }
        let v = -s;
        self.memo.lock().unwrap().insert((si, pj), v);
        v
    }
}

/// Data for embedding `BNC(χ)` on `1..p` into `BNC(χ̂)` on `1..q`.
#[derive(Debug, Clone)]
pub struct HatEmbedding {
    pub chi: ChiSeq,
    /// Labels of positions `p..q` (1-based), length `q - p + 1`.
    pub chi_prime: ChiSeq,
    pub chi_hat: ChiSeq,
}

impl HatEmbedding {
    /// `chi` covers `1..p`; `chi_prime` covers `p..q` and overrides the label
    /// at `p`.
    pub fn new(chi: &ChiSeq, chi_prime: &ChiSeq) -> Result<Self, LatticeError> {
        if chi_prime.len() < 2 {
            return Err(LatticeError::Invalid("need p < q".into()));
        }
        let p = chi.len();
        let mut labels = chi.labels()[..p - 1].to_vec();
        labels.extend_from_slice(chi_prime.labels());
        Ok(HatEmbedding { chi: chi.clone(), chi_prime: chi_prime.clone(), chi_hat: ChiSeq(labels) })
    }

    pub fn p(&self) -> usize {
        self.chi.len()
    }

    pub fn q(&self) -> usize {
        self.chi_hat.len()
    }

    /// `π̂`: the points `p+1..q` join the block of `p`.
    pub fn embed(&self, pi: &BNCPartition) -> Result<BNCPartition, LatticeError> {
        if pi.chi != self.chi {
            return Err(LatticeError::ChiMismatch);
        }
        let p = self.p();
        let mut labels = pi.labels.clone();
        let lp = labels[p - 1];
        labels.extend(std::iter::repeat(lp).take(self.q() - p));
        let labels = canonicalize(&labels);
        debug_assert!(is_bnc(&labels, &self.chi_hat));
        Ok(BNCPartition { chi: self.chi_hat.clone(), labels })
    }

    /// `0̂_χ = {{1},…,{p−1},{p,…,q}}`.
    pub fn zero_hat(&self) -> BNCPartition {
        self.embed(&BNCPartition::zero(&self.chi)).expect("same chi")
    }
}

pub fn catalan(k: usize) -> u64 {
    let mut c = 1u64;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Kreweras complement of a non-crossing partition of `0..k` (labels in
/// non-crossing order), via the interleaved `2k`-point construction.
pub fn kreweras(nc: &[usize]) -> Vec<usize> {
    let k = nc.len();
    // points 2i (original i) and 2i+1 (primed i); find the coarsest
    // partition of primed points non-crossing with nc on the interleaving
    let parts = enumerate_nc(k);
    let mut best: Option<&Vec<usize>> = None;
    for cand in &parts {
        let mut lab = vec![0usize; 2 * k];
        for i in 0..k {
            lab[2 * i] = nc[i];
            lab[2 * i + 1] = k + cand[i];
        }
        if is_noncrossing(&canonicalize(&lab)) {
            let nb = cand.iter().max().map_or(0, |m| m + 1);
            if best.map_or(true, |b| nb < b.iter().max().map_or(0, |m| m + 1)) {
                best = Some(cand);
            }
        }
    }
    best.cloned().unwrap_or_default()
}

/// `μ(π, 1)` by the product formula over blocks of the Kreweras complement.
pub fn mobius_to_top_kreweras(nc: &[usize]) -> i64 {
    let k = kreweras(nc);
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for l in k {
        *sizes.entry(l).or_default() += 1;
    }
    sizes
        .values()
        .map(|&s| {
            let sign = if (s - 1) % 2 == 0 { 1 } else { -1 };
            sign * catalan(s - 1) as i64
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(s: &str) -> ChiSeq {
        ChiSeq::parse(s).unwrap()
    }

    /// All set partitions of `0..k` as canonical labels.
    fn all_set_partitions(k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for p in &out {
                let nb = p.iter().max().map_or(0, |m| m + 1);
                for b in 0..=nb {
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
    fn sigma_examples() {
        assert_eq!(chi("lr").sigma().one_based(), vec![1, 2]);
        assert_eq!(chi("rl").sigma().one_based(), vec![2, 1]);
        assert_eq!(chi("lrlr").sigma().one_based(), vec![1, 3, 4, 2]);
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_bnc(&chi("l")).unwrap().len(), 1);
        assert_eq!(enumerate_bnc(&chi("lrl")).unwrap().len(), 5);
        assert_eq!(enumerate_bnc(&chi("rrr")).unwrap().len(), 5);
        // brute force for k = 4 over all 15 set partitions
        for s in ["llll", "lrlr", "rllr", "rrrl"] {
            let c = chi(s);
            let brute = all_set_partitions(4).into_iter().filter(|p| is_bnc(p, &c)).count();
            assert_eq!(brute, 14);
            assert_eq!(enumerate_bnc(&c).unwrap().len(), 14);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = ChiSeq::all_left(13);
        assert_eq!(enumerate_bnc(&c).unwrap_err(), LatticeError::CapExceeded { len: 13, cap: 12 });
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 1..=6 {
            for mask in 0..(1u32 << k) {
                let c = ChiSeq((0..k).map(|i| if mask >> i & 1 == 1 { Side::Right } else { Side::Left }).collect());
                let mut brute: Vec<Vec<usize>> =
                    all_set_partitions(k).into_iter().filter(|p| is_bnc(p, &c)).collect();
                let mut got: Vec<Vec<usize>> =
                    enumerate_bnc(&c).unwrap().into_iter().map(|p| p.labels).collect();
                brute.sort();
                got.sort();
                assert_eq!(got, brute, "chi {}", c);
            }
        }
    }

    #[test]
    fn nc_enumeration_is_lex_ordered() {
        let parts = enumerate_nc(6);
        assert!(parts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn join_examples() {
        let c = chi("lrlr");
        let a = BNCPartition::from_one_based(c.clone(), &[vec![1, 3], vec![2], vec![4]]).unwrap();
        let b = BNCPartition::from_one_based(c.clone(), &[vec![2, 4], vec![1], vec![3]]).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(j.to_string(), "{{1,3},{2,4}}");
        assert!(is_bnc(j.labels(), &c));
        let z = BNCPartition::zero(&c);
        assert_eq!(z.join(&a).unwrap(), a);
        assert_eq!(a.join(&a).unwrap(), a);
    }

    #[test]
    fn join_is_least_upper_bound() {
        for s in ["llll", "lrlr", "lrrl", "rlrll"] {
            let c = chi(s);
            let all = enumerate_bnc(&c).unwrap();
            for a in &all {
                for b in &all {
                    let j = a.join(b).unwrap();
                    assert!(a.leq(&j).unwrap() && b.leq(&j).unwrap());
                    for u in &all {
                        if a.leq(u).unwrap() && b.leq(u).unwrap() {
                            assert!(j.leq(u).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let c2 = chi("lr");
        let l2 = BncLattice::new(&c2).unwrap();
        let (z, o) = (BNCPartition::zero(&c2), BNCPartition::one(&c2));
        assert_eq!(l2.mobius(&o, &o).unwrap(), 1);
        assert_eq!(l2.mobius(&z, &o).unwrap(), -1);
        let c3 = chi("lrl");
        let l3 = BncLattice::new(&c3).unwrap();
        assert_eq!(l3.mobius(&BNCPartition::zero(&c3), &BNCPartition::one(&c3)).unwrap(), 2);
        assert_eq!(mobius_to_top(&BNCPartition::zero(&c3)), 2);
    }

    #[test]
    fn mobius_rejects_incomparable() {
        let c = chi("llll");
        let lat = BncLattice::new(&c).unwrap();
        let a = BNCPartition::from_one_based(c.clone(), &[vec![1, 2], vec![3], vec![4]]).unwrap();
        let b = BNCPartition::from_one_based(c.clone(), &[vec![1], vec![2, 3], vec![4]]).unwrap();
        assert_eq!(lat.mobius(&a, &b).unwrap_err(), LatticeError::NotComparable);
    }

    #[test]
    fn mobius_product_formula_cross_check() {
        for k in 1..=7 {
            let c = ChiSeq::all_left(k);
            for p in enumerate_bnc(&c).unwrap() {
                assert_eq!(mobius_to_top(&p), mobius_to_top_kreweras(p.labels()), "{}", p);
            }
        }
    }

    #[test]
    fn hat_examples() {
        let c = chi("ll");
        let h = HatEmbedding::new(&c, &chi("lr")).unwrap();
        assert_eq!(h.zero_hat().to_string(), "{{1},{2,3}}");
        assert_eq!(h.embed(&BNCPartition::one(&c)).unwrap(), BNCPartition::one(&h.chi_hat));
    }

    #[test]
    fn bad_partitions_rejected() {
        let c = chi("llll");
        assert!(BNCPartition::from_one_based(c.clone(), &[vec![1, 3], vec![2, 4]]).is_err());
        assert!(BNCPartition::from_one_based(c.clone(), &[vec![1, 3], vec![2]]).is_err());
        let c2 = chi("lrlr");
        assert!(BNCPartition::from_one_based(c2, &[vec![1, 3], vec![2, 4]]).is_ok());
    }
}
