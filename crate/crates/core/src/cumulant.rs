//! Moment functionals, partitioned moments and bi-free cumulants.
//!
//! A [`MomentFunctional`] is either an explicit word table or is generated by
//! a [`CumulantSpec`]: the moment of a word `l1⋯lk` is then
//! `Σ_{π∈BNC(χ)} Π_{V∈π} κ(l|V)` where `χ` reads off the letter sides.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnclattice::{self, BNCPartition, ChiSeq, HatEmbedding, LatticeError};
use crate::ncalg::{parse_rational, AlgebraError, AlgebraMode, Letter, NCPolynomial, Rational, Side, Word};

pub const DEFAULT_DEGREE_BOUND: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CumulantError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("word of degree {degree} exceeds the degree bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("moment table has no entry for `{0}`")]
    MissingMoment(String),
    #[error("expected {expected} arguments, got {got}")]
    ArgCount { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Cumulant values keyed by letter patterns. Unlisted patterns are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulantSpec {
    pub n: u32,
    pub m: u32,
    entries: BTreeMap<Vec<Letter>, Rational>,
    pub degree_bound: usize,
}

impl CumulantSpec {
    pub fn new(n: u32, m: u32) -> Self {
        CumulantSpec { n, m, entries: BTreeMap::new(), degree_bound: DEFAULT_DEGREE_BOUND }
    }

    pub fn with_degree_bound(mut self, bound: usize) -> Self {
        self.degree_bound = bound;
        self
    }

    pub fn set(&mut self, pattern: Vec<Letter>, value: Rational) -> Result<(), CumulantError> {
        if pattern.is_empty() {
            return Err(CumulantError::Invalid("empty cumulant pattern".into()));
        }
        Word::new(pattern.clone()).check(&self.mode())?;
        if value.is_zero() {
            self.entries.remove(&pattern);
        } else {
            self.entries.insert(pattern, value);
        }
        Ok(())
    }

    pub fn value(&self, pattern: &[Letter]) -> Rational {
        self.entries.get(pattern).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Letter>, &Rational)> {
        self.entries.iter()
    }

    fn mode(&self) -> AlgebraMode {
        AlgebraMode::free(self.n, self.m)
    }

    /// Bi-free central limit family: only order-two cumulants, `κ(a, b) =
    /// cov[a][b]` with lefts indexed first.
    pub fn gaussian(n: u32, m: u32, cov: &[Vec<Rational>]) -> Result<Self, CumulantError> {
        let vars = AlgebraMode::free(n, m).variables();
        if cov.len() != vars.len() || cov.iter().any(|r| r.len() != vars.len()) {
            return Err(CumulantError::Invalid("covariance size does not match n + m".into()));
        }
        let mut spec = CumulantSpec::new(n, m);
        for (i, a) in vars.iter().enumerate() {
            for (j, b) in vars.iter().enumerate() {
                if cov[i][j] != cov[j][i] {
                    return Err(CumulantError::Invalid("covariance is not symmetric".into()));
                }
                spec.set(vec![*a, *b], cov[i][j].clone())?;
            }
        }
        Ok(spec)
    }

    /// Reads off `κ_χ(l1,…,lk)` for every letter pattern up to `max_len`,
    /// with `χ` from the letter sides.
    pub fn from_functional(
        phi: &MomentFunctional,
        letters: &[Letter],
        max_len: usize,
    ) -> Result<Self, CumulantError> {
        let mode = phi.mode();
        let mut spec = CumulantSpec::new(mode.left_arity, mode.right_arity).with_degree_bound(phi.degree_bound());
        for w in words_up_to(letters, max_len) {
            if w.is_empty() {
                continue;
            }
            let chi = chi_of(&w);
            let args: Vec<Word> = w.letters().iter().map(|l| Word::new(vec![*l])).collect();
            let k = cumulant_chi(phi, &chi, &args)?;
            spec.set(w.0, k)?;
        }
        Ok(spec)
    }

    pub fn from_json(s: &str) -> Result<Self, CumulantError> {
        let file: SpecFile = serde_json::from_str(s).map_err(|e| CumulantError::Invalid(e.to_string()))?;
        let mut spec = CumulantSpec::new(file.n, file.m)
            .with_degree_bound(file.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND));
        for e in file.entries {
            let pattern = e.pattern.iter().map(|&(side, index)| letter_of(side, index)).collect::<Result<Vec<_>, _>>()?;
            let v = parse_rational(&e.value)?;
            spec.set(pattern, v)?;
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<SpecEntry> = self
            .entries
            .iter()
            .map(|(p, v)| SpecEntry { pattern: p.iter().map(|l| (l.side, l.index)).collect(), value: v.to_string() })
            .collect();
        serde_json::to_value(SpecFile { n: self.n, m: self.m, entries, degree_bound: Some(self.degree_bound) })
            .expect("serializable")
    }
}

fn letter_of(side: Side, index: u32) -> Result<Letter, CumulantError> {
    if index == 0 {
        return Err(CumulantError::Invalid("letter index 0".into()));
    }
    Ok(match side {
        Side::Left => Letter::left(index),
        Side::Right => Letter::right(index),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    n: u32,
    m: u32,
    entries: Vec<SpecEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree_bound: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecEntry {
    pattern: Vec<(Side, u32)>,
    value: String,
}

/// The side labelling read off a word's letters.
pub fn chi_of(w: &Word) -> ChiSeq {
    ChiSeq::new(w.letters().iter().map(|l| l.side).collect()).expect("nonempty word")
}

/// All words over `letters` of length `≤ max_len`, by length then in the
/// given letter order.
pub fn words_up_to(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::unit()];
    let mut layer = vec![Word::unit()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for l in letters {
                let mut v = w.0.clone();
                v.push(*l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

enum Backend {
    Table(HashMap<Word, Rational>),
    Cumulants { spec: CumulantSpec, memo: Mutex<HashMap<Word, Rational>> },
}

/// A unital linear functional on words (not assumed tracial).
pub struct MomentFunctional {
    mode: AlgebraMode,
    degree_bound: usize,
    backend: Backend,
}

impl MomentFunctional {
    /// Table-backed. In bipartite mode entries are keyed by normal form and
    /// must agree on each commutation class.
    pub fn from_table(
        mode: AlgebraMode,
        table: impl IntoIterator<Item = (Word, Rational)>,
        degree_bound: usize,
    ) -> Result<Self, CumulantError> {
        let mut map = HashMap::new();
        for (w, v) in table {
            w.check(&mode)?;
            let w = w.normal_form(&mode);
            if w.is_empty() && !v.is_one() {
                return Err(CumulantError::Invalid("moment of the unit must be 1".into()));
            }
            if let Some(old) = map.insert(w.clone(), v.clone()) {
                if old != v {
                    return Err(CumulantError::Invalid(format!(
                        "conflicting moments for the commutation class of `{}`",
                        w
                    )));
                }
            }
        }
        map.insert(Word::unit(), Rational::one());
        Ok(MomentFunctional { mode, degree_bound, backend: Backend::Table(map) })
    }

    /// Moments generated from cumulants, computed on demand and memoized.
    pub fn from_cumulants(mode: AlgebraMode, spec: CumulantSpec) -> Result<Self, CumulantError> {
        if mode.left_arity < spec.n || mode.right_arity < spec.m {
            return Err(CumulantError::Invalid("mode arities smaller than the cumulant spec".into()));
        }
        Ok(MomentFunctional {
            mode,
            degree_bound: spec.degree_bound,
            backend: Backend::Cumulants { spec, memo: Mutex::new(HashMap::new()) },
        })
    }

    pub fn mode(&self) -> &AlgebraMode {
        &self.mode
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn moment(&self, w: &Word) -> Result<Rational, CumulantError> {
        if w.len() > self.degree_bound {
            return Err(CumulantError::DegreeBound { degree: w.len(), bound: self.degree_bound });
        }
        w.check(&self.mode)?;
        let w = w.normal_form(&self.mode);
        if w.is_empty() {
            return Ok(Rational::one());
        }
        match &self.backend {
            Backend::Table(map) => map.get(&w).cloned().ok_or_else(|| CumulantError::MissingMoment(w.to_string())),
            Backend::Cumulants { spec, memo } => {
                let mut memo = memo.lock().unwrap();
                Ok(moment_from_spec(spec, &w, &mut memo))
            }
        }
    }

    pub fn moment_poly(&self, p: &NCPolynomial) -> Result<Rational, CumulantError> {
        p.map_linear(|w| self.moment(w))
    }

    /// Reads `{"n", "m", "mode", "degree_bound", "moments": [{"word", "value"}]}`.
    pub fn from_table_json(s: &str) -> Result<Self, CumulantError> {
        let f: TableFile = serde_json::from_str(s).map_err(|e| CumulantError::Invalid(e.to_string()))?;
        let mode = parse_mode(&f.mode, f.n, f.m)?;
        let rows = f
            .moments
            .iter()
            .map(|e| Ok((Word::parse(&e.word)?, parse_rational(&e.value)?)))
            .collect::<Result<Vec<_>, CumulantError>>()?;
        Self::from_table(mode, rows, f.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND))
    }
}

/// Moment table JSON for the given words, in the schema read by
/// [`MomentFunctional::from_table_json`].
pub fn table_json(phi: &MomentFunctional, words: &[Word]) -> Result<serde_json::Value, CumulantError> {
    let mode = phi.mode();
    let moments = words
        .iter()
        .map(|w| Ok(TableEntry { word: w.to_string(), value: phi.moment(w)?.to_string() }))
        .collect::<Result<Vec<_>, CumulantError>>()?;
    let f = TableFile {
        n: mode.left_arity,
        m: mode.right_arity,
        mode: if mode.is_bipartite() { "bipartite" } else { "free" }.to_string(),
        degree_bound: Some(phi.degree_bound()),
        moments,
    };
    Ok(serde_json::to_value(f).expect("serializable"))
}

pub fn parse_mode(s: &str, n: u32, m: u32) -> Result<AlgebraMode, CumulantError> {
    match s {
        "free" => Ok(AlgebraMode::free(n, m)),
        "bipartite" => Ok(AlgebraMode::bipartite(n, m)),
        _ => Err(CumulantError::Invalid(format!("unknown mode `{}`", s))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: u32,
    m: u32,
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree_bound: Option<usize>,
    moments: Vec<TableEntry>,
}

fn default_mode() -> String {
    "free".into()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    word: String,
    value: String,
}

/// `Σ_{π∈BNC(χ)} Π κ(letters|V)` by the block `V` holding the first point
/// in `s_χ` order: the points between consecutive elements of `V` (in that
/// order) form independent intervals, each a shorter moment.
fn moment_from_spec(spec: &CumulantSpec, w: &Word, memo: &mut HashMap<Word, Rational>) -> Rational {
    if w.is_empty() {
        return Rational::one();
    }
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let letters = w.letters();
    let order = chi_of(w).sigma().0;
    let rest = &order[1..];
    let max_block = spec.entries.keys().map(Vec::len).max().unwrap_or(0);
    let mut total = Rational::zero();
    let mut chosen = Vec::new();
    block_sum(spec, letters, order[0], rest, 0, max_block, &mut chosen, memo, &mut total);
    memo.insert(w.clone(), total.clone());
    total
}

/// Sums over the choices of `V ∩ rest[from..]`, `chosen` holding the indices
/// into `rest` picked so far.
#[allow(clippy::too_many_arguments)]
fn block_sum(
    spec: &CumulantSpec,
    letters: &[Letter],
    first: usize,
    rest: &[usize],
    from: usize,
    max_block: usize,
    chosen: &mut Vec<usize>,
    memo: &mut HashMap<Word, Rational>,
    total: &mut Rational,
) {
    let mut block: Vec<usize> = chosen.iter().map(|&j| rest[j]).collect();
    block.push(first);
    block.sort_unstable();
    let k = spec.value(&block.iter().map(|&i| letters[i]).collect::<Vec<_>>());
    if !k.is_zero() {
        let mut prod = k;
        let mut start = 0;
        for &end in chosen.iter().chain(std::iter::once(&rest.len())) {
            if end > start {
                let mut gap: Vec<usize> = rest[start..end].to_vec();
                gap.sort_unstable();
                let sub = Word::new(gap.iter().map(|&i| letters[i]).collect());
                let v = moment_from_spec(spec, &sub, memo);
                if v.is_zero() {
                    prod = Rational::zero();
                    break;
                }
                prod *= v;
            }
            start = end + 1;
        }
        *total += prod;
    }
    if chosen.len() + 1 >= max_block {
        return;
    }
    for j in from..rest.len() {
        chosen.push(j);
        block_sum(spec, letters, first, rest, j + 1, max_block, chosen, memo, total);
        chosen.pop();
    }
}

fn check_args(chi: &ChiSeq, args: &[Word]) -> Result<(), CumulantError> {
    if chi.len() != args.len() {
        return Err(CumulantError::ArgCount { expected: chi.len(), got: args.len() });
    }
    Ok(())
}

/// `φ_π(Z1,…,Zk)`: product over blocks of the moment of the in-block product
/// taken in increasing index order.
pub fn moment_pi(phi: &MomentFunctional, pi: &BNCPartition, args: &[Word]) -> Result<Rational, CumulantError> {
    check_args(pi.chi(), args)?;
    let mut prod = Rational::one();
    for block in pi.blocks() {
        let w = block.iter().fold(Word::unit(), |acc, &i| acc.concat(&args[i]));
        prod *= phi.moment(&w)?;
        if prod.is_zero() {
            break;
        }
    }
    Ok(prod)
}

/// `κ_χ(Z1,…,Zk) = Σ_{π∈BNC(χ)} φ_π(Z) μ(π, 1_χ)`.
pub fn cumulant_chi(phi: &MomentFunctional, chi: &ChiSeq, args: &[Word]) -> Result<Rational, CumulantError> {
    check_args(chi, args)?;
    let mut total = Rational::zero();
    for pi in bnclattice::enumerate_bnc(chi)? {
        let m = moment_pi(phi, &pi, args)?;
        if !m.is_zero() {
            total += m * Rational::from_integer(bnclattice::mobius_to_top(&pi).into());
        }
    }
    Ok(total)
}

/// `κ_π = Π_{V∈π} κ_{χ|V}(Z|V)`.
pub fn cumulant_pi(phi: &MomentFunctional, pi: &BNCPartition, args: &[Word]) -> Result<Rational, CumulantError> {
    check_args(pi.chi(), args)?;
    let mut prod = Rational::one();
    for block in pi.blocks() {
        let sub: Vec<Word> = block.iter().map(|&i| args[i].clone()).collect();
        prod *= cumulant_chi(phi, &pi.chi().restrict(&block), &sub)?;
        if prod.is_zero() {
            break;
        }
    }
    Ok(prod)
}

/// `φ(l1⋯lk) = Σ_{π∈BNC(χ)} Π_V κ(l|V)` for single-letter arguments. `χ`
/// must agree with the letter sides except possibly at the last entry.
pub fn moments_from_cumulants(spec: &CumulantSpec, chi: &ChiSeq, args: &[Letter]) -> Result<Rational, CumulantError> {
    if chi.len() != args.len() {
        return Err(CumulantError::ArgCount { expected: chi.len(), got: args.len() });
    }
    if args.len() > spec.degree_bound {
        return Err(CumulantError::DegreeBound { degree: args.len(), bound: spec.degree_bound });
    }
    for (i, l) in args.iter().enumerate().take(args.len() - 1) {
        if chi.get(i) != l.side {
            return Err(CumulantError::Invalid(format!("χ labels position {} against the side of {}", i + 1, l)));
        }
    }
    // explicit lattice sum, independent of the recursion behind `MomentFunctional`
    let mut total = Rational::zero();
    'outer: for pi in bnclattice::enumerate_bnc(chi)? {
        let mut prod = Rational::one();
        for block in pi.blocks() {
            let k = spec.value(&block.iter().map(|&i| args[i]).collect::<Vec<_>>());
            if k.is_zero() {
                continue 'outer;
            }
            prod *= k;
        }
        total += prod;
    }
    Ok(total)
}

/// The partitions `σ ∈ BNC(χ̂)` with `σ ∨ 0̂_χ = π̂`; summing `κ_σ` over them
/// expands a cumulant whose last entry is a product `Z_p⋯Z_q`.
pub fn expand_product_last_entry(
    pi: &BNCPartition,
    chi: &ChiSeq,
    chi_prime: &ChiSeq,
) -> Result<Vec<BNCPartition>, CumulantError> {
    if pi.chi() != chi {
        return Err(LatticeError::ChiMismatch.into());
    }
    let hat = HatEmbedding::new(chi, chi_prime)?;
    let pi_hat = hat.embed(pi)?;
    let zero_hat = hat.zero_hat();
    let mut out = Vec::new();
    for sigma in bnclattice::enumerate_bnc(&hat.chi_hat)? {
        if sigma.join(&zero_hat)? == pi_hat {
            out.push(sigma);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedViolation {
    pub chi: String,
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedReport {
    pub checked: usize,
    pub violations: Vec<MixedViolation>,
}

impl MixedReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `κ_χ(l1,…,lk, ω)` vanishes whenever `ω` is a product of
/// letters from a single group and some `li` belongs to another group.
pub fn check_mixed_vanishing(
    spec: &CumulantSpec,
    grouping: &BTreeMap<Letter, usize>,
    max_degree: usize,
) -> Result<MixedReport, CumulantError> {
    let phi = MomentFunctional::from_cumulants(AlgebraMode::free(spec.n, spec.m), spec.clone())?;
    let letters: Vec<Letter> = grouping.keys().copied().collect();
    let mut groups: BTreeMap<usize, Vec<Letter>> = BTreeMap::new();
    for (l, g) in grouping {
        groups.entry(*g).or_default().push(*l);
    }
    let mut report = MixedReport { checked: 0, violations: Vec::new() };
    for front in words_up_to(&letters, max_degree.saturating_sub(1)) {
        if front.is_empty() {
            continue;
        }
        for (g, members) in &groups {
            if front.letters().iter().all(|l| grouping[l] == *g) {
                continue;
            }
            for omega in words_up_to(members, max_degree - front.len()) {
                if omega.is_empty() {
                    continue;
                }
                let mut sides: Vec<Side> = front.letters().iter().map(|l| l.side).collect();
                sides.push(omega.letters().last().unwrap().side);
                let chi = ChiSeq::new(sides)?;
                let mut args: Vec<Word> = front.letters().iter().map(|l| Word::new(vec![*l])).collect();
                args.push(omega.clone());
                let k = cumulant_chi(&phi, &chi, &args)?;
                report.checked += 1;
                if !k.is_zero() {
                    report.violations.push(MixedViolation {
                        chi: chi.to_string(),
                        args: args.iter().map(|a| a.to_string()).collect(),
                        value: k.to_string(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::q;

    const S: Letter = Letter::left(1);
    const T: Letter = Letter::right(1);

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn chi(s: &str) -> ChiSeq {
        ChiSeq::parse(s).unwrap()
    }

    fn gaussian_pair(c: Rational) -> MomentFunctional {
        let one = Rational::one();
        let spec = CumulantSpec::gaussian(1, 1, &[vec![one.clone(), c.clone()], vec![c, one]]).unwrap();
        MomentFunctional::from_cumulants(AlgebraMode::free(1, 1), spec).unwrap()
    }

    #[test]
    fn moment_pi_examples() {
        let phi = gaussian_pair(q(1, 2));
        let c = chi("lr");
        let args = [w("X1"), w("Y1")];
        assert_eq!(moment_pi(&phi, &BNCPartition::zero(&c), &args).unwrap(), q(0, 1));
        assert_eq!(moment_pi(&phi, &BNCPartition::one(&c), &args).unwrap(), q(1, 2));
    }

    #[test]
    fn gaussian_cumulants() {
        let phi = gaussian_pair(q(1, 2));
        assert_eq!(cumulant_chi(&phi, &chi("lr"), &[w("X1"), w("Y1")]).unwrap(), q(1, 2));
        for s in ["lll", "lrl", "rrl", "rlr"] {
            let c = chi(s);
            let args: Vec<Word> =
                c.labels().iter().map(|s| Word::new(vec![if *s == Side::Left { S } else { T }])).collect();
            assert_eq!(cumulant_chi(&phi, &c, &args).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn two_point_cumulant_is_covariance() {
        let table = [(w("X1"), q(1, 3)), (w("X1 X1"), q(2, 1)), (w("X1 X2"), q(5, 7)), (w("X2"), q(-1, 2))];
        let phi = MomentFunctional::from_table(AlgebraMode::free(2, 0), table, 4).unwrap();
        let k = cumulant_chi(&phi, &chi("ll"), &[w("X1"), w("X2")]).unwrap();
        assert_eq!(k, q(5, 7) - q(1, 3) * q(-1, 2));
    }

    #[test]
    fn moments_from_cumulant_examples() {
        let mut semi = CumulantSpec::new(1, 0);
        semi.set(vec![S, S], q(1, 1)).unwrap();
        assert_eq!(moments_from_cumulants(&semi, &chi("llll"), &[S; 4]).unwrap(), q(2, 1));

        let c = q(1, 2);
        let one = Rational::one();
        let pair = CumulantSpec::gaussian(1, 1, &[vec![one.clone(), c.clone()], vec![c.clone(), one.clone()]]).unwrap();
        assert_eq!(moments_from_cumulants(&pair, &chi("lrlr"), &[S, T, S, T]).unwrap(), one + &c * &c);

        let mut first = CumulantSpec::new(1, 0);
        first.set(vec![S], q(3, 2)).unwrap();
        assert_eq!(moments_from_cumulants(&first, &chi("lll"), &[S; 3]).unwrap(), q(27, 8));
    }

    #[test]
    fn last_label_is_free() {
        let mut semi = CumulantSpec::new(1, 0);
        semi.set(vec![S, S], q(1, 1)).unwrap();
        assert!(moments_from_cumulants(&semi, &chi("llr"), &[S; 3]).is_ok());
        assert!(moments_from_cumulants(&semi, &chi("rll"), &[S; 3]).is_err());
    }

    #[test]
    fn degree_bound_is_hard() {
        let phi = gaussian_pair(q(0, 1));
        let long = Word::new(vec![S; 11]);
        assert!(matches!(phi.moment(&long), Err(CumulantError::DegreeBound { degree: 11, bound: 10 })));
    }

    #[test]
    fn expand_small_cases() {
        let c1 = chi("l");
        let parts = expand_product_last_entry(&BNCPartition::one(&c1), &c1, &chi("ll")).unwrap();
        assert_eq!(parts.len(), 2);

        let c = chi("ll");
        let parts = expand_product_last_entry(&BNCPartition::one(&c), &c, &chi("ll")).unwrap();
        let mut got: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        got.sort();
        assert_eq!(got, ["{{1,2,3}}", "{{1,2},{3}}", "{{1,3},{2}}"]);
    }

    #[test]
    fn mixed_vanishing_controls() {
        let one = Rational::one();
        let z = Rational::zero();
        let c = q(1, 3);
        // (X1, Y1) and (X2, Y2), block-diagonal covariance
        let cov = vec![
            vec![one.clone(), z.clone(), c.clone(), z.clone()],
            vec![z.clone(), one.clone(), z.clone(), c.clone()],
            vec![c.clone(), z.clone(), one.clone(), z.clone()],
            vec![z.clone(), c.clone(), z.clone(), one.clone()],
        ];
        let spec = CumulantSpec::gaussian(2, 2, &cov).unwrap();
        let grouping: BTreeMap<Letter, usize> =
            [(Letter::left(1), 0), (Letter::right(1), 0), (Letter::left(2), 1), (Letter::right(2), 1)].into();
        let report = check_mixed_vanishing(&spec, &grouping, 4).unwrap();
        assert!(report.passed(), "{:?}", report.violations.first());
        assert!(report.checked > 100);

        let single: BTreeMap<Letter, usize> = [(Letter::left(1), 0), (Letter::right(1), 0)].into();
        let r = check_mixed_vanishing(&spec, &single, 4).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 0);

        let mut bad = spec.clone();
        bad.set(vec![Letter::left(1), Letter::right(2)], one).unwrap();
        assert!(!check_mixed_vanishing(&bad, &grouping, 3).unwrap().passed());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n":1,"m":2,"entries":[{"pattern":[["l",1],["r",2]],"value":"1/2"},{"pattern":[["l",1]],"value":"-3"}],"degree_bound":8}"#;
        let spec = CumulantSpec::from_json(text).unwrap();
        assert_eq!(spec.value(&[Letter::left(1), Letter::right(2)]), q(1, 2));
        assert_eq!(spec.degree_bound, 8);
        let back = CumulantSpec::from_json(&spec.to_json().to_string()).unwrap();
        assert_eq!(back, spec);
        assert!(CumulantSpec::from_json(r#"{"n":1,"m":0,"entries":[{"pattern":[["l",2]],"value":"1"}]}"#).is_err());
    }

    #[test]
    fn table_json_round_trip() {
        let phi = gaussian_pair(q(1, 3));
        let words = [Word::unit(), w("X1"), w("X1 Y1"), w("Y1 X1 Y1 X1")];
        let j = table_json(&phi, &words).unwrap();
        let back = MomentFunctional::from_table_json(&j.to_string()).unwrap();
        for x in &words {
            assert_eq!(back.moment(x).unwrap(), phi.moment(x).unwrap());
        }
        assert!(back.moment(&w("Y1")).is_err());
    }

    #[test]
    fn table_rejects_inconsistent_classes() {
        let mode = AlgebraMode::bipartite(1, 1);
        let t = [(w("X1 Y1"), q(1, 2)), (w("Y1 X1"), q(1, 3))];
        assert!(MomentFunctional::from_table(mode, t, 4).is_err());
    }
}
