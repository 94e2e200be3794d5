//! Free and bi-free difference quotients, conjugate-variable checks and the
//! adjoint of the flipped quotients on polynomial tensors.
//!
//! For a word `w` and each occurrence of the target letter, write
//! `w = P·t·S`. Writing `L(·)`/`R(·)` for the left/right letters of a word:
//!
//! | quotient          | term                  |
//! |-------------------|-----------------------|
//! | `∂_X`             | `P ⊗ S`               |
//! | `∂_{ℓ,X}`         | `P·R(S) ⊗ L(S)`       |
//! | `∂_{r,Y}`         | `P·L(S) ⊗ R(S)`       |
//! | `∂̂_{ℓ,X}`         | `L(P) ⊗ R(P)·S`       |
//! | `∂̂_{r,Y}`         | `R(P) ⊗ L(P)·S`       |
//!
//! Other variables on the target's side behave like subalgebra symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cumulant::{CumulantError, MomentFunctional};
use crate::ncalg::{
    AlgebraError, AlgebraMode, Letter, NCPolynomial, Rational, Side, TensorConvention, TensorPoly, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cumulant(#[from] CumulantError),
    #[error("{0} is not a declared variable")]
    UnknownLetter(String),
    #[error("free difference quotient in bipartite mode needs a polynomial pure on the side of {0}")]
    InconsistentMode(String),
    #[error("this operation needs a {0} quotient")]
    WrongKind(&'static str),
    #[error("this operation needs bipartite mode")]
    NeedsBipartite,
    #[error("subalgebra symbols are not allowed here")]
    SymbolsNotAllowed,
    #[error("tensor term `{0}` is outside the domain reachable from 1⊗1")]
    OutsideDomain(String),
}

/// Which bi-free quotient: side of the target variable, flipped or not, and
/// the target index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuotientKind {
    pub side: Side,
    pub flipped: bool,
    pub index: u32,
}

impl QuotientKind {
    pub fn left(index: u32) -> Self {
        QuotientKind { side: Side::Left, flipped: false, index }
    }

    pub fn right(index: u32) -> Self {
        QuotientKind { side: Side::Right, flipped: false, index }
    }

    pub fn flipped_left(index: u32) -> Self {
        QuotientKind { side: Side::Left, flipped: true, index }
    }

    pub fn flipped_right(index: u32) -> Self {
        QuotientKind { side: Side::Right, flipped: true, index }
    }

    pub fn target(&self) -> Letter {
        match self.side {
            Side::Left => Letter::left(self.index),
            Side::Right => Letter::right(self.index),
        }
    }

    fn check(&self, mode: &AlgebraMode) -> Result<(), DerivationError> {
        check_target(&self.target(), mode)
    }
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.side == Side::Left { 'ℓ' } else { 'r' };
        let hat = if self.flipped { "^" } else { "" };
        write!(f, "∂{}_{{{},{}}}", hat, side, self.target())
    }
}

fn check_target(t: &Letter, mode: &AlgebraMode) -> Result<(), DerivationError> {
    if t.index == 0 || !t.is_variable() || mode.check_letter(t).is_err() {
        return Err(DerivationError::UnknownLetter(t.to_string()));
    }
    Ok(())
}

fn occurrences<'a>(w: &'a Word, t: &'a Letter) -> impl Iterator<Item = (Word, Word)> + 'a {
    let ls = w.letters();
    ls.iter()
        .enumerate()
        .filter(move |(_, l)| *l == t)
        .map(move |(i, _)| (Word::new(ls[..i].to_vec()), Word::new(ls[i + 1..].to_vec())))
}

/// The terms of a bi-free quotient on a single word.
pub fn dq_word(w: &Word, kind: &QuotientKind) -> Vec<(Word, Word)> {
    let t = kind.target();
    let same = kind.side;
    let other = kind.side.flip();
    occurrences(w, &t)
        .map(|(pre, suf)| {
            if kind.flipped {
                (pre.side_part(same), pre.side_part(other).concat(&suf))
            } else {
                (pre.concat(&suf.side_part(other)), suf.side_part(same))
            }
        })
        .collect()
}

/// `∂_t(p) = Σ P ⊗ S` over occurrences `P·t·S`.
pub fn free_dq(p: &NCPolynomial, letter: &Letter, mode: &AlgebraMode) -> Result<TensorPoly, DerivationError> {
    check_target(letter, mode)?;
    p.check(mode)?;
    if mode.is_bipartite() && p.terms().any(|(w, _)| !w.is_pure(letter.side)) {
        return Err(DerivationError::InconsistentMode(letter.to_string()));
    }
    let mut out = TensorPoly::zero();
    for (w, c) in p.terms() {
        for (a, b) in occurrences(w, letter) {
            out.add_term(a, b, c.clone());
        }
    }
    Ok(out)
}

/// One of the four bi-free quotients. In bipartite mode the result is
/// brought to normal form leg by leg.
pub fn bifree_dq(p: &NCPolynomial, kind: &QuotientKind, mode: &AlgebraMode) -> Result<TensorPoly, DerivationError> {
    kind.check(mode)?;
    p.check(mode)?;
    Ok(bifree_dq_unchecked(p, kind, mode))
}

fn bifree_dq_unchecked(p: &NCPolynomial, kind: &QuotientKind, mode: &AlgebraMode) -> TensorPoly {
    let mut out = TensorPoly::zero();
    for (w, c) in p.terms() {
        for (a, b) in dq_word(w, kind) {
            out.add_term(a.normal_form(mode), b.normal_form(mode), c.clone());
        }
    }
    out
}

/// The residual of the identity characterizing scalars, in bipartite mode
/// and for polynomials in the variables alone:
/// `Σ_i [∂_{ℓ,Xi}(P)(Xi⊗1) − (1⊗Xi)∂_{ℓ,Xi}(P)]
///  − Θ(Σ_j [∂_{r,Yj}(P)(Yj⊗1) − (1⊗Yj)∂_{r,Yj}(P)]) − (P⊗1 − 1⊗P)`.
pub fn scalar_identity_residual(p: &NCPolynomial, mode: &AlgebraMode) -> Result<TensorPoly, DerivationError> {
    if !mode.is_bipartite() {
        return Err(DerivationError::NeedsBipartite);
    }
    p.check(mode)?;
    if p.terms().any(|(w, _)| w.letters().iter().any(|l| !l.is_variable())) {
        return Err(DerivationError::SymbolsNotAllowed);
    }
    let st = TensorConvention::Straight;
    let one = Word::unit();
    let commutator_sum = |side: Side| {
        let mut acc = TensorPoly::zero();
        let arity = if side == Side::Left { mode.left_arity } else { mode.right_arity };
        for i in 1..=arity {
            let kind = QuotientKind { side, flipped: false, index: i };
            let d = bifree_dq_unchecked(p, &kind, mode);
            let v = Word::new(vec![kind.target()]);
            let right = TensorPoly::elementary(v.clone(), one.clone(), Rational::from_integer(1.into()));
            let left = TensorPoly::elementary(one.clone(), v, Rational::from_integer(1.into()));
            acc = &acc + &d.mul_unchecked(&right, st, mode);
            acc = &acc - &left.mul_unchecked(&d, st, mode);
        }
        acc
    };
    let lefts = commutator_sum(Side::Left);
    let rights = commutator_sum(Side::Right).swap_legs();
    let pn = p.normalized(mode);
    let scalar_part = &TensorPoly::from_polys(&pn, &NCPolynomial::one()) - &TensorPoly::from_polys(&NCPolynomial::one(), &pn);
    Ok(&(&lefts - &rights) - &scalar_part)
}

/// Elements of the triple tensor power, for composition identities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tensor3 {
    terms: BTreeMap<(Word, Word, Word), Rational>,
}

impl Tensor3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let key = (a, b, c);
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Θ_{(1),(2,3)}`: `Z1⊗Z2⊗Z3 ↦ Z1⊗Z3⊗Z2`.
    pub fn swap_23(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b, c), k) in &self.terms {
            out.add_term(a.clone(), c.clone(), b.clone(), k.clone());
        }
        out
    }
}

/// `(∂ ⊗ id)(t)`.
pub fn dq_first_leg(t: &TensorPoly, kind: &QuotientKind, mode: &AlgebraMode) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((a, b), c) in t.terms() {
        for (x, y) in dq_word(a, kind) {
            out.add_term(x.normal_form(mode), y.normal_form(mode), b.clone(), c.clone());
        }
    }
    out
}

/// `(id ⊗ ∂)(t)`.
pub fn dq_second_leg(t: &TensorPoly, kind: &QuotientKind, mode: &AlgebraMode) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((a, b), c) in t.terms() {
        for (x, y) in dq_word(b, kind) {
            out.add_term(a.clone(), x.normal_form(mode), y.normal_form(mode), c.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentCheck {
    pub word: String,
    /// `φ(Zξ)`
    pub lhs: String,
    /// `(φ⊗φ)(∂Z)`
    pub rhs: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateReport {
    pub quotient: String,
    pub max_degree: usize,
    pub checks: Vec<MomentCheck>,
    pub first_failure: Option<MomentCheck>,
}

impl ConjugateReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Words over the declared variables of degree `≤ max_degree`, by degree and
/// then lexicographically; one representative per class in bipartite mode.
pub fn test_words(mode: &AlgebraMode, max_degree: usize) -> Vec<Word> {
    let vars = mode.variables();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut layer = vec![Word::unit()];
    out.push(Word::unit());
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for w in &layer {
            for l in &vars {
                let mut v = w.0.clone();
                v.push(*l);
                next.push(Word(v));
            }
        }
        for w in &next {
            let nf = w.normal_form(mode);
            if seen.insert(nf.clone()) {
                out.push(nf);
            }
        }
        layer = next;
    }
    out
}

/// `(φ⊗φ)(t)`.
pub fn phi_tensor(phi: &MomentFunctional, t: &TensorPoly) -> Result<Rational, CumulantError> {
    t.map_bilinear(|a, b| Ok(phi.moment(a)? * phi.moment(b)?))
}

/// Compares `φ(Zξ)` with `(φ⊗φ)(∂Z)` for every test word `Z` of degree
/// `≤ max_degree`.
pub fn conjugate_check(
    phi: &MomentFunctional,
    kind: &QuotientKind,
    xi: &NCPolynomial,
    max_degree: usize,
) -> Result<ConjugateReport, DerivationError> {
    if kind.flipped {
        return Err(DerivationError::WrongKind("non-flipped"));
    }
    let mode = phi.mode().clone();
    kind.check(&mode)?;
    xi.check(&mode)?;
    let needed = max_degree + xi.degree();
    if needed > phi.degree_bound() {
        return Err(CumulantError::DegreeBound { degree: needed, bound: phi.degree_bound() }.into());
    }
    let mut report = ConjugateReport {
        quotient: kind.to_string(),
        max_degree,
        checks: Vec::new(),
        first_failure: None,
    };
    for z in test_words(&mode, max_degree) {
        let zp = NCPolynomial::word(z.clone());
        let lhs = phi.moment_poly(&zp.mul_unchecked(xi, &mode))?;
        let rhs = phi_tensor(phi, &bifree_dq_unchecked(&zp, kind, &mode))?;
        let check = MomentCheck { word: z.to_string(), lhs: lhs.to_string(), rhs: rhs.to_string(), passed: lhs == rhs };
        if !check.passed && report.first_failure.is_none() {
            report.first_failure = Some(check.clone());
        }
        report.checks.push(check);
    }
    Ok(report)
}

/// `(φ⊗id)(t) = Σ φ(a) b`.
fn phi_first_leg(phi: &MomentFunctional, t: &TensorPoly) -> Result<NCPolynomial, CumulantError> {
    let mut out = NCPolynomial::zero();
    for ((a, b), c) in t.terms() {
        let v = phi.moment(a)?;
        if !v.is_zero() {
            out.add_term(b.clone(), c * v);
        }
    }
    Ok(out)
}

fn domain_split(eta: &TensorPoly, kind: &QuotientKind) -> Result<(), DerivationError> {
    if !kind.flipped {
        return Err(DerivationError::WrongKind("flipped"));
    }
    for ((c, d), _) in eta.terms() {
        if !c.is_pure(kind.side) || !d.is_pure(kind.side.flip()) {
            return Err(DerivationError::OutsideDomain(format!("{} ⊗ {}", c, d)));
        }
    }
    Ok(())
}

/// `∂̂*(η)` for `η` in the span of `C⊗D` with `C` on the target's side and
/// `D` on the other, from `∂̂*(1⊗1) = ξ` and the recursion
///
/// * `∂̂*((1⊗D)η) = D ∂̂*(η)`
/// * `∂̂*((C⊗1)η) = C ∂̂*(η) − (φ⊗id)(∂̂(C*)^† η)`
///
/// where `^†` is the legwise adjoint `A⊗B ↦ A*⊗B*`. Each `C` is peeled in
/// one move.
pub fn adjoint_apply(
    phi: &MomentFunctional,
    xi: &NCPolynomial,
    eta: &TensorPoly,
    kind: &QuotientKind,
) -> Result<NCPolynomial, DerivationError> {
    adjoint_impl(phi, xi, eta, kind, false)
}

/// Same as [`adjoint_apply`] but peeling `C` one letter at a time.
pub fn adjoint_apply_letterwise(
    phi: &MomentFunctional,
    xi: &NCPolynomial,
    eta: &TensorPoly,
    kind: &QuotientKind,
) -> Result<NCPolynomial, DerivationError> {
    adjoint_impl(phi, xi, eta, kind, true)
}

fn adjoint_impl(
    phi: &MomentFunctional,
    xi: &NCPolynomial,
    eta: &TensorPoly,
    kind: &QuotientKind,
    letterwise: bool,
) -> Result<NCPolynomial, DerivationError> {
    let mode = phi.mode().clone();
    kind.check(&mode)?;
    xi.check(&mode)?;
    eta.check(&mode)?;
    domain_split(eta, kind)?;
    let st = TensorConvention::Straight;
    let mut out = NCPolynomial::zero();
    for ((c, d), coeff) in eta.terms() {
        let dw = NCPolynomial::word(d.clone());
        let mut acc = dw.mul_unchecked(xi, &mode);
        let tail = TensorPoly::elementary(Word::unit(), d.clone(), Rational::from_integer(1.into()));
        if letterwise {
            // acc holds ∂̂*(c_{j+1}⋯c_k ⊗ D)
            let ls = c.letters();
            for j in (0..ls.len()).rev() {
                let cj = NCPolynomial::letter(ls[j]);
                let rest = TensorPoly::elementary(Word::new(ls[j + 1..].to_vec()), d.clone(), Rational::from_integer(1.into()));
                let corr = bifree_dq_unchecked(&cj.star(), kind, &mode).adjoint_legs().mul_unchecked(&rest, st, &mode);
                acc = &cj.mul_unchecked(&acc, &mode) - &phi_first_leg(phi, &corr)?;
            }
        } else if !c.is_empty() {
            let cp = NCPolynomial::word(c.clone());
            let corr = bifree_dq_unchecked(&cp.star(), kind, &mode).adjoint_legs().mul_unchecked(&tail, st, &mode);
            acc = &cp.mul_unchecked(&acc, &mode) - &phi_first_leg(phi, &corr)?;
        }
        out = &out + &acc.scale(coeff);
    }
    Ok(out)
}

/// `⟨a, b⟩_φ = φ(b* a)`.
pub fn inner(phi: &MomentFunctional, a: &NCPolynomial, b: &NCPolynomial) -> Result<Rational, CumulantError> {
    phi.moment_poly(&b.star().mul_unchecked(a, phi.mode()))
}

/// `⟨a⊗b, c⊗d⟩ = φ(c* a) φ(d* b)`, extended bilinearly.
pub fn inner_tensor(phi: &MomentFunctional, s: &TensorPoly, t: &TensorPoly) -> Result<Rational, CumulantError> {
    let mode = phi.mode();
    let mut acc = Rational::zero();
    for ((a, b), k1) in s.terms() {
        for ((c, d), k2) in t.terms() {
            let first = phi.moment(&c.reversed().concat(a).normal_form(mode))?;
            if first.is_zero() {
                continue;
            }
            let second = phi.moment(&d.reversed().concat(b).normal_form(mode))?;
            acc += k1 * k2 * first * second;
        }
    }
    Ok(acc)
}
