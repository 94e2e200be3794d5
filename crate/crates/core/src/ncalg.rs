//! Exact noncommutative polynomials in left letters `X1..Xn`, right letters
//! `Y1..Ym` and opaque subalgebra symbols (`x1`, `y1`, ...).
//!
//! Coefficients are exact rationals. A polynomial does not carry its algebra
//! mode; operations that depend on it (products, normal forms) take an
//! [`AlgebraMode`] and validate letters against its arities.
//!
//! In bipartite mode every left letter commutes with every right letter and no
//! other relations hold, so each commutation class has a unique representative
//! with all left letters first (relative order within a side preserved).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact coefficient field.
pub type Rational = BigRational;

/// Shorthand for building a rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("letter {letter} exceeds declared arity (left {left}, right {right})")]
    ArityMismatch { letter: String, left: u32, right: u32 },
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Side {
    #[serde(rename = "l")]
    Left,
    #[serde(rename = "r")]
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    Variable,
    /// Uninterpreted element of the left or right coefficient subalgebra.
    Symbol,
}

/// A generator. Field order gives the canonical `(side, index)` ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub side: Side,
    pub index: u32,
    pub kind: LetterKind,
}

impl Letter {
    pub const fn left(index: u32) -> Self {
        Letter { side: Side::Left, index, kind: LetterKind::Variable }
    }

    pub const fn right(index: u32) -> Self {
        Letter { side: Side::Right, index, kind: LetterKind::Variable }
    }

    pub const fn left_symbol(index: u32) -> Self {
        Letter { side: Side::Left, index, kind: LetterKind::Symbol }
    }

    pub const fn right_symbol(index: u32) -> Self {
        Letter { side: Side::Right, index, kind: LetterKind::Symbol }
    }

    pub fn is_variable(&self) -> bool {
        self.kind == LetterKind::Variable
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match (self.side, self.kind) {
            (Side::Left, LetterKind::Variable) => 'X',
            (Side::Right, LetterKind::Variable) => 'Y',
            (Side::Left, LetterKind::Symbol) => 'x',
            (Side::Right, LetterKind::Symbol) => 'y',
        };
        write!(f, "{}{}", c, self.index)
    }
}

impl FromStr for Letter {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AlgebraError::Parse { what: "letter", detail: s.to_string() };
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(err)?;
        let rest = chars.as_str();
        // a bare `X` or `Y` means index 1
        let index = if rest.is_empty() {
            1
        } else {
            rest.parse::<u32>().map_err(|_| err())?
        };
        if index == 0 {
            return Err(err());
        }
        match head {
            'X' => Ok(Letter::left(index)),
            'Y' => Ok(Letter::right(index)),
            'x' => Ok(Letter::left_symbol(index)),
            'y' => Ok(Letter::right_symbol(index)),
            _ => Err(err()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Free,
    Bipartite,
}

/// Algebra mode with declared numbers of left and right variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraMode {
    pub kind: ModeKind,
    pub left_arity: u32,
    pub right_arity: u32,
}

impl AlgebraMode {
    pub fn free(n: u32, m: u32) -> Self {
        AlgebraMode { kind: ModeKind::Free, left_arity: n, right_arity: m }
    }

    pub fn bipartite(n: u32, m: u32) -> Self {
        AlgebraMode { kind: ModeKind::Bipartite, left_arity: n, right_arity: m }
    }

    pub fn is_bipartite(&self) -> bool {
        self.kind == ModeKind::Bipartite
    }

    /// Subalgebra symbols are not counted against the arities.
    pub fn check_letter(&self, l: &Letter) -> Result<(), AlgebraError> {
        if !l.is_variable() {
            return Ok(());
        }
        let bound = match l.side {
            Side::Left => self.left_arity,
            Side::Right => self.right_arity,
        };
        if l.index > bound {
            return Err(AlgebraError::ArityMismatch {
                letter: l.to_string(),
                left: self.left_arity,
                right: self.right_arity,
            });
        }
        Ok(())
    }

    /// The declared variables, lefts first.
    pub fn variables(&self) -> Vec<Letter> {
        (1..=self.left_arity)
            .map(Letter::left)
            .chain((1..=self.right_arity).map(Letter::right))
            .collect()
    }
}

/// A monomial. The empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Letters of the given side, in order.
    pub fn side_part(&self, side: Side) -> Word {
        Word(self.0.iter().filter(|l| l.side == side).copied().collect())
    }

    pub fn is_pure(&self, side: Side) -> bool {
        self.0.iter().all(|l| l.side == side)
    }

    /// Stable partition of the letters by side, lefts first.
    pub fn bipartite_normal_form(&self) -> Word {
        let mut v = Vec::with_capacity(self.len());
        v.extend(self.0.iter().filter(|l| l.side == Side::Left));
        v.extend(self.0.iter().filter(|l| l.side == Side::Right));
        Word(v)
    }

    pub fn normal_form(&self, mode: &AlgebraMode) -> Word {
        if mode.is_bipartite() {
            self.bipartite_normal_form()
        } else {
            self.clone()
        }
    }

    pub fn check(&self, mode: &AlgebraMode) -> Result<(), AlgebraError> {
        self.0.iter().try_for_each(|l| mode.check_letter(l))
    }

    pub fn parse(s: &str) -> Result<Word, AlgebraError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            letters.push(tok.parse::<Letter>()?);
        }
        Ok(Word(letters))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

/// Exact rational linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPolynomial {
    terms: BTreeMap<Word, Rational>,
}

impl NCPolynomial {
    pub fn zero() -> Self {
        NCPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        Self::monomial(Word::unit(), c)
    }

    pub fn monomial(w: Word, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        Self::monomial(Word(vec![l]), Rational::one())
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(w, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Adds `c * w`, dropping the entry if it cancels.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NCPolynomial { terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect() }
    }

    pub fn check(&self, mode: &AlgebraMode) -> Result<(), AlgebraError> {
        self.terms.keys().try_for_each(|w| w.check(mode))
    }

    /// Rewrites every word into the canonical representative for `mode`.
    pub fn normalized(&self, mode: &AlgebraMode) -> Self {
        if !mode.is_bipartite() {
            return self.clone();
        }
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.bipartite_normal_form(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self, mode: &AlgebraMode) -> Result<Self, AlgebraError> {
        self.check(mode)?;
        other.check(mode)?;
        Ok(self.mul_unchecked(other, mode))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self, mode: &AlgebraMode) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2).normal_form(mode), c1 * c2);
            }
        }
        out
    }

    /// Word reversal with every letter self-adjoint. Coefficients are real.
    pub fn star(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.reversed(), c.clone());
        }
        out
    }

    /// Keeps only the terms whose words satisfy `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> Self {
        NCPolynomial {
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Linear extension of `f` over words.
    pub fn map_linear<E>(
        &self,
        mut f: impl FnMut(&Word) -> Result<Rational, E>,
    ) -> Result<Rational, E> {
        let mut acc = Rational::zero();
        for (w, c) in &self.terms {
            acc += c * f(w)?;
        }
        Ok(acc)
    }
}

impl std::ops::Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Add for NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: NCPolynomial) -> NCPolynomial {
        &self + &rhs
    }
}

impl std::ops::Sub for NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: NCPolynomial) -> NCPolynomial {
        &self - &rhs
    }
}

impl FromIterator<(Word, Rational)> for NCPolynomial {
    fn from_iter<I: IntoIterator<Item = (Word, Rational)>>(iter: I) -> Self {
        let mut p = NCPolynomial::zero();
        for (w, c) in iter {
            p.add_term(w, c);
        }
        p
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Writes `terms` as `a*u + b*v - ...` with `body` rendering each key.
fn write_terms<'a, K: 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a K, &'a Rational)>,
    is_unit: impl Fn(&K) -> bool,
    body: impl Fn(&mut fmt::Formatter<'_>, &K) -> fmt::Result,
) -> fmt::Result {
    let mut first = true;
    for (k, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        if is_unit(k) {
            write_rational(f, &mag)?;
            continue;
        }
        if !mag.is_one() {
            write_rational(f, &mag)?;
            write!(f, "*")?;
        }
        body(f, k)?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter(), |w| w.is_empty(), |f, w| write!(f, "{}", w))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let err = || AlgebraError::Parse { what: "rational", detail: s.to_string() };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(n, d))
}

/// Splits a literal into signed term bodies at top-level `+`/`-`.
/// Splits on top-level `+`/`-`. One sign may lead the input; otherwise every
/// operator must sit between two nonempty terms.
fn split_signed_terms(s: &str, what: &'static str) -> Result<Vec<(bool, String)>, AlgebraError> {
    let err = |detail: &str| AlgebraError::Parse { what, detail: format!("{} in `{}`", detail, s.trim()) };
    let mut out = Vec::new();
    let mut neg = false;
    let mut signed = false;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                // a sign directly after `*` or `/` belongs to a number
                let trimmed = cur.trim_end();
                if trimmed.ends_with('*') || trimmed.ends_with('/') {
                    cur.push(ch);
                    continue;
                }
                if !cur.trim().is_empty() {
                    out.push((neg, std::mem::take(&mut cur)));
                } else if !out.is_empty() || signed {
                    return Err(err("two operators in a row"));
                }
                cur.clear();
                neg = ch == '-';
                signed = true;
            }
            _ => cur.push(ch),
        }
    }
    if cur.trim().is_empty() {
        return Err(err("missing term"));
    }
    out.push((neg, cur));
    Ok(out)
}

/// Splits `3/4*X1 Y1` into a coefficient and the remainder.
fn split_coeff(body: &str) -> Result<(Rational, &str), AlgebraError> {
    let body = body.trim();
    if let Some((c, rest)) = body.split_once('*') {
        if rest.trim().is_empty() {
            return Err(AlgebraError::Parse { what: "term", detail: format!("nothing after `*` in `{}`", body) });
        }
        return Ok((parse_rational(c)?, rest.trim()));
    }
    // bare scalar term
    if body.chars().all(|c| c.is_ascii_digit() || c == '/' || c.is_whitespace()) {
        return Ok((parse_rational(body)?, ""));
    }
    Ok((Rational::one(), body))
}

impl FromStr for NCPolynomial {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(AlgebraError::Parse { what: "polynomial", detail: "empty input".into() });
        }
        let mut p = NCPolynomial::zero();
        for (neg, body) in split_signed_terms(s, "polynomial")? {
            let (mut c, rest) = split_coeff(&body)?;
            if neg {
                c = -c;
            }
            p.add_term(Word::parse(rest)?, c);
        }
        Ok(p)
    }
}

/// Multiplication convention on the algebraic tensor square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorConvention {
    /// `(a⊗b)(c⊗d) = ac ⊗ bd`
    Straight,
    /// `(a⊗b)(c⊗d) = ac ⊗ db`
    OppositeSecondLeg,
}

/// Exact rational combination of elementary tensors `u ⊗ v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorPoly {
    terms: BTreeMap<(Word, Word), Rational>,
}

impl TensorPoly {
    pub fn zero() -> Self {
        TensorPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::elementary(Word::unit(), Word::unit(), Rational::one())
    }

    pub fn elementary(a: Word, b: Word, c: Rational) -> Self {
        let mut t = Self::zero();
        t.add_term(a, b, c);
        t
    }

    /// `p ⊗ q` for polynomials.
    pub fn from_polys(p: &NCPolynomial, qp: &NCPolynomial) -> Self {
        let mut t = Self::zero();
        for (a, ca) in p.terms() {
            for (b, cb) in qp.terms() {
                t.add_term(a.clone(), b.clone(), ca * cb);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TensorPoly { terms: self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect() }
    }

    pub fn check(&self, mode: &AlgebraMode) -> Result<(), AlgebraError> {
        self.terms.keys().try_for_each(|(a, b)| {
            a.check(mode)?;
            b.check(mode)
        })
    }

    pub fn normalized(&self, mode: &AlgebraMode) -> Self {
        if !mode.is_bipartite() {
            return self.clone();
        }
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(a.bipartite_normal_form(), b.bipartite_normal_form(), c.clone());
        }
        out
    }

    pub fn mul(
        &self,
        other: &Self,
        convention: TensorConvention,
        mode: &AlgebraMode,
    ) -> Result<Self, AlgebraError> {
        self.check(mode)?;
        other.check(mode)?;
        Ok(self.mul_unchecked(other, convention, mode))
    }

    pub(crate) fn mul_unchecked(
        &self,
        other: &Self,
        convention: TensorConvention,
        mode: &AlgebraMode,
    ) -> Self {
        let mut out = Self::zero();
        for ((a, b), c1) in &self.terms {
            for ((x, y), c2) in &other.terms {
                let first = a.concat(x).normal_form(mode);
                let second = match convention {
                    TensorConvention::Straight => b.concat(y),
                    TensorConvention::OppositeSecondLeg => y.concat(b),
                }
                .normal_form(mode);
                out.add_term(first, second, c1 * c2);
            }
        }
        out
    }

    /// `(A⊗B)^⋆ = B*⊗A*`.
    pub fn star(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(b.reversed(), a.reversed(), c.clone());
        }
        out
    }

    /// Componentwise adjoint `A*⊗B*` (the adjoint of left multiplication on
    /// the Hilbert tensor product), without swapping legs.
    pub fn adjoint_legs(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(a.reversed(), b.reversed(), c.clone());
        }
        out
    }

    /// Legs swapped, no adjoint.
    pub fn swap_legs(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(b.clone(), a.clone(), c.clone());
        }
        out
    }

    /// Multiplication map `a⊗b ↦ ab`.
    pub fn contract(&self, mode: &AlgebraMode) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(a.concat(b).normal_form(mode), c.clone());
        }
        out
    }

    /// Applies a bilinear scalar form leg by leg and sums.
    pub fn map_bilinear<E>(
        &self,
        mut f: impl FnMut(&Word, &Word) -> Result<Rational, E>,
    ) -> Result<Rational, E> {
        let mut acc = Rational::zero();
        for ((a, b), c) in &self.terms {
            acc += c * f(a, b)?;
        }
        Ok(acc)
    }
}

impl std::ops::Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, rhs: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &TensorPoly {
    type Output = TensorPoly;
    fn sub(self, rhs: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(a.clone(), b.clone(), -c.clone());
        }
        out
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter(), |_| false, |f, (a, b)| write!(f, "{} ⊗ {}", a, b))
    }
}

impl FromStr for TensorPoly {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(AlgebraError::Parse { what: "tensor", detail: "empty input".into() });
        }
        if s.trim() == "0" {
            return Ok(TensorPoly::zero());
        }
        let s = s.replace("(x)", "⊗");
        let mut t = TensorPoly::zero();
        for (neg, body) in split_signed_terms(&s, "tensor")? {
            let (left, right) = body.split_once('⊗').ok_or_else(|| AlgebraError::Parse {
                what: "tensor",
                detail: format!("missing ⊗ in term `{}`", body.trim()),
            })?;
            let (mut c, lw) = split_coeff(left)?;
            if neg {
                c = -c;
            }
            t.add_term(Word::parse(lw)?, Word::parse(right)?, c);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NCPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn product_examples() {
        let bi = AlgebraMode::bipartite(1, 1);
        let fr = AlgebraMode::free(1, 1);
        assert_eq!(p("X1").mul(&p("Y1"), &bi).unwrap().to_string(), "X1 Y1");
        let a = p("X1 + Y1");
        let b = p("X1 - Y1");
        assert_eq!(a.mul(&b, &fr).unwrap(), p("X1 X1 - X1 Y1 + Y1 X1 - Y1 Y1"));
        assert_eq!(a.mul(&b, &bi).unwrap(), p("X1 X1 - Y1 Y1"));
    }

    #[test]
    fn arity_is_enforced() {
        let mode = AlgebraMode::free(1, 1);
        let err = p("X2").mul(&p("X1"), &mode).unwrap_err();
        assert!(matches!(err, AlgebraError::ArityMismatch { .. }));
        // symbols are not arity-bound
        assert!(p("x7 X1").mul(&p("y3"), &mode).is_ok());
    }

    #[test]
    fn star_examples() {
        assert_eq!(p("X1 X2 Y1").star(), p("Y1 X2 X1"));
        assert_eq!(p("2/3*X1").star(), p("2/3*X1"));
        assert_eq!(p("X1 Y1 - Y1 X1").star(), p("Y1 X1 - X1 Y1"));
    }

    #[test]
    fn normal_form_examples() {
        let w = Word::parse("Y1 X1 Y2 X2").unwrap();
        assert_eq!(w.bipartite_normal_form().to_string(), "X1 X2 Y1 Y2");
        let w = Word::parse("X1 X2").unwrap();
        assert_eq!(w.bipartite_normal_form(), w);
        let w = Word::parse("Y X Y X").unwrap();
        assert_eq!(w.bipartite_normal_form().to_string(), "X1 X1 Y1 Y1");
    }

    #[test]
    fn tensor_examples() {
        let mode = AlgebraMode::free(1, 1);
        let t = |s: &str| s.parse::<TensorPoly>().unwrap();
        let st = TensorConvention::Straight;
        let op = TensorConvention::OppositeSecondLeg;
        assert_eq!(t("X1 ⊗ 1").mul(&t("1 ⊗ Y1"), st, &mode).unwrap(), t("X1 ⊗ Y1"));
        assert_eq!(t("1 ⊗ x1").mul(&t("1 ⊗ x2"), st, &mode).unwrap(), t("1 ⊗ x1 x2"));
        assert_eq!(t("1 ⊗ x1").mul(&t("1 ⊗ x2"), op, &mode).unwrap(), t("1 ⊗ x2 x1"));
        assert_eq!(t("X1 ⊗ Y1").mul(&t("X1 ⊗ Y1"), st, &mode).unwrap(), t("X1 X1 ⊗ Y1 Y1"));
        assert_eq!(t("x1 ⊗ y1").star(), t("y1 ⊗ x1"));
        assert_eq!(TensorPoly::one().star(), TensorPoly::one());
        assert_eq!(t("X1 ⊗ X1 Y1").star(), t("Y1 X1 ⊗ X1"));
    }

    #[test]
    fn literal_round_trip() {
        for s in ["X1 X1 - 2/3*X1 Y1 + 1", "-X1", "0", "-1/2 + 3*y2 x1", "5/7*Y2 Y1 X3"] {
            let poly = p(s);
            assert_eq!(p(&poly.to_string()), poly);
        }
        let t: TensorPoly = "Y1 ⊗ X1 + X1 Y1 ⊗ 1 - 1/2*1 ⊗ 1".parse().unwrap();
        assert_eq!(t.to_string(), "-1/2*1 ⊗ 1 + Y1 ⊗ X1 + X1 Y1 ⊗ 1");
        assert_eq!(t.to_string().parse::<TensorPoly>().unwrap(), t);
    }

    #[test]
    fn canonical_order_is_degree_then_letters() {
        let poly = p("Y1 + X1 X1 + X2 + 1 + x1 + X1");
        let words: Vec<String> = poly.terms().map(|(w, _)| w.to_string()).collect();
        assert_eq!(words, ["1", "X1", "x1", "X2", "Y1", "X1 X1"]);
    }

    #[test]
    fn bad_literals_are_rejected() {
        assert!("X0".parse::<NCPolynomial>().is_err());
        assert!("Z1".parse::<NCPolynomial>().is_err());
        assert!("1/0*X1".parse::<NCPolynomial>().is_err());
        assert!("X1 Y1".parse::<TensorPoly>().is_err());
        for bad in ["X1 +", "X1 + - Y1", "+", "3/4*", "- - X1"] {
            assert!(bad.parse::<NCPolynomial>().is_err(), "{}", bad);
        }
        assert_eq!("-X1 + 2*Y1".parse::<NCPolynomial>().unwrap().to_string(), "-X1 + 2*Y1");
        assert!("0".parse::<TensorPoly>().unwrap().is_zero());
    }
}
