//! Bi-free central limit families given by a covariance matrix.
//!
//! Variables are indexed lefts first: left `i` is row `i − 1`, right `j` is
//! row `n + j − 1`. Moments are sums over bi-non-crossing pairings; the
//! closed forms for Fisher information, entropy and entropy dimension are
//! `Tr(A⁻¹)`, `N/2·log(2πe) + ½log det A` and `rank A` with `N = n + m`.

use std::f64::consts::{E, PI};
use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnclattice::ChiSeq;
use crate::ncalg::Side;
use crate::quad::{adaptive_simpson, neville, Estimate, QuadError};

/// Longest pattern accepted by [`gaussian_moment`].
pub const MOMENT_CAP: usize = 32;
const SYM_TOL: f64 = 1e-10;
const RANK_RTOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("{0}")]
    Invalid(String),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("numerical rank is ambiguous: singular value {value:e} is within a factor 10 of the threshold {threshold:e}")]
    AmbiguousRank { value: f64, threshold: f64 },
    #[error("covariance is singular, so no polynomial conjugate variable exists")]
    NoPolynomialConjugate,
    #[error("pattern of length {len} needs Fock depth at least {len}, model has {depth}")]
    DepthInsufficient { len: usize, depth: usize },
    #[error("pattern length {len} exceeds the cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("variable {0} is out of range")]
    BadIndex(String),
    #[error("non-convergent: {0}")]
    NonConvergent(String),
}

impl From<QuadError> for GaussError {
    fn from(e: QuadError) -> Self {
        GaussError::NonConvergent(e.to_string())
    }
}

/// A real number or one of the two infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{}", round_sig(*x, 12)),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::NegInf => write!(f, "-inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(round_sig(*x, 12)),
            ExtReal::PosInf => s.serialize_str("inf"),
            ExtReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// A real symmetric positive semidefinite `(n+m)×(n+m)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    n: usize,
    m: usize,
    a: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovFile {
    n: usize,
    m: usize,
    matrix: Vec<Vec<f64>>,
}

impl Covariance {
    pub fn new(n: usize, m: usize, a: DMatrix<f64>) -> Result<Self, GaussError> {
        let size = n + m;
        if size == 0 || a.nrows() != size || a.ncols() != size {
            return Err(GaussError::Invalid(format!("matrix must be {}×{}", size, size)));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(GaussError::Invalid("matrix has non-finite entries".into()));
        }
        let scale = a.amax().max(1.0);
        for i in 0..size {
            for j in 0..i {
                if (a[(i, j)] - a[(j, i)]).abs() > SYM_TOL * scale {
                    return Err(GaussError::Invalid(format!("matrix is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let a = (&a + a.transpose()) * 0.5;
        let min = SymmetricEigen::new(a.clone()).eigenvalues.min();
        if min < -SYM_TOL * scale {
            return Err(GaussError::NotPsd(min));
        }
        Ok(Covariance { n, m, a })
    }

    pub fn from_rows(n: usize, m: usize, rows: &[Vec<f64>]) -> Result<Self, GaussError> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(GaussError::Invalid("matrix rows have unequal lengths".into()));
        }
        Self::new(n, m, DMatrix::from_fn(size, size, |i, j| rows[i][j]))
    }

    /// `[[1, c], [c, 1]]` with one left and one right variable.
    pub fn pair(c: f64) -> Result<Self, GaussError> {
        Self::from_rows(1, 1, &[vec![1.0, c], vec![c, 1.0]])
    }

    pub fn from_json(s: &str) -> Result<Self, GaussError> {
        let f: CovFile = serde_json::from_str(s).map_err(|e| GaussError::Invalid(e.to_string()))?;
        Self::from_rows(f.n, f.m, &f.matrix)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let matrix = (0..self.size()).map(|i| self.a.row(i).iter().copied().collect()).collect();
        serde_json::to_value(CovFile { n: self.n, m: self.m, matrix }).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.n + self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// `A + tI`, the covariance after adding free semicirculars of variance `t`.
    pub fn perturbed(&self, t: f64) -> Result<Self, GaussError> {
        if !(t >= 0.0) {
            return Err(GaussError::Invalid("perturbation time must be ≥ 0".into()));
        }
        let k = self.size();
        Ok(Covariance { n: self.n, m: self.m, a: &self.a + DMatrix::identity(k, k) * t })
    }

    /// `λ²A`, the covariance of the scaled family.
    pub fn scaled(&self, lambda: f64) -> Self {
        Covariance { n: self.n, m: self.m, a: &self.a * (lambda * lambda) }
    }

    /// Covariance of the sum of two bi-free families.
    pub fn sum(&self, other: &Covariance) -> Result<Self, GaussError> {
        if self.n != other.n || self.m != other.m {
            return Err(GaussError::Invalid("covariances of different shapes".into()));
        }
        Ok(Covariance { n: self.n, m: self.m, a: &self.a + &other.a })
    }

    fn row_of(&self, side: Side, index: u32) -> Result<usize, GaussError> {
        let i = index as usize;
        let bad = || GaussError::BadIndex(format!("{:?} {}", side, index));
        match side {
            Side::Left if (1..=self.n).contains(&i) => Ok(i - 1),
            Side::Right if (1..=self.m).contains(&i) => Ok(self.n + i - 1),
            _ => Err(bad()),
        }
    }

    fn cholesky(&self) -> Option<Cholesky<f64, Dyn>> {
        if numerical_rank_lenient(&self.a) < self.size() {
            return None;
        }
        Cholesky::new(self.a.clone())
    }
}

/// Rank with singular values below `1e−8·σ_max` treated as zero; errors
/// when a singular value sits within a factor 10 of that threshold.
pub fn numerical_rank(a: &DMatrix<f64>) -> Result<usize, GaussError> {
    let sv = a.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return Ok(0);
    }
    let threshold = RANK_RTOL * smax;
    for &s in sv.iter() {
        if s > threshold / 10.0 && s < threshold * 10.0 {
            return Err(GaussError::AmbiguousRank { value: s, threshold });
        }
    }
    Ok(sv.iter().filter(|&&s| s >= threshold).count())
}

fn numerical_rank_lenient(a: &DMatrix<f64>) -> usize {
    let sv = a.clone().singular_values();
    let threshold = RANK_RTOL * sv.max();
    sv.iter().filter(|&&s| s > threshold).count()
}

/// `φ(x_{p1} ⋯ x_{pk})`: the sum over bi-non-crossing pairings of the
/// products of covariances.
pub fn gaussian_moment(cov: &Covariance, pattern: &[(Side, u32)]) -> Result<f64, GaussError> {
    let k = pattern.len();
    if k > MOMENT_CAP {
        return Err(GaussError::CapExceeded { len: k, cap: MOMENT_CAP });
    }
    let rows = pattern.iter().map(|&(s, i)| cov.row_of(s, i)).collect::<Result<Vec<_>, _>>()?;
    if k == 0 {
        return Ok(1.0);
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let chi = ChiSeq::new(pattern.iter().map(|p| p.0).collect()).expect("nonempty");
    // bi-non-crossing in original order = non-crossing in s_χ order
    let seq: Vec<usize> = chi.sigma().0.iter().map(|&i| rows[i]).collect();
    // m[i][j]: sum over non-crossing pairings of seq[i..j]
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    for i in 0..=k {
        m[i][i] = 1.0;
    }
    for len in (2..=k).step_by(2) {
        for i in 0..=k - len {
            let j = i + len;
            let mut s = 0.0;
            for p in (i + 1..j).step_by(2) {
                s += cov.a[(seq[i], seq[p])] * m[i + 1][p] * m[p + 1][j];
            }
            m[i][j] = s;
        }
    }
    Ok(m[0][k])
}

/// Field operators on the full Fock space over `ℝ^N` with Gram matrix `A`,
/// truncated at tensor length `depth`. Vectors are coefficient arrays over
/// words; the word `a1⋯al` sits at `offset[l] + Σ a_i N^{l−i}`.
#[derive(Debug, Clone)]
pub struct FockModel {
    cov: Covariance,
    depth: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

impl FockModel {
    pub fn new(cov: &Covariance, depth: usize) -> Self {
        let nl = cov.size();
        let mut powers = vec![1usize];
        let mut offsets = vec![0usize];
        for l in 0..=depth {
            offsets.push(offsets[l] + powers[l]);
            powers.push(powers[l] * nl);
        }
        FockModel { cov: cov.clone(), depth, offsets, powers }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.depth + 1]
    }

    /// `l(f_i) + l*(f_i)` or `r(f_i) + r*(f_i)`.
    fn apply(&self, side: Side, i: usize, v: &[f64]) -> Vec<f64> {
        let nl = self.cov.size();
        let a = &self.cov.a;
        let mut out = vec![0.0; v.len()];
        for l in 0..=self.depth {
            let (off, pw) = (self.offsets[l], self.powers[l]);
            for code in 0..pw {
                let c = v[off + code];
                if c == 0.0 {
                    continue;
                }
                if l < self.depth {
                    let target = match side {
                        Side::Left => i * pw + code,
                        Side::Right => code * nl + i,
                    };
                    out[self.offsets[l + 1] + target] += c;
                }
                if l > 0 {
                    let (j, rest) = match side {
                        Side::Left => (code / self.powers[l - 1], code % self.powers[l - 1]),
                        Side::Right => (code % nl, code / nl),
                    };
                    out[self.offsets[l - 1] + rest] += a[(i, j)] * c;
                }
            }
        }
        out
    }
}

/// `⟨Ω, op(p1)⋯op(pk) Ω⟩` in the truncated model.
pub fn fock_moment(model: &FockModel, pattern: &[(Side, u32)]) -> Result<f64, GaussError> {
    if pattern.len() > model.depth {
        return Err(GaussError::DepthInsufficient { len: pattern.len(), depth: model.depth });
    }
    let rows = pattern.iter().map(|&(s, i)| model.cov.row_of(s, i)).collect::<Result<Vec<_>, _>>()?;
    let mut v = vec![0.0; model.dim()];
    v[0] = 1.0;
    for (&(side, _), &r) in pattern.iter().zip(&rows).rev() {
        v = model.apply(side, r, &v);
    }
    Ok(v[0])
}

/// Coefficients `b` of the `k`-th conjugate variable `ξ_k = Σ b_j S_j`
/// (1-based `k`): the solution of `A b = e_k`.
pub fn conjugate_coeffs(cov: &Covariance, k: usize) -> Result<DVector<f64>, GaussError> {
    if k == 0 || k > cov.size() {
        return Err(GaussError::BadIndex(k.to_string()));
    }
    let ch = cov.cholesky().ok_or(GaussError::NoPolynomialConjugate)?;
    let mut e = DVector::zeros(cov.size());
    e[k - 1] = 1.0;
    Ok(ch.solve(&e))
}

/// `Φ* = Tr(A⁻¹)`, infinite for singular `A`.
pub fn fisher(cov: &Covariance) -> ExtReal {
    match cov.cholesky() {
        Some(ch) => ExtReal::Finite(ch.inverse().trace()),
        None => ExtReal::PosInf,
    }
}

/// `Tr((A + tI)⁻¹)`.
pub fn fisher_perturbed(cov: &Covariance, t: f64) -> Result<ExtReal, GaussError> {
    Ok(fisher(&cov.perturbed(t)?))
}

/// `N/2·log(2πe) + ½·log det A`, or `−∞` for singular `A`.
pub fn entropy_closed(cov: &Covariance) -> ExtReal {
    match cov.cholesky() {
        Some(ch) => {
            let logdet: f64 = 2.0 * ch.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
            ExtReal::Finite(cov.size() as f64 / 2.0 * (2.0 * PI * E).ln() + 0.5 * logdet)
        }
        None => ExtReal::NegInf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance handed to adaptive Simpson on `u ∈ [0, 1 − δ]`.
    pub tol: f64,
    /// Cut point of the substitution `t = u/(1−u)`.
    pub delta: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-10, delta: 1e-6, max_depth: 48 }
    }
}

/// `N/2·log(2πe) + ½∫₀^∞ (N/(1+t) − Φ(t)) dt`.
///
/// The integral over `[0, T]`, `T = (1−δ)/δ`, runs in `u = t/(1+t)`. Beyond
/// `T` the integrand is replaced by `N/(1+t) − N/(t+s)` with `s` chosen so
/// that `N/(T+s) = Φ(T)`; the reported error adds the change of that tail
/// when `s` is fitted at `T/2` instead.
pub fn entropy_quadrature<F: Fn(f64) -> f64>(fisher_fn: F, n_plus_m: usize, cfg: &QuadConfig) -> Result<Estimate, GaussError> {
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) || !(cfg.tol > 0.0) {
        return Err(GaussError::Invalid("bad quadrature configuration".into()));
    }
    let nn = n_plus_m as f64;
    let g = |t: f64| nn / (1.0 + t) - fisher_fn(t);
    let integrand = |u: f64| {
        let w = 1.0 - u;
        g(u / w) / (w * w)
    };
    let body = adaptive_simpson(integrand, 0.0, 1.0 - cfg.delta, cfg.tol, cfg.max_depth)?;
    let big_t = (1.0 - cfg.delta) / cfg.delta;
    let tail_at = |t: f64| -> Result<f64, GaussError> {
        let phi = fisher_fn(t);
        if !(phi.is_finite() && phi > 0.0) {
            return Err(GaussError::NonConvergent(format!("Fisher information {} at t = {}", phi, t)));
        }
        let s = nn / phi - t;
        Ok(nn * ((big_t + s) / (big_t + 1.0)).ln())
    };
    let tail = tail_at(big_t)?;
    let tail_err = (tail - tail_at(big_t / 2.0)?).abs();
    let value = nn / 2.0 * (2.0 * PI * E).ln() + 0.5 * (body.value + tail);
    Ok(Estimate { value, error: 0.5 * (body.error + tail_err) })
}

/// Closed-form entropy dimension `rank(A)`.
pub fn entropy_dimension(cov: &Covariance) -> Result<usize, GaussError> {
    numerical_rank(&cov.a)
}

/// Default ε sequence for [`entropy_dimension_limit`].
pub fn default_eps_seq() -> Vec<f64> {
    (0..7).map(|k| 1e-3 / f64::powi(2.0, k)).collect()
}

/// `N − lim_{ε→0} ε·Φ(ε)`, extrapolating the samples on `eps_seq` to `ε = 0`.
pub fn entropy_dimension_limit<F: Fn(f64) -> f64>(fisher_fn: F, n_plus_m: usize, eps_seq: &[f64]) -> Result<Estimate, GaussError> {
    if eps_seq.len() < 2 || eps_seq.iter().any(|e| !(*e > 0.0)) || eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GaussError::Invalid("ε sequence must be positive and strictly decreasing".into()));
    }
    let ys = eps_seq
        .iter()
        .map(|&e| {
            let v = n_plus_m as f64 - e * fisher_fn(e);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(GaussError::NonConvergent(format!("Fisher information not finite at ε = {}", e)))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(neville(eps_seq, &ys, 0.0)?)
}
