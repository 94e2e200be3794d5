//! Conjugate variables and Fisher information of a commuting pair `(X, Y)`
//! with a sampled joint density `f` on a rectangle.
//!
//! With `K_ε(u) = u/(u² + ε²)`, `h_X = K_ε ∗ f_X` and
//! `G_X(x, y) = ∫ K_ε(x − s) f(s, y) ds`, the left conjugate variable is
//! `ξ_ℓ = h_X(x) + f_X(x)·G_X(x, y)/f(x, y)` on `{f ≠ 0}`, and symmetrically
//! on the right. The kernel integrals are computed exactly against the
//! piecewise-linear interpolant of the samples.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("{0}")]
    Invalid(String),
    #[error("density has zero mass")]
    ZeroMass,
}

/// Rectangle `[xmin, xmax] × [ymin, ymax]` sampled at `nx × ny` nodes
/// including the edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec { xmin: lo, xmax: hi, ymin: lo, ymax: hi, nx: n, ny: n }
    }

    fn validate(&self) -> Result<(), GridError> {
        let ok = self.nx >= 3
            && self.ny >= 3
            && self.xmin.is_finite()
            && self.xmax.is_finite()
            && self.ymin.is_finite()
            && self.ymax.is_finite()
            && self.xmin < self.xmax
            && self.ymin < self.ymax;
        if ok {
            Ok(())
        } else {
            Err(GridError::Invalid("grid needs at least 3×3 nodes on a nondegenerate rectangle".into()))
        }
    }

    pub fn hx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.ymax - self.ymin) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.hx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ymin + j as f64 * self.hy()
    }
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Nonnegative node values, row-major (`values[j * nx + i]` at
/// `(x_i, y_j)`), normalized to unit trapezoid mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    spec: GridSpec,
    values: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    raw_mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self, GridError> {
        spec.validate()?;
        if values.len() != spec.nx * spec.ny {
            return Err(GridError::Invalid(format!("expected {} values, got {}", spec.nx * spec.ny, values.len())));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GridError::Invalid("density values must be finite and nonnegative".into()));
        }
        let wx = trapezoid_weights(spec.nx, spec.hx());
        let wy = trapezoid_weights(spec.ny, spec.hy());
        let mut g = DensityGrid { spec, values, wx, wy, raw_mass: 0.0 };
        let mass = g.mass();
        if !(mass > 0.0) {
            return Err(GridError::ZeroMass);
        }
        g.values.iter_mut().for_each(|v| *v /= mass);
        g.raw_mass = mass;
        Ok(g)
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self, GridError> {
        spec.validate()?;
        let values = (0..spec.nx * spec.ny)
            .into_par_iter()
            .map(|k| f(spec.x(k % spec.nx), spec.y(k / spec.nx)))
            .collect();
        Self::new(spec, values)
    }

    pub fn from_json(s: &str) -> Result<Self, GridError> {
        let f: GridFile = serde_json::from_str(s).map_err(|e| GridError::Invalid(e.to_string()))?;
        let spec = GridSpec { xmin: f.xmin, xmax: f.xmax, ymin: f.ymin, ymax: f.ymax, nx: f.nx, ny: f.ny };
        Self::new(spec, f.values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = self.spec;
        serde_json::to_value(GridFile {
            xmin: s.xmin,
            xmax: s.xmax,
            ymin: s.ymin,
            ymax: s.ymax,
            nx: s.nx,
            ny: s.ny,
            values: self.values.clone(),
        })
        .expect("serializable")
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    /// Trapezoid mass of the samples before normalization.
    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.wx[i] * self.wy[j]
    }

    fn mass(&self) -> f64 {
        self.integrate(|_, _, f| f)
    }

    /// `Σ w_ij g(i, j, f_ij)`, summed row by row in a fixed order.
    pub fn integrate(&self, g: impl Fn(usize, usize, f64) -> f64 + Sync) -> f64 {
        let nx = self.spec.nx;
        let rows: Vec<f64> = (0..self.spec.ny)
            .into_par_iter()
            .map(|j| (0..nx).map(|i| self.wx[i] * g(i, j, self.values[j * nx + i])).sum::<f64>() * self.wy[j])
            .collect();
        rows.iter().sum()
    }

    fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.spec.ny, self.spec.nx, &self.values)
    }
}

/// A one-dimensional density on equally spaced nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDensity {
    pub min: f64,
    pub max: f64,
    pub samples: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MarginalDensity {
    pub fn h(&self) -> f64 {
        (self.max - self.min) / (self.samples.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.h()
    }

    pub fn mass(&self) -> f64 {
        self.samples.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// Builds from samples of a density on `[min, max]`, renormalized.
    pub fn new(min: f64, max: f64, samples: Vec<f64>) -> Result<Self, GridError> {
        if samples.len() < 3 || !(min < max) {
            return Err(GridError::Invalid("need at least 3 nodes on a nondegenerate interval".into()));
        }
        let weights = trapezoid_weights(samples.len(), (max - min) / (samples.len() - 1) as f64);
        let mut m = MarginalDensity { min, max, samples, weights };
        let mass = m.mass();
        if !(mass > 0.0) {
            return Err(GridError::ZeroMass);
        }
        m.samples.iter_mut().for_each(|v| *v /= mass);
        Ok(m)
    }
}

/// `(f_X, f_Y)` by trapezoid integration of the grid, renormalized.
pub fn marginals(g: &DensityGrid) -> Result<(MarginalDensity, MarginalDensity), GridError> {
    let s = g.spec;
    let fx: Vec<f64> = (0..s.nx).map(|i| (0..s.ny).map(|j| g.wy[j] * g.at(i, j)).sum()).collect();
    let fy: Vec<f64> = (0..s.ny).map(|j| (0..s.nx).map(|i| g.wx[i] * g.at(i, j)).sum()).collect();
    Ok((MarginalDensity::new(s.xmin, s.xmax, fx)?, MarginalDensity::new(s.ymin, s.ymax, fy)?))
}

/// Node weights `W[i][k]` with `Σ_k W[i][k] f_k = ∫ K_ε(x_i − s) f̃(s) ds`,
/// `f̃` the piecewise-linear interpolant on `n` nodes of spacing `h`.
pub fn hilbert_matrix(n: usize, h: f64, eps: f64) -> DMatrix<f64> {
    // on the segment [s_j, s_j + h], with d = i − j:
    //   a(d) = ∫ K over the segment,  b(d) = ∫ τ K,  τ the local coordinate
    let half_log = |u: f64| 0.5 * (u * u + eps * eps).ln();
    let prim = |u: f64| u - eps * (u / eps).atan();
    let ab = |d: i64| {
        let (hi, lo) = (d as f64 * h, (d - 1) as f64 * h);
        let a = half_log(hi) - half_log(lo);
        let b = d as f64 * a - (prim(hi) - prim(lo)) / h;
        (a, b)
    };
    let span = n as i64;
    let table: Vec<(f64, f64)> = (-span..=span).map(ab).collect();
    let at = |d: i64| table[(d + span) as usize];
    DMatrix::from_fn(n, n, |i, k| {
        let d = i as i64 - k as i64;
        let mut w = 0.0;
        if k + 1 < n {
            let (a, b) = at(d);
            w += a - b;
        }
        if k > 0 {
            w += at(d + 1).1;
        }
        w
    })
}

/// `g_ε(x_i) = ∫ (x_i − s)/((x_i − s)² + ε²) f(s) ds` at every node.
pub fn hilbert_pv(m: &MarginalDensity, eps: f64) -> Result<Vec<f64>, GridError> {
    if !(eps > 0.0) {
        return Err(GridError::Invalid("ε must be positive".into()));
    }
    let w = hilbert_matrix(m.samples.len(), m.h(), eps);
    Ok((&w * nalgebra::DVector::from_column_slice(&m.samples)).iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// Kernel width `ε`; `None` uses the grid spacing of each axis.
    pub eps: Option<f64>,
    /// Combine widths `ε` and `ε/2` as `2ξ(ε/2) − ξ(ε)`.
    pub richardson: bool,
    /// Nodes with `f < mask_rel · max f` are outside the support.
    pub mask_rel: f64,
    /// Warn when more of the product of the marginal supports than this is
    /// masked.
    pub max_mask_fraction: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { eps: None, richardson: false, mask_rel: 1e-10, max_mask_fraction: 0.05 }
    }
}

/// `ξ_ℓ` and `ξ_r` on the grid nodes, zero on the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateField {
    pub nx: usize,
    pub ny: usize,
    pub xi_l: Vec<f64>,
    pub xi_r: Vec<f64>,
    pub mask: Vec<bool>,
    pub warnings: Vec<String>,
}

fn field_at_eps(g: &DensityGrid, fx: &MarginalDensity, fy: &MarginalDensity, ex: f64, ey: f64, mask: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let s = g.spec;
    let wx = hilbert_matrix(s.nx, s.hx(), ex);
    let wy = hilbert_matrix(s.ny, s.hy(), ey);
    let hx = &wx * nalgebra::DVector::from_column_slice(&fx.samples);
    let hy = &wy * nalgebra::DVector::from_column_slice(&fy.samples);
    let f = g.as_matrix();
    // rows are y, columns x
    let gx = &f * wx.transpose();
    let gy = &wy * &f;
    let mut xl = vec![0.0; s.nx * s.ny];
    let mut xr = vec![0.0; s.nx * s.ny];
    for j in 0..s.ny {
        for i in 0..s.nx {
            let k = j * s.nx + i;
            if mask[k] {
                continue;
            }
            let fij = f[(j, i)];
            xl[k] = hx[i] + fx.samples[i] * gx[(j, i)] / fij;
            xr[k] = hy[j] + fy.samples[j] * gy[(j, i)] / fij;
        }
    }
    (xl, xr)
}

/// The conjugate variables of `X` (left) and `Y` (right).
pub fn conjugate_field(g: &DensityGrid, cfg: &FieldConfig) -> Result<ConjugateField, GridError> {
    if cfg.eps.is_some_and(|e| !(e > 0.0)) {
        return Err(GridError::Invalid("ε must be positive".into()));
    }
    let s = g.spec;
    let (fx, fy) = marginals(g)?;
    let fmax = g.values.iter().cloned().fold(0.0, f64::max);
    let cut = cfg.mask_rel * fmax;
    let mask: Vec<bool> = g.values.iter().map(|&v| v < cut).collect();
    let xmax = fx.samples.iter().cloned().fold(0.0, f64::max);
    let ymax = fy.samples.iter().cloned().fold(0.0, f64::max);
    let mut in_product = 0usize;
    let mut masked = 0usize;
    for j in 0..s.ny {
        for i in 0..s.nx {
            if fx.samples[i] >= cfg.mask_rel * xmax && fy.samples[j] >= cfg.mask_rel * ymax {
                in_product += 1;
                if mask[j * s.nx + i] {
                    masked += 1;
                }
            }
        }
    }
    let mut warnings = Vec::new();
    let frac = masked as f64 / in_product.max(1) as f64;
    if frac > cfg.max_mask_fraction {
        warnings.push(format!(
            "support is far from a product set: {:.1}% of the product of the marginal supports has zero density",
            100.0 * frac
        ));
    }
    let (ex, ey) = cfg.eps.map_or((s.hx(), s.hy()), |e| (e, e));
    let (mut xl, mut xr) = field_at_eps(g, &fx, &fy, ex, ey, &mask);
    if cfg.richardson {
        let (hl, hr) = field_at_eps(g, &fx, &fy, ex / 2.0, ey / 2.0, &mask);
        for k in 0..xl.len() {
            xl[k] = 2.0 * hl[k] - xl[k];
            xr[k] = 2.0 * hr[k] - xr[k];
        }
    }
    Ok(ConjugateField { nx: s.nx, ny: s.ny, xi_l: xl, xi_r: xr, mask, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FisherEstimate {
    pub value: f64,
    pub warnings: Vec<String>,
}

/// `∫∫ (ξ_ℓ² + ξ_r²) f`.
pub fn fisher_numeric(g: &DensityGrid, cfg: &FieldConfig) -> Result<FisherEstimate, GridError> {
    let field = conjugate_field(g, cfg)?;
    let nx = g.spec.nx;
    let value = g.integrate(|i, j, f| {
        let k = j * nx + i;
        (field.xi_l[k].powi(2) + field.xi_r[k].powi(2)) * f
    });
    Ok(FisherEstimate { value, warnings: field.warnings })
}

/// The bi-free central limit pair with correlation `c` on `[−2, 2]²`:
/// `(1−c²)/(4π²)·√(4−x²)√(4−y²) / ((1−c²)² − c(1+c²)xy + c²(x²+y²))`.
pub fn semicircular_pdf(c: f64, x: f64, y: f64) -> f64 {
    let sx = (4.0 - x * x).max(0.0).sqrt();
    let sy = (4.0 - y * y).max(0.0).sqrt();
    let one_c2 = 1.0 - c * c;
    let den = one_c2 * one_c2 - c * (1.0 + c * c) * x * y + c * c * (x * x + y * y);
    one_c2 / (4.0 * std::f64::consts::PI.powi(2)) * sx * sy / den
}

pub fn semicircular_density(c: f64, spec: GridSpec) -> Result<DensityGrid, GridError> {
    if !(c.abs() < 1.0) {
        return Err(GridError::Invalid("need |c| < 1".into()));
    }
    DensityGrid::from_fn(spec, |x, y| semicircular_pdf(c, x, y))
}
