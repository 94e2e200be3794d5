//! One-dimensional quadrature and extrapolation helpers.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("need at least two points with distinct abscissae")]
    TooFewPoints,
}

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Simpson with Richardson correction. The error estimate is the
/// sum of the local `|S2 − S1|/15` terms.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<Estimate, QuadError> {
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let value = simpson_rec(&eval, a, b, fa, fm, fb, whole, tol, max_depth, &mut err)?;
    Ok(Estimate { value, error: err })
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> Result<f64, QuadError>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err: &mut f64,
) -> Result<f64, QuadError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        *err += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err)?)
}

/// Neville's scheme: value at `x0` of the interpolating polynomial through
/// `(xs, ys)`. The error estimate is the last correction.
pub fn neville(xs: &[f64], ys: &[f64], x0: f64) -> Result<Estimate, QuadError> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(QuadError::TooFewPoints);
    }
    let mut p = ys.to_vec();
    let mut last = 0.0;
    for k in 1..n {
        for i in 0..n - k {
            let den = xs[i] - xs[i + k];
            if den == 0.0 {
                return Err(QuadError::TooFewPoints);
            }
            let new = ((x0 - xs[i + k]) * p[i] + (xs[i] - x0) * p[i + 1]) / den;
            if i == 0 {
                last = new - p[0];
            }
            p[i] = new;
        }
    }
    Ok(Estimate { value: p[0], error: last.abs() })
}
