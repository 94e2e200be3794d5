//! Golden examples with known closed-form answers, run by `bifree selftest`.

use num::One;
use serde::Serialize;

use crate::bipartite::{conjugate_field, fisher_numeric, hilbert_pv, marginals, semicircular_density, semicircular_pdf, DensityGrid, FieldConfig, GridSpec};
use crate::bnclattice::{BNCPartition, ChiSeq, HatEmbedding};
use crate::cumulant::{cumulant_chi, CumulantSpec, MomentFunctional};
use crate::derivation::{adjoint_apply, bifree_dq, conjugate_check, QuotientKind};
use crate::gaussfam::{
    conjugate_coeffs, default_eps_seq, entropy_closed, entropy_dimension, entropy_dimension_limit, fisher,
    fisher_perturbed, Covariance, ExtReal,
};
use crate::ncalg::{q, AlgebraMode, Letter, NCPolynomial, Rational, TensorPoly, Word};

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<(bool, String), String>;

fn item(name: &'static str, f: impl FnOnce() -> Check) -> Item {
    match f() {
        Ok((passed, detail)) => Item { name, passed, detail },
        Err(e) => Item { name, passed: false, detail: format!("error: {}", e) },
    }
}

fn eq_str(got: String, want: &str) -> Check {
    Ok((got == want, got))
}

fn close(got: f64, want: f64, rel: f64) -> Check {
    Ok(((got - want).abs() <= rel * want.abs().max(1.0), format!("{} (want {})", got, want)))
}

fn poly(s: &str) -> Result<NCPolynomial, String> {
    s.parse().map_err(|e: crate::ncalg::AlgebraError| e.to_string())
}

fn pair_spec(c: &Rational) -> CumulantSpec {
    let one = Rational::one();
    CumulantSpec::gaussian(1, 1, &[vec![one.clone(), c.clone()], vec![c.clone(), one]]).expect("valid")
}

fn pair_phi(c: &Rational) -> Result<MomentFunctional, String> {
    MomentFunctional::from_cumulants(AlgebraMode::free(1, 1), pair_spec(c)).map_err(|e| e.to_string())
}

fn xi_pair(c: &Rational) -> NCPolynomial {
    let s = &Rational::one() / (Rational::one() - c * c);
    (&NCPolynomial::letter(Letter::left(1)) - &NCPolynomial::letter(Letter::right(1)).scale(c)).scale(&s)
}

fn dq(p: &str, kind: QuotientKind) -> Result<String, String> {
    let m = AlgebraMode::free(2, 2);
    Ok(bifree_dq(&poly(p)?, &kind, &m).map_err(|e| e.to_string())?.to_string())
}

fn chi(s: &str) -> Result<ChiSeq, String> {
    ChiSeq::parse(s).map_err(|e| e.to_string())
}

/// `φ(Sⁿ Tᵐ)` on the exact pair.
fn st(phi: &MomentFunctional, n: usize, m: usize, extra: Option<Letter>) -> Result<Rational, String> {
    let mut v = vec![Letter::left(1); n];
    v.extend(std::iter::repeat(Letter::right(1)).take(m));
    v.extend(extra);
    phi.moment(&Word::new(v)).map_err(|e| e.to_string())
}

fn bipartite_fisher(c: f64) -> Check {
    let g = semicircular_density(c, GridSpec::square(-2.0, 2.0, 512)).map_err(|e| e.to_string())?;
    let est = fisher_numeric(&g, &FieldConfig::default()).map_err(|e| e.to_string())?;
    close(est.value, 2.0 / (1.0 - c * c), 0.02)
}

pub fn run() -> Vec<Item> {
    let mut out = Vec::new();
    out.push(item("dq left worked example", || {
        eq_str(
            dq("y1 X1 y1 x1 y2 X1 y3 y1 x2", QuotientKind::left(1))?,
            "y1 y1 y2 y3 y1 ⊗ x1 X1 x2 + y1 X1 y1 x1 y2 y3 y1 ⊗ x2",
        )
    }));
    out.push(item("dq right worked example", || {
        eq_str(
            dq("Y1 x1 Y1 x2 y1 x1 y2 Y1 x3", QuotientKind::right(1))?,
            "x1 x2 x1 x3 ⊗ Y1 y1 y2 Y1 + Y1 x1 x2 x1 x3 ⊗ y1 y2 Y1 + Y1 x1 Y1 x2 y1 x1 y2 x3 ⊗ 1",
        )
    }));
    out.push(item("flipped dq left worked example", || {
        eq_str(
            dq("y1 X1 y1 x1 y2 X1 y3 y1 x2", QuotientKind::flipped_left(1))?,
            "1 ⊗ y1 y1 x1 y2 X1 y3 y1 x2 + X1 x1 ⊗ y1 y1 y2 y3 y1 x2",
        )
    }));
    out.push(item("bipartite dq example", || {
        let b = AlgebraMode::bipartite(1, 1);
        let t = bifree_dq(&poly("X1 X1 Y1")?, &QuotientKind::left(1), &b).map_err(|e| e.to_string())?;
        eq_str(t.to_string(), "Y1 ⊗ X1 + X1 Y1 ⊗ 1")
    }));
    out.push(item("tensor star swaps legs", || {
        let t: TensorPoly = "X1 Y1 ⊗ x1 X2".parse().map_err(|e: crate::ncalg::AlgebraError| e.to_string())?;
        eq_str(t.star().to_string(), "X2 x1 ⊗ Y1 X1")
    }));
    out.push(item("hat of 1 is 1", || {
        let c = chi("lrl")?;
        let h = HatEmbedding::new(&c, &chi("lr")?).map_err(|e| e.to_string())?;
        let got = h.embed(&BNCPartition::one(&c)).map_err(|e| e.to_string())?;
        Ok((got == BNCPartition::one(&h.chi_hat), got.to_string()))
    }));
    out.push(item("hat of 0 for p=2, q=3", || {
        let h = HatEmbedding::new(&chi("lr")?, &chi("lr")?).map_err(|e| e.to_string())?;
        eq_str(h.zero_hat().to_string(), "{{1},{2,3}}")
    }));
    out.push(item("pair cumulant equals c", || {
        let c = q(1, 2);
        let phi = pair_phi(&c)?;
        let args = [Word::parse("X1").unwrap(), Word::parse("Y1").unwrap()];
        let k = cumulant_chi(&phi, &chi("lr")?, &args).map_err(|e| e.to_string())?;
        Ok((k == c, k.to_string()))
    }));
    out.push(item("order-three cumulants vanish", || {
        let phi = pair_phi(&q(1, 2))?;
        let mut worst = Rational::from_integer(0.into());
        for s in ["lll", "llr", "lrl", "lrr", "rll", "rlr", "rrl", "rrr"] {
            let ch = chi(s)?;
            let args: Vec<Word> = s
                .chars()
                .map(|c| Word::new(vec![if c == 'l' { Letter::left(1) } else { Letter::right(1) }]))
                .collect();
            let k = cumulant_chi(&phi, &ch, &args).map_err(|e| e.to_string())?;
            if k != Rational::from_integer(0.into()) {
                worst = k;
            }
        }
        Ok((worst == Rational::from_integer(0.into()), worst.to_string()))
    }));
    out.push(item("moment recursion for S^n T^m S and S^n T^m T", || {
        let c = q(1, 2);
        let phi = pair_phi(&c)?;
        for n in 0..4 {
            for m in 0..4 {
                let mut rs = Rational::from_integer(0.into());
                let mut rt = Rational::from_integer(0.into());
                for i in 0..n {
                    let a = st(&phi, i, m, None)? * st(&phi, n - i - 1, 0, None)?;
                    rs += a.clone();
                    rt += &c * a;
                }
                for j in 0..m {
                    let b = st(&phi, n, j, None)? * st(&phi, 0, m - j - 1, None)?;
                    rs += &c * b.clone();
                    rt += b;
                }
                if st(&phi, n, m, Some(Letter::left(1)))? != rs || st(&phi, n, m, Some(Letter::right(1)))? != rt {
                    return Ok((false, format!("n = {}, m = {}", n, m)));
                }
            }
        }
        Ok((true, "n, m < 4".into()))
    }));
    for (name, c) in [
        ("conjugate of semicircular pair, c = 1/2", q(1, 2)),
        ("conjugate of semicircular pair, c = 0", q(0, 1)),
        ("conjugate of semicircular pair, c = -3/4", q(-3, 4)),
    ] {
        out.push(item(name, || {
            let phi = pair_phi(&c)?;
            let r = conjugate_check(&phi, &QuotientKind::left(1), &xi_pair(&c), 6).map_err(|e| e.to_string())?;
            Ok((r.passed(), format!("{} words", r.checks.len())))
        }));
    }
    out.push(item("conjugate under independence is the free conjugate", || {
        // X semicircular, Y with nonzero higher cumulants, no mixed cumulants
        let mut spec = CumulantSpec::new(1, 1);
        let (x, y) = (Letter::left(1), Letter::right(1));
        spec.set(vec![x, x], q(1, 1)).map_err(|e| e.to_string())?;
        spec.set(vec![y, y], q(2, 1)).map_err(|e| e.to_string())?;
        spec.set(vec![y, y, y], q(1, 1)).map_err(|e| e.to_string())?;
        spec.set(vec![y, y, y, y], q(-1, 3)).map_err(|e| e.to_string())?;
        let phi = MomentFunctional::from_cumulants(AlgebraMode::free(1, 1), spec).map_err(|e| e.to_string())?;
        let r = conjugate_check(&phi, &QuotientKind::left(1), &poly("X1")?, 5).map_err(|e| e.to_string())?;
        Ok((r.passed(), format!("{} words", r.checks.len())))
    }));
    out.push(item("flipped adjoint of 1 ⊗ 1 is the conjugate variable", || {
        let c = q(1, 2);
        let phi = pair_phi(&c)?;
        let xi = xi_pair(&c);
        let got = adjoint_apply(&phi, &xi, &TensorPoly::one(), &QuotientKind::flipped_left(1)).map_err(|e| e.to_string())?;
        Ok((got == xi, got.to_string()))
    }));
    out.push(item("conjugate coefficients of the pair", || {
        let c = 0.5;
        let b = conjugate_coeffs(&Covariance::pair(c).map_err(|e| e.to_string())?, 1).map_err(|e| e.to_string())?;
        let want = [1.0 / (1.0 - c * c), -c / (1.0 - c * c)];
        let ok = (b[0] - want[0]).abs() < 1e-12 && (b[1] - want[1]).abs() < 1e-12;
        Ok((ok, format!("({}, {})", b[0], b[1])))
    }));
    out.push(item("Fisher information of the pair is 2/(1-c^2)", || {
        let c = 0.5;
        let f = fisher(&Covariance::pair(c).map_err(|e| e.to_string())?).to_f64();
        close(f, 2.0 / (1.0 - c * c), 1e-13)
    }));
    out.push(item("Fisher information of a singular covariance is infinite", || {
        let f = fisher(&Covariance::pair(1.0).map_err(|e| e.to_string())?);
        Ok((f == ExtReal::PosInf, f.to_string()))
    }));
    out.push(item("entropy of the pair", || {
        let h = entropy_closed(&Covariance::pair(0.5).map_err(|e| e.to_string())?).to_f64();
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        close(h, two_pi_e.ln() + 0.5 * 0.75f64.ln(), 1e-13)
    }));
    out.push(item("entropy of a singular covariance is -inf", || {
        let h = entropy_closed(&Covariance::pair(1.0).map_err(|e| e.to_string())?);
        Ok((h == ExtReal::NegInf, h.to_string()))
    }));
    out.push(item("entropy dimension 2 at c = 1/2, 1 at c = 1", || {
        let mut got = Vec::new();
        for c in [0.5, 1.0] {
            let cov = Covariance::pair(c).map_err(|e| e.to_string())?;
            let exact = entropy_dimension(&cov).map_err(|e| e.to_string())?;
            let lim = entropy_dimension_limit(|t| fisher_perturbed(&cov, t).map(|f| f.to_f64()).unwrap_or(f64::NAN), 2, &default_eps_seq())
                .map_err(|e| e.to_string())?;
            got.push((exact, lim.value));
        }
        let ok = got[0].0 == 2 && got[1].0 == 1 && (got[0].1 - 2.0).abs() < 1e-3 && (got[1].1 - 1.0).abs() < 1e-3;
        Ok((ok, format!("{:?}", got)))
    }));
    out.push(item("independent pair: left field is 2 h_X, constant in y", || {
        let spec = GridSpec::square(-2.0, 2.0, 129);
        let g = DensityGrid::from_fn(spec, |x, y| semicircular_pdf(0.0, x, y) * (1.0 + 0.25 * y)).map_err(|e| e.to_string())?;
        let field = conjugate_field(&g, &FieldConfig::default()).map_err(|e| e.to_string())?;
        let (fx, _) = marginals(&g).map_err(|e| e.to_string())?;
        let h = hilbert_pv(&fx, spec.hx()).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for j in 1..spec.ny - 1 {
            for i in 1..spec.nx - 1 {
                worst = worst.max((field.xi_l[j * spec.nx + i] - 2.0 * h[i]).abs());
            }
        }
        Ok((worst < 1e-9, format!("max deviation {:e}", worst)))
    }));
    out.push(item("bipartite Fisher of mu_0 on 512^2", || bipartite_fisher(0.0)));
    out.push(item("bipartite Fisher of mu_1/2 on 512^2", || bipartite_fisher(0.5)));
    out
}

pub fn all_passed(items: &[Item]) -> bool {
    items.iter().all(|i| i.passed)
}
