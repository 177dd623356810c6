//! Bounds whose constants are not explicit: the Lorentz–Sobolev embedding
//! into `L^∞`, imaginary powers of `I - Δ` and the Kato–Ponce product bound.

use num_complex::Complex64;

use super::CheckResult;
use crate::error::{Error, Result};
use crate::rearrange::rearrangement;
use crate::spectral::{bessel_potential, euclidean, Cutoff, Domain, GridFunction};

fn lorentz(f: &GridFunction, p: f64) -> Result<f64> {
    rearrangement(f)?.lorentz_p1_norm(p)
}

fn check_space(f: &GridFunction) -> Result<()> {
    if f.domain() != Domain::Space {
        return Err(Error::Shape("expected spatial samples".into()));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::param("p", format!("need 1 < p < ∞, got {p}")));
    }
    Ok(())
}

/// `max|(I - Δ)^{-s/2} f|` against `(s/(n-s)) ‖f‖_{L^{n/s,1}}`.
pub fn sobolev_embedding_check(f: &GridFunction, s: f64) -> Result<CheckResult> {
    check_space(f)?;
    let n = f.dim() as f64;
    if !(s > 0.0 && s < n) {
        return Err(Error::param("s", format!("need 0 < s < n = {n}, got {s}")));
    }
    let lhs = bessel_potential(f, Complex64::new(-s, 0.0))?.max_abs();
    let base = s / (n - s) * lorentz(f, n / s)?;
    let r = CheckResult::empirical("sobolev_embedding", lhs, base);
    let ratio = r.ratio();
    Ok(r.with("n", n).with("s", s).with("ratio", ratio))
}

/// `‖(I - Δ)^{-it} f‖_{L^{p,1}}` against `(1 + |t|)^{n/2+1} ‖f‖_{L^{p,1}}`.
/// The `L²` isometry of the unimodular multiplier is checked alongside:
/// relative deviation above `1e-12` fails the result.
pub fn imaginary_power_check(f: &GridFunction, t: f64, p: f64) -> Result<CheckResult> {
    check_space(f)?;
    check_p(p)?;
    let n = f.dim() as f64;
    let tf = bessel_potential(f, Complex64::new(0.0, -2.0 * t))?;
    let lhs = lorentz(&tf, p)?;
    let base = (1.0 + t.abs()).powf(0.5 * n + 1.0) * lorentz(f, p)?;
    let l2 = f.l2_norm();
    let l2_deviation = if l2 == 0.0 {
        tf.l2_norm()
    } else {
        (tf.l2_norm() - l2).abs() / l2
    };
    let mut r = CheckResult::empirical("imaginary_power", lhs, base);
    r.passed &= l2_deviation <= 1e-12;
    let ratio = r.ratio();
    Ok(r.with("t", t)
        .with("p", p)
        .with("ratio", ratio)
        .with("l2_deviation", l2_deviation))
}

/// `‖(I - Δ)^{s/2}[χ f]‖_{L^{p,1}}` against `‖(I - Δ)^{s/2} f‖_{L^{p,1}}`
/// where `χ(x)` is the radial cutoff profile evaluated at `|x|`.
pub fn kato_ponce_lorentz_check(f: &GridFunction, s: f64, p: f64, cutoff: Cutoff) -> Result<CheckResult> {
    check_space(f)?;
    check_p(p)?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("s", format!("need s > 0, got {s}")));
    }
    let grid = *f.grid();
    let data = f
        .data()
        .iter()
        .enumerate()
        .map(|(k, &z)| z * cutoff.profile(euclidean(&grid.point(k)[..grid.dim])))
        .collect();
    let cut = GridFunction::new(grid, Domain::Space, data)?;
    let order = Complex64::new(s, 0.0);
    let lhs = lorentz(&bessel_potential(&cut, order)?, p)?;
    let base = lorentz(&bessel_potential(f, order)?, p)?;
    let r = CheckResult::empirical("kato_ponce", lhs, base);
    let ratio = r.ratio();
    Ok(r.with("s", s).with("p", p).with("ratio", ratio))
}
