//! Lower bounds for `‖T_σ‖_{L^p → L^p}` on a periodic grid and their
//! comparison with the Lorentz–Sobolev condition constant.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hormander::{lorentz_condition, ConditionReport, PieceGrid};
use crate::oracles::CheckResult;
use crate::spectral::{
    apply_multiplier, forward_fourier, modulated_gaussian, random_band_limited, random_rough, Grid, GridFunction,
    LittlewoodPaleyFamily,
};
use crate::symbols::SymbolSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpNormEstimate {
    pub p: f64,
    /// Largest `‖T_σ f‖_p / ‖f‖_p` found.
    pub lower_bound: f64,
    /// Family and trial index of the maximiser; with `seed` it regenerates `f`.
    pub witness: String,
    pub witness_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub samples_per_dim: usize,
    pub box_side: f64,
}

/// Rayleigh quotient of `T*T` after `K = 2^m` power steps, for the first
/// `m` at which it stops changing. `T*T` is the Fourier multiplier `|σ|²`,
/// so the iterates are tracked in frequency with log-weights
/// `ln|f̂|² + K ln|σ|²`, which neither overflow nor underflow.
/// Returns `(‖T‖ estimate, m)`.
pub fn power_iteration_l2(sigma: &GridFunction, f0: &GridFunction) -> Result<(f64, u32)> {
    let fhat = forward_fourier(f0)?;
    sigma.check_compatible(&fhat)?;
    let a: Vec<f64> = sigma.data().iter().map(|z| z.norm_sqr()).collect();
    let base: Vec<f64> = fhat.data().iter().map(|z| z.norm_sqr().ln()).collect();
    let rayleigh = |k: f64| -> f64 {
        let lw: Vec<f64> = base
            .iter()
            .zip(&a)
            .map(|(&b, &ai)| if ai > 0.0 { b + k * ai.ln() } else { f64::NEG_INFINITY })
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (&l, &ai) in lw.iter().zip(&a) {
            let w = (l - top).exp();
            num += w * ai;
            den += w;
        }
        num / den
    };
    let mut prev = rayleigh(0.0);
    for m in 0..80 {
        let next = rayleigh((m as f64).exp2());
        if (next - prev).abs() <= 1e-15 * next {
            return Ok((next.sqrt(), m));
        }
        prev = next;
    }
    Ok((prev.sqrt(), 80))
}

fn lp_ratio(sigma: &GridFunction, f: &GridFunction, p: f64) -> Result<f64> {
    let norm = f.lp_norm(p);
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(apply_multiplier(sigma, f)?.lp_norm(p) / norm)
}

fn argmax_frequency(sigma: &GridFunction) -> [f64; 3] {
    let (k, _) = sigma.data().iter().enumerate().fold(
        (0, -1.0),
        |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best },
    );
    sigma.grid().frequency(k)
}

/// Frequencies where the symbol is least smooth: the centres `2^k a_k`
/// for scale-indexed kinds, otherwise the argmax of `|σ|`.
fn target_frequencies(spec: &SymbolSpec, sigma: &GridFunction, grid: &Grid) -> Vec<[f64; 3]> {
    if spec.is_scale_indexed() {
        if let Ok(fam) = LittlewoodPaleyFamily::for_grid(grid) {
            return fam
                .j_range()
                .map(|k| {
                    let a = spec.center(k as i64);
                    let scale = (k as f64).exp2();
                    [a[0] * scale, a[1] * scale, a[2] * scale]
                })
                .collect();
        }
    }
    vec![argmax_frequency(sigma)]
}

/// Deterministic test function number `trial ≥ 1`.
fn trial_function(grid: Grid, targets: &[[f64; 3]], seed: u64, trial: usize) -> Result<(GridFunction, &'static str)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let n = grid.dim;
    let h = grid.spacing();
    let clamp_width = |w: f64| w.clamp(2.0 * h, 0.25 * grid.box_side);
    let mut centre = [0.0; 3];
    for c in centre.iter_mut().take(n) {
        *c = rng.random_range(-0.25..0.25) * grid.box_side;
    }
    match (trial - 1) % 3 {
        0 => {
            let band = rng.random_range(0.25..0.9) * grid.nyquist();
            Ok((random_band_limited(grid, band, false, &mut rng)?, "band_limited"))
        }
        1 => {
            let xi = targets[rng.random_range(0..targets.len())];
            let spread = rng.random_range(0.02..0.5) * euclid(&xi[..n]).max(1.0 / grid.box_side);
            let f = modulated_gaussian(grid, &centre[..n], clamp_width(1.0 / spread), &xi[..n])?;
            Ok((f, "modulated_gaussian"))
        }
        _ => {
            let mut acc = GridFunction::zeros(grid, crate::spectral::Domain::Space);
            let rel = rng.random_range(0.02..0.5);
            for xi in targets {
                let spread = rel * euclid(&xi[..n]).max(1.0 / grid.box_side);
                let amp = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
                let g = modulated_gaussian(grid, &centre[..n], clamp_width(1.0 / spread), &xi[..n])?;
                acc = acc.zip_with(&g, |a, b| a + amp * b)?;
            }
            Ok((acc, "multiscale"))
        }
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::param("p", format!("need 1 < p < ∞, got {p}")));
    }
    Ok(())
}

/// Best ratio over: the plane wave at the argmax of `|σ|` (trial 0), then
/// `trials` seeded functions cycling through random band-limited functions,
/// Gaussian packets at the symbol's singular frequencies and multi-scale sums
/// of such packets. For `p = 2` a power iteration on `T*T` also runs.
pub fn empirical_opnorm(spec: &SymbolSpec, p: f64, trials: usize, seed: u64, grid: Grid) -> Result<OpNormEstimate> {
    check_p(p)?;
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    if !spec.is_bounded() {
        return Err(Error::Unsupported(
            "power-type symbols are unbounded at their centres; no operator norm to estimate".into(),
        ));
    }
    let sigma = spec.sample(grid)?;
    let n = grid.dim;
    let top = argmax_frequency(&sigma);
    let wave = GridFunction::from_fn(grid, |x| {
        let phase: f64 = (0..n).map(|k| top[k] * x[k]).sum();
        Complex64::from_polar(1.0, 2.0 * PI * phase)
    })?;
    let mut best = (lp_ratio(&sigma, &wave, p)?, "plane_wave".to_string(), 0);
    let targets = target_frequencies(spec, &sigma, &grid);
    for trial in 1..=trials {
        let (f, family) = trial_function(grid, &targets, seed, trial)?;
        let r = lp_ratio(&sigma, &f, p)?;
        if r > best.0 {
            best = (r, family.to_string(), trial);
        }
    }
    if p == 2.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f0 = random_rough(grid, 1.0, &mut rng)?;
        let (r, m) = power_iteration_l2(&sigma, &f0)?;
        if r > best.0 {
            best = (r, format!("power_iteration_2^{m}"), 0);
        }
    }
    Ok(OpNormEstimate {
        p,
        lower_bound: best.0,
        witness: best.1,
        witness_trial: best.2,
        trials,
        seed,
        dim: n,
        samples_per_dim: grid.samples_per_dim,
        box_side: grid.box_side,
    })
}

/// `|1/p - 1/2| < s/n` with `0 < s < n`.
pub fn check_region(p: f64, s: f64, n: usize) -> Result<()> {
    check_p(p)?;
    let nf = n as f64;
    if !(s > 0.0 && s < nf) {
        return Err(Error::param("s", format!("need 0 < s < n = {n}, got {s}")));
    }
    let gap = (1.0 / p - 0.5).abs();
    if gap >= s / nf {
        return Err(Error::param(
            "p, s",
            format!(
                "outside the region |1/p−1/2| < s/n: |1/{p} − 1/2| = {gap:.6} ≥ s/n = {s}/{n} = {:.6}",
                s / nf
            ),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub estimate: OpNormEstimate,
    pub condition: ConditionReport,
    /// Empirical check `lower_bound ≤ C_emp K`; see [`crate::oracles::calibrate`].
    pub result: CheckResult,
}

/// Empirical check `lower_bound ≤ C K` for an estimate against a precomputed condition.
pub fn theorem_bound_result(estimate: &OpNormEstimate, condition: &ConditionReport) -> CheckResult {
    CheckResult::empirical("theorem_bound", estimate.lower_bound, condition.k)
        .with("p", estimate.p)
        .with("s", condition.s)
        .with("n", estimate.dim as f64)
        .with("k", condition.k)
        .with("samples_per_dim", estimate.samples_per_dim as f64)
        .with("box_side", estimate.box_side)
}

/// Lower bound for the operator norm against `K` from the Lorentz condition
/// over the dyadic window resolved by `grid`. Outside the region the call
/// fails unless `override_region` is set.
#[allow(clippy::too_many_arguments)]
pub fn theorem_bound_check(
    spec: &SymbolSpec,
    p: f64,
    s: f64,
    grid: Grid,
    piece_grid: &PieceGrid,
    trials: usize,
    seed: u64,
    override_region: bool,
) -> Result<TheoremCheck> {
    match check_region(p, s, spec.dim) {
        Err(Error::Parameter { name: "p, s", .. }) if override_region => {}
        other => other?,
    }
    let fam = LittlewoodPaleyFamily::for_grid(&grid)?;
    let condition = lorentz_condition(spec, s, &fam, piece_grid)?;
    let estimate = empirical_opnorm(spec, p, trials, seed, grid)?;
    let result = theorem_bound_result(&estimate, &condition);
    Ok(TheoremCheck {
        estimate,
        condition,
        result,
    })
}
