//! Seeded batches of checks. Each case draws from its own ChaCha stream, so
//! a case is reproducible from `(seed, index)` alone.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    calibrate, holder_chain, holder_lorentz, imaginary_power_check, kato_ponce_lorentz_check, kernel_bound_check,
    kernel_transform_check, sobolev_embedding_check, sunrise_check, three_lines_identity, CheckResult, ConstantUsed,
};
use crate::error::{Error, Result};
use crate::maximal::{lemma_ratio, lemma_search, unit_ball_volume, MaximalOperator};
use crate::rearrange::StepProfile;
use crate::spectral::{random_band_limited, random_rough, Cutoff, Domain, Grid, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    ThreeLines,
    HolderLorentz,
    Sunrise,
    BesselKernel,
    SobolevEmbedding,
    ImaginaryPower,
    KatoPonce,
    MaximalLemma,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ThreeLines,
        Suite::HolderLorentz,
        Suite::Sunrise,
        Suite::BesselKernel,
        Suite::SobolevEmbedding,
        Suite::ImaginaryPower,
        Suite::KatoPonce,
        Suite::MaximalLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ThreeLines => "three_lines",
            Suite::HolderLorentz => "holder_lorentz",
            Suite::Sunrise => "sunrise",
            Suite::BesselKernel => "bessel_kernel",
            Suite::SobolevEmbedding => "sobolev_embedding",
            Suite::ImaginaryPower => "imaginary_power",
            Suite::KatoPonce => "kato_ponce",
            Suite::MaximalLemma => "maximal_lemma",
        }
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::ThreeLines => 9,
            Suite::HolderLorentz => 1000,
            Suite::Sunrise => 500,
            Suite::BesselKernel => 3,
            Suite::SobolevEmbedding => 200,
            Suite::ImaginaryPower => 100,
            Suite::KatoPonce => 200,
            Suite::MaximalLemma => 500,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Error::Config(format!("unknown suite `{s}`; known suites: {}", known.join(", ")))
        })
    }
}

/// Knobs shared by the grid-based suites. `resolution` and `box_side` apply
/// to the empirical-constant suites and the maximal lemma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub cases: Option<usize>,
    pub seed: u64,
    pub resolution: usize,
    pub box_side: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            cases: None,
            seed: 0,
            resolution: 64,
            box_side: 8.0,
        }
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let cases = opts.cases.unwrap_or(suite.default_cases());
    match suite {
        Suite::ThreeLines => three_lines_suite(),
        Suite::HolderLorentz => holder_suite(cases, opts.seed),
        Suite::Sunrise => sunrise_suite(cases, opts.seed),
        Suite::BesselKernel => bessel_kernel_suite(),
        Suite::SobolevEmbedding => sobolev_suite(cases, opts),
        Suite::ImaginaryPower => imaginary_power_suite(cases, opts),
        Suite::KatoPonce => kato_ponce_suite(cases, opts),
        Suite::MaximalLemma => maximal_lemma_suite(cases, opts),
    }
}

/// The two integrals at θ = 0.1, …, 0.9, each within `1e-8` of `1 - θ` and `θ`.
pub fn three_lines_suite() -> Result<Vec<CheckResult>> {
    (1..10)
        .map(|k| {
            let theta = k as f64 / 10.0;
            let (minus, plus) = three_lines_identity(theta)?;
            let mut r = CheckResult::identity("three_lines", minus, 1.0 - theta, 1e-8)
                .with("theta", theta)
                .with("plus_integral", plus);
            r.passed &= (plus - theta).abs() <= 1e-8;
            Ok(r)
        })
        .collect()
}

/// Mixture of rough, band-limited and indicator-like samples.
pub fn random_test_function(grid: Grid, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    match rng.random_range(0..3) {
        0 => random_rough(grid, rng.random_range(0.05..1.0), rng),
        1 => {
            let band = rng.random_range(0.2..0.9) * grid.nyquist();
            random_band_limited(grid, band, rng.random_bool(0.5), rng)
        }
        _ => {
            let level = rng.random_range(0.1..10.0);
            let density = rng.random_range(0.05..0.6);
            let data = (0..grid.len())
                .map(|_| Complex64::new(if rng.random::<f64>() < density { level } else { 0.0 }, 0.0))
                .collect();
            GridFunction::new(grid, Domain::Space, data)
        }
    }
}

/// Per pair: both links of the chain and the combined inequality.
pub fn holder_suite(cases: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::with_capacity(3 * cases);
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        let p = [1.5, 2.0, 3.0][case % 3];
        let grid = if (case / 3) % 2 == 0 {
            Grid::new(1, 8.0, 64)?
        } else {
            Grid::new(2, 4.0, 16)?
        };
        let f = random_test_function(grid, &mut rng)?;
        let g = random_test_function(grid, &mut rng)?;
        for r in holder_chain(&f, &g, p)? {
            out.push(r.with("case", case as f64).with("n", grid.dim as f64));
        }
        out.push(
            holder_lorentz(&f, &g, p)?
                .with("case", case as f64)
                .with("n", grid.dim as f64),
        );
    }
    Ok(out)
}

/// Random admissible `(n, s, a)` and a random profile with at most 50 steps.
pub fn random_sunrise_case(rng: &mut ChaCha8Rng) -> Result<(StepProfile, usize, f64, f64)> {
    let steps = rng.random_range(1..=50);
    let widths: Vec<f64> = (0..steps).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    let values: Vec<f64> = (0..steps)
        .map(|_| (-rng.random::<f64>().max(1e-12).ln()).powf(3.0))
        .collect();
    let n = rng.random_range(1..=3usize);
    let s = rng.random_range(0.02..0.98) * n as f64;
    let a = rng.random_range(0.02..0.98) * s;
    Ok((StepProfile::rearrange_steps(&widths, &values)?, n, s, a))
}

pub fn sunrise_suite(cases: usize, seed: u64) -> Result<Vec<CheckResult>> {
    (0..cases)
        .map(|case| {
            let (prof, n, s, a) = random_sunrise_case(&mut case_rng(seed, case))?;
            Ok(sunrise_check(&prof, a, s, n)?.with("case", case as f64))
        })
        .collect()
}

/// Kernel bound with the explicit Riesz constant for `(n, s) ∈ {(1, 1/2),
/// (2, 1), (3, 3/2)}`, and the transform and mass of the sampled kernel for
/// the first two.
pub fn bessel_kernel_suite() -> Result<Vec<CheckResult>> {
    let radii: Vec<f64> = (0..=80).map(|k| 1e-3 * 10f64.powf(k as f64 / 20.0)).collect();
    let mut out = Vec::new();
    for (n, s) in [(1usize, 0.5), (2, 1.0), (3, 1.5)] {
        out.push(kernel_bound_check(s, n, &radii)?);
    }
    for (n, s, samples) in [(1usize, 0.5, 4096usize), (2, 1.0, 2048)] {
        let c = kernel_transform_check(s, Grid::new(n, 32.0, samples)?, 2.0)?;
        out.push(
            CheckResult::inequality(
                "bessel_kernel_transform",
                c.max_rel_error,
                1e-3,
                ConstantUsed::Explicit(1.0),
            )
            .with("n", n as f64)
            .with("s", s)
            .with("samples", samples as f64),
        );
        out.push(
            CheckResult::identity("bessel_kernel_mass", c.mass, 1.0, 1e-3)
                .with("n", n as f64)
                .with("s", s)
                .with("tail", c.tail),
        );
    }
    Ok(out)
}

fn grid2(opts: &SuiteOptions) -> Result<Grid> {
    Grid::new(2, opts.box_side, opts.resolution)
}

/// Unit-mass spike in the cell at the origin.
pub fn spike(grid: Grid) -> Result<GridFunction> {
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    data[grid.origin()] = Complex64::new(1.0 / grid.cell_volume(), 0.0);
    GridFunction::new(grid, Domain::Space, data)
}

/// Band-limited function for case `case`; the band is fixed at 2 so the
/// same function is produced on every grid that resolves it.
pub fn band_limited_case(grid: Grid, seed: u64, case: usize) -> Result<GridFunction> {
    random_band_limited(grid, 2.0, case.is_multiple_of(2), &mut case_rng(seed, case))
}

/// `n = 2`, `s ∈ {1/2, 1, 3/2}`: the spike, then band-limited functions.
/// `C_emp` is fitted per `s`.
pub fn sobolev_suite(cases: usize, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let grid = grid2(opts)?;
    let mut out = Vec::new();
    for s in [0.5, 1.0, 1.5] {
        let mut group = vec![sobolev_embedding_check(&spike(grid)?, s)?.with("case", -1.0)];
        for case in 0..cases {
            let f = band_limited_case(grid, opts.seed, case)?;
            group.push(sobolev_embedding_check(&f, s)?.with("case", case as f64));
        }
        calibrate(&mut group);
        out.extend(group);
    }
    Ok(out)
}

/// `n = 2`, `p = 3/2`, `t ∈ {1, 4, 16}`; `C_emp` fitted per `t`.
pub fn imaginary_power_suite(cases: usize, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let grid = grid2(opts)?;
    let mut out = Vec::new();
    for t in [1.0, 4.0, 16.0] {
        let mut group = Vec::with_capacity(cases);
        for case in 0..cases {
            let f = band_limited_case(grid, opts.seed, case)?;
            group.push(imaginary_power_check(&f, t, 1.5)?.with("case", case as f64));
        }
        calibrate(&mut group);
        out.extend(group);
    }
    Ok(out)
}

/// `n = 2`, `s = 1`, `p = 2` with the Φ cutoff.
pub fn kato_ponce_suite(cases: usize, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let grid = grid2(opts)?;
    let mut group = Vec::with_capacity(cases);
    for case in 0..cases {
        let f = band_limited_case(grid, opts.seed, case)?;
        group.push(kato_ponce_lorentz_check(&f, 1.0, 2.0, Cutoff::Phi)?.with("case", case as f64));
    }
    calibrate(&mut group);
    Ok(group)
}

/// For `(n, s) = (1, 1/2)` and `(2, 1)` with `q = 5/2`: the constant
/// function against `ω_n^{s/n}`, then the largest ratio over random cases
/// (empirical). The grid uses `opts.resolution` and a box of 16.
pub fn maximal_lemma_suite(cases: usize, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    let q = 2.5;
    let mut out = Vec::new();
    for (n, s) in [(1usize, 0.5), (2, 1.0)] {
        let grid = Grid::new(n, 16.0, opts.resolution)?;
        let op = MaximalOperator::lattice(grid);
        let one = GridFunction::from_real_fn(grid, |_| 1.0)?;
        let bound = unit_ball_volume(n).powf(s / n as f64);
        let ratio = lemma_ratio(&one, grid.origin(), 0, s, q, &op)?;
        out.push(
            CheckResult::inequality("maximal_lemma_constant", ratio, bound, ConstantUsed::Explicit(bound))
                .with("n", n as f64)
                .with("s", s),
        );
        let search = lemma_search(grid, s, q, cases, opts.seed)?;
        out.push(
            CheckResult::empirical("maximal_lemma", search.max_ratio, 1.0)
                .with("n", n as f64)
                .with("s", s)
                .with("q", q)
                .with("argmax", search.argmax as f64)
                .with("cases", cases as f64)
                .with("ratio", search.max_ratio),
        );
    }
    Ok(out)
}
