//! Seeded test functions whose continuum definition does not depend on the
//! sample count, so the same seed gives the same function on refined grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::fourier::inverse_fourier;
use super::grid::{Domain, Grid, GridFunction};
use crate::error::{Error, Result};

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Trigonometric polynomial with complex Gaussian coefficients on every
/// lattice frequency `k/L` with `|k/L| ≤ band`. Coefficients are drawn in a
/// fixed order over `k ∈ [-K, K]^n`, `K = ⌊band L⌋`, independent of `N`.
/// With `real = true` the result is the real part.
pub fn random_band_limited(grid: Grid, band: f64, real: bool, rng: &mut impl Rng) -> Result<GridFunction> {
    let kmax = (band * grid.box_side).floor() as i64;
    let half = (grid.samples_per_dim / 2) as i64;
    if kmax >= half {
        return Err(Error::Config(format!(
            "band {band} needs more than {} samples per axis",
            grid.samples_per_dim
        )));
    }
    let mut fhat = vec![Complex64::new(0.0, 0.0); grid.len()];
    let side = 2 * kmax + 1;
    let total = side.pow(grid.dim as u32);
    let n = grid.samples_per_dim as i64;
    for t in 0..total {
        let mut rest = t;
        let mut idx = [0usize; 3];
        let mut k2 = 0i64;
        for axis in (0..grid.dim).rev() {
            let k = rest % side - kmax;
            rest /= side;
            k2 += k * k;
            idx[axis] = k.rem_euclid(n) as usize;
        }
        let c = Complex64::new(standard_normal(rng), standard_normal(rng));
        if (k2 as f64).sqrt() <= band * grid.box_side {
            fhat[grid.flat(idx)] = c;
        }
    }
    let f = inverse_fourier(&GridFunction::new(grid, Domain::Frequency, fhat)?)?;
    Ok(if real { f.map(|z| Complex64::new(z.re, 0.0)) } else { f })
}

/// Gaussian wave packet `exp(-π|x - c|²/w²) e^{2πi ξ₀·x}`.
pub fn modulated_gaussian(grid: Grid, center: &[f64], width: f64, frequency: &[f64]) -> Result<GridFunction> {
    GridFunction::from_fn(grid, |x| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for k in 0..x.len() {
            r2 += (x[k] - center[k]).powi(2);
            phase += frequency[k] * x[k];
        }
        Complex64::from_polar((-PI * r2 / (width * width)).exp(), 2.0 * PI * phase)
    })
}

/// Rough samples: independent heavy-tailed magnitudes on a random support.
pub fn random_rough(grid: Grid, density: f64, rng: &mut impl Rng) -> Result<GridFunction> {
    let data = (0..grid.len())
        .map(|_| {
            if rng.random::<f64>() < density {
                let mag = (-rng.random::<f64>().max(1e-300).ln()).powf(2.0);
                Complex64::from_polar(mag, 2.0 * PI * rng.random::<f64>())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    GridFunction::new(grid, Domain::Space, data)
}
