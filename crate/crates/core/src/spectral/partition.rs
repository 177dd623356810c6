//! Dyadic Littlewood–Paley partition built from a smooth step `η`.
//!
//! `η(r) = ∫_r^2 b / ∫_1^2 b` with `b(u) = exp(-1/((u-1)(2-u)))` on `(1, 2)`.
//! Then `Ψ̂(ξ) = η(|ξ|) - η(2|ξ|)` telescopes over dyadic dilations, and
//! `Θ̂(ξ) = Ψ̂(ξ/2) + Ψ̂(ξ) + Ψ̂(2ξ) = η(|ξ|/2) - η(4|ξ|)`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::{forward_fourier, inverse_fourier};
use super::grid::{euclidean, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::quadrature::kronrod15;

const ETA_NODES: usize = 4096;

fn bump(u: f64) -> f64 {
    if u <= 1.0 || u >= 2.0 {
        return 0.0;
    }
    (-1.0 / ((u - 1.0) * (2.0 - u))).exp()
}

/// `tail[i] = ∫_{1 + i/M}^2 b`, `i = 0..=M`.
fn eta_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let step = 1.0 / ETA_NODES as f64;
        let mut tail = vec![0.0; ETA_NODES + 1];
        let mut f = bump;
        for i in (0..ETA_NODES).rev() {
            let a = 1.0 + i as f64 * step;
            let (v, _) = kronrod15(&mut f, a, a + step);
            tail[i] = tail[i + 1] + v;
        }
        tail
    })
}

/// Smooth step: exactly 1 on `r ≤ 1`, exactly 0 on `r ≥ 2`.
pub fn eta(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let tail = eta_table();
    let pos = (r - 1.0) * ETA_NODES as f64;
    let i = (pos.floor() as usize).min(ETA_NODES - 1);
    let right = 1.0 + (i + 1) as f64 / ETA_NODES as f64;
    let mut f = bump;
    let (partial, _) = kronrod15(&mut f, r, right);
    ((tail[i + 1] + partial) / tail[0]).clamp(0.0, 1.0)
}

/// Radial profile of `Ψ̂`, supported in `(1/2, 2)`.
pub fn psi_hat(r: f64) -> f64 {
    eta(r) - eta(2.0 * r)
}

/// Radial profile of `Θ̂`, supported in `(1/4, 4)` and equal to 1 on `[1/2, 2]`.
pub fn theta_hat(r: f64) -> f64 {
    eta(0.5 * r) - eta(4.0 * r)
}

/// Radial profile of `Φ̂`; same annulus and plateau as `Θ̂`.
pub fn phi_hat(r: f64) -> f64 {
    eta(0.5 * r) - eta(4.0 * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cutoff {
    Psi,
    Theta,
    Phi,
}

impl Cutoff {
    pub fn profile(self, r: f64) -> f64 {
        match self {
            Cutoff::Psi => psi_hat(r),
            Cutoff::Theta => theta_hat(r),
            Cutoff::Phi => phi_hat(r),
        }
    }

    /// Open annulus outside of which the profile vanishes.
    pub fn support(self) -> (f64, f64) {
        match self {
            Cutoff::Psi => (0.5, 2.0),
            Cutoff::Theta | Cutoff::Phi => (0.25, 4.0),
        }
    }
}

/// Dyadic window `[j_min, j_max]` of the partition `Σ_j Ψ̂(2^{-j}ξ) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LittlewoodPaleyFamily {
    pub j_min: i32,
    pub j_max: i32,
}

impl LittlewoodPaleyFamily {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min >= j_max {
            return Err(Error::param(
                "j_range",
                format!("need j_min < j_max, got [{j_min}, {j_max}]"),
            ));
        }
        Ok(Self { j_min, j_max })
    }

    /// Largest window with `2^{j_min} ≥ 4/L` and `2^{j_max} ≤ N/(4L)`.
    pub fn for_grid(grid: &Grid) -> Result<Self> {
        let l = grid.box_side;
        let j_min = (4.0 / l).log2().ceil() as i32;
        let j_max = (grid.samples_per_dim as f64 / (4.0 * l)).log2().floor() as i32;
        if j_min >= j_max {
            return Err(Error::Config(format!(
                "box {l} with {} samples resolves no dyadic window (j_min = {j_min}, j_max = {j_max})",
                grid.samples_per_dim
            )));
        }
        Ok(Self { j_min, j_max })
    }

    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        self.j_range().contains(&j)
    }

    /// `Ψ̂(2^{-j}ξ)`, `Θ̂(2^{-j}ξ)` or `Φ̂(2^{-j}ξ)` at radius `|ξ|`.
    pub fn dilated(&self, which: Cutoff, j: i32, r: f64) -> f64 {
        which.profile(r * (-j as f64).exp2())
    }

    /// `Σ_{j ∈ window} Ψ̂(2^{-j}ξ)` at radius `|ξ|`.
    pub fn partition_sum(&self, r: f64) -> f64 {
        self.j_range().map(|j| self.dilated(Cutoff::Psi, j, r)).sum()
    }

    /// Covered annulus `[2^{j_min}, 2^{j_max}]`, where the partition sums to 1.
    pub fn covered_annulus(&self) -> (f64, f64) {
        ((self.j_min as f64).exp2(), (self.j_max as f64).exp2())
    }

    /// Fraction of nonzero grid frequencies outside the covered annulus;
    /// this is the truncation of the dyadic sum to the window.
    pub fn uncovered_fraction(&self, grid: &Grid) -> f64 {
        let (lo, hi) = self.covered_annulus();
        let mut outside = 0usize;
        for k in 1..grid.len() {
            let r = euclidean(&grid.frequency(k)[..grid.dim]);
            if r < lo || r > hi {
                outside += 1;
            }
        }
        outside as f64 / (grid.len() - 1) as f64
    }
}

/// Partition on the window `[j_min, j_max]`; `smoothness_margin` is accepted
/// for interface stability and currently unused.
pub fn build_partition(j_min: i32, j_max: i32, _smoothness_margin: f64) -> Result<LittlewoodPaleyFamily> {
    LittlewoodPaleyFamily::new(j_min, j_max)
}

/// `Δ_j f` (with Ψ̂) or `Δ_j^Θ f` (with Θ̂) on the grid of `f`.
pub fn lp_piece(f: &GridFunction, j: i32, fam: &LittlewoodPaleyFamily, which: Cutoff) -> Result<GridFunction> {
    if !fam.contains(j) {
        return Err(Error::param(
            "j",
            format!("{j} outside window [{}, {}]", fam.j_min, fam.j_max),
        ));
    }
    let mut fhat = forward_fourier(f)?;
    let grid = *fhat.grid();
    for (k, z) in fhat.data_mut().iter_mut().enumerate() {
        let r = euclidean(&grid.frequency(k)[..grid.dim]);
        *z *= fam.dilated(which, j, r);
    }
    inverse_fourier(&fhat)
}

/// Frequency samples of `Ψ̂(2^{-j}·)` (or Θ̂, Φ̂) on a grid.
pub fn cutoff_samples(grid: Grid, which: Cutoff, j: i32) -> GridFunction {
    let fam = LittlewoodPaleyFamily { j_min: j, j_max: j + 1 };
    GridFunction::from_frequency_fn(grid, |xi| Complex64::new(fam.dilated(which, j, euclidean(xi)), 0.0))
        .expect("cutoff values are finite")
}
