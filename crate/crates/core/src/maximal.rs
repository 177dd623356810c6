//! Centred `L^q` maximal function on periodic grids and the pointwise bound
//! of a shifted, weighted weak norm by it.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rearrange::StepProfile;
use crate::spectral::{Grid, GridFunction};

/// Volume of the unit ball in `ℝ^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Increasing positive radii for the supremum in the maximal function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

/// Largest number of radii kept by [`RadiusSet::lattice`].
pub const MAX_RADII: usize = 512;

impl RadiusSet {
    pub fn new(mut radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::param("radii", "need at least one radius"));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::param("radii", "radii must be finite and positive"));
        }
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        Ok(Self { radii })
    }

    /// Distinct positive minimum-image lattice distances, up to the
    /// half-diagonal `√n L/2` so that the largest ball is the whole torus.
    /// When there are more than [`MAX_RADII`], indices are thinned geometrically.
    pub fn lattice(grid: &Grid) -> Self {
        let half = (grid.samples_per_dim / 2) as u64;
        let limit = grid.dim as u64 * half * half;
        let mut present = vec![false; limit as usize + 1];
        let bound = half as i64;
        let axes: Vec<i64> = (0..=bound).collect();
        match grid.dim {
            1 => axes.iter().for_each(|&i| present[(i * i) as usize] = true),
            2 => {
                for &i in &axes {
                    for &j in axes.iter().take_while(|&&j| i * i + j * j <= limit as i64) {
                        present[(i * i + j * j) as usize] = true;
                    }
                }
            }
            _ => {
                for &i in &axes {
                    for &j in axes.iter().take_while(|&&j| i * i + j * j <= limit as i64) {
                        for &k in axes.iter().take_while(|&&k| i * i + j * j + k * k <= limit as i64) {
                            present[(i * i + j * j + k * k) as usize] = true;
                        }
                    }
                }
            }
        }
        let h = grid.spacing();
        let all: Vec<f64> = present
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &p)| p)
            .map(|(m, _)| (m as f64).sqrt() * h)
            .collect();
        if all.len() <= MAX_RADII {
            return Self { radii: all };
        }
        let last = (all.len() - 1) as f64;
        let mut idx: Vec<usize> = (0..MAX_RADII)
            .map(|i| (last.powf(i as f64 / (MAX_RADII - 1) as f64)).round() as usize)
            .collect();
        idx[0] = 0;
        idx.dedup();
        Self {
            radii: idx.into_iter().map(|i| all[i]).collect(),
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Lattice offsets sorted by distance, with the cut for each radius.
#[derive(Debug, Clone)]
pub struct MaximalOperator {
    grid: Grid,
    offsets: Vec<[i64; 3]>,
    /// `ends[r]` = number of offsets within `radii[r]`.
    ends: Vec<usize>,
    radii: RadiusSet,
}

impl MaximalOperator {
    pub fn new(grid: Grid, radii: RadiusSet) -> Self {
        let n = grid.samples_per_dim as i64;
        let lo = -n / 2;
        let hi = n / 2 - 1;
        let mut offsets: Vec<([i64; 3], i64)> = Vec::with_capacity(grid.len());
        let range = |active: bool| if active { lo..=hi } else { 0..=0 };
        for i in range(true) {
            for j in range(grid.dim >= 2) {
                for k in range(grid.dim >= 3) {
                    offsets.push(([i, j, k], i * i + j * j + k * k));
                }
            }
        }
        offsets.sort_by_key(|&(o, d2)| (d2, o));
        let h = grid.spacing();
        let ends = radii
            .radii()
            .iter()
            .map(|&r| {
                let r2 = r * r;
                offsets.partition_point(|&(_, d2)| (d2 as f64) * h * h <= r2 * (1.0 + 1e-12))
            })
            .collect();
        Self {
            grid,
            offsets: offsets.into_iter().map(|(o, _)| o).collect(),
            ends,
            radii,
        }
    }

    pub fn lattice(grid: Grid) -> Self {
        let radii = RadiusSet::lattice(&grid);
        Self::new(grid, radii)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn radii(&self) -> &RadiusSet {
        &self.radii
    }

    /// `sup_r (mean over B(x, r) of |f|^q)^{1/q}`, balls taken as the
    /// lattice cells with centres within `r` and averaged by cell count.
    pub fn apply(&self, f: &GridFunction, q: f64, x: usize) -> Result<f64> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::param("q", format!("must be at least 1, got {q}")));
        }
        if f.grid() != &self.grid {
            return Err(Error::Shape(format!(
                "function grid {:?} vs operator grid {:?}",
                f.grid(),
                self.grid
            )));
        }
        if x >= self.grid.len() {
            return Err(Error::param("x", format!("index {x} outside the grid")));
        }
        let n = self.grid.samples_per_dim as i64;
        let base = self.grid.indices(x);
        let data = f.data();
        let mut sum = 0.0;
        let mut taken = 0;
        let mut best: f64 = 0.0;
        for &end in &self.ends {
            for o in &self.offsets[taken..end] {
                let mut idx = [0usize; 3];
                for axis in 0..self.grid.dim {
                    idx[axis] = (base[axis] as i64 + o[axis]).rem_euclid(n) as usize;
                }
                let v = data[self.grid.flat(idx)].norm();
                sum += if q == 1.0 { v } else { v.powf(q) };
            }
            taken = end;
            if end > 0 {
                best = best.max(sum / end as f64);
            }
        }
        Ok(if q == 1.0 { best } else { best.powf(q.recip()) })
    }
}

/// `M_{L^q} f(x)` over the given radii.
pub fn centered_maximal(f: &GridFunction, q: f64, x: usize, radii: &RadiusSet) -> Result<f64> {
    MaximalOperator::new(*f.grid(), radii.clone()).apply(f, q, x)
}

/// `‖f(x + 2^{-j} y) / (1 + |y|)^s‖_{L^{n/s,∞}}` in `y`.
///
/// The `y`-grid has box `2^j L` and the same sample count, so `x + 2^{-j} y_i`
/// is exactly the lattice point `x + (i - N/2)` cells, wrapped periodically.
pub fn shifted_weighted_weak_norm(f: &GridFunction, x: usize, j: i32, s: f64) -> Result<f64> {
    let grid = *f.grid();
    let n = grid.dim as f64;
    if !(s > 0.0 && s < n) {
        return Err(Error::param("s", format!("must lie in (0, {n}), got {s}")));
    }
    if j.abs() > 40 {
        return Err(Error::param(
            "j",
            format!("|j| = {} leaves no representable y-grid", j.abs()),
        ));
    }
    if x >= grid.len() {
        return Err(Error::param("x", format!("index {x} outside the grid")));
    }
    let y_grid = grid.rescaled((j as f64).exp2())?;
    let samples = grid.samples_per_dim as i64;
    let half = samples / 2;
    let base = grid.indices(x);
    let y_axis = y_grid.axis_coordinates();
    let data = f.data();
    let mut weighted = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let iy = y_grid.indices(k);
        let mut idx = [0usize; 3];
        let mut r2 = 0.0;
        for axis in 0..grid.dim {
            idx[axis] = (base[axis] as i64 + iy[axis] as i64 - half).rem_euclid(samples) as usize;
            r2 += y_axis[iy[axis]] * y_axis[iy[axis]];
        }
        let v = data[grid.flat(idx)].norm();
        weighted.push(if v == 0.0 { 0.0 } else { v * (1.0 + r2.sqrt()).powf(-s) });
    }
    StepProfile::from_magnitudes(&weighted, y_grid.cell_volume())?.lorentz_weak_norm(n / s)
}

/// The lemma's exponent choice: midway between `n/s` and 2 when `n/s < 2`,
/// otherwise `n/s + 1/2`.
pub fn default_q(n: usize, s: f64) -> f64 {
    let p = n as f64 / s;
    if p < 2.0 {
        (p + 2.0) / 2.0
    } else {
        p + 0.5
    }
}

/// Weak norm over maximal function at one point; `0/0` is defined as 0.
pub fn lemma_ratio(f: &GridFunction, x: usize, j: i32, s: f64, q: f64, op: &MaximalOperator) -> Result<f64> {
    let n = f.dim() as f64;
    if !(s > 0.0 && s < n) {
        return Err(Error::param("s", format!("must lie in (0, {n}), got {s}")));
    }
    if q <= n / s || q.is_nan() {
        return Err(Error::param(
            "q",
            format!("the bound requires q > n/s = {}, got {q}", n / s),
        ));
    }
    let weak = shifted_weighted_weak_norm(f, x, j, s)?;
    let max = op.apply(f, q, x)?;
    if max == 0.0 {
        if weak != 0.0 {
            return Err(Error::Domain(format!(
                "maximal function vanishes but the weak norm is {weak}"
            )));
        }
        return Ok(0.0);
    }
    Ok(weak / max)
}

/// Seeded test case for [`lemma_search`]: a sum of Gaussian bumps and ball
/// indicators, a base point and a scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCase {
    /// `(centre, width, amplitude, is_indicator)`.
    pub bumps: Vec<([f64; 3], f64, f64, bool)>,
    /// Base point; a multiple of `L/32` per axis so it lies on every grid with N ≥ 32.
    pub x: [f64; 3],
    pub j: i32,
}

impl LemmaCase {
    pub fn random(dim: usize, box_side: f64, rng: &mut impl rand::Rng) -> Self {
        let count = rng.random_range(1..=3);
        let bumps = (0..count)
            .map(|_| {
                let mut c = [0.0; 3];
                for v in c.iter_mut().take(dim) {
                    *v = rng.random_range(-0.25..0.25) * box_side;
                }
                let width = rng.random_range(0.2..2.0);
                let amp = rng.random_range(0.1..2.0);
                (c, width, amp, rng.random_bool(0.3))
            })
            .collect();
        let mut x = [0.0; 3];
        for v in x.iter_mut().take(dim) {
            *v = rng.random_range(-12i32..12) as f64 * box_side / 32.0;
        }
        Self {
            bumps,
            x,
            j: rng.random_range(-2..=2),
        }
    }

    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        let dim = grid.dim;
        GridFunction::from_real_fn(grid, |y| {
            self.bumps
                .iter()
                .map(|(c, w, a, indicator)| {
                    let r2: f64 = (0..dim).map(|k| (y[k] - c[k]).powi(2)).sum();
                    if *indicator {
                        if r2 <= w * w {
                            *a
                        } else {
                            0.0
                        }
                    } else {
                        a * (-r2 / (w * w)).exp()
                    }
                })
                .sum()
        })
    }

    /// Flat index of the base point on `grid`.
    pub fn x_index(&self, grid: &Grid) -> usize {
        let mut idx = [0usize; 3];
        let inv = grid.samples_per_dim as f64 / grid.box_side;
        for (i, x) in idx.iter_mut().zip(&self.x).take(grid.dim) {
            *i = ((x + 0.5 * grid.box_side) * inv).round() as usize;
        }
        grid.flat(idx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaSearch {
    pub max_ratio: f64,
    pub argmax: usize,
    pub cases: usize,
}

/// Largest [`lemma_ratio`] over `cases` seeded [`LemmaCase`]s on `grid`.
pub fn lemma_search(grid: Grid, s: f64, q: f64, cases: usize, seed: u64) -> Result<LemmaSearch> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let op = MaximalOperator::lattice(grid);
    let mut best = LemmaSearch {
        max_ratio: 0.0,
        argmax: 0,
        cases,
    };
    for c in 0..cases {
        let case = LemmaCase::random(grid.dim, grid.box_side, &mut rng);
        let f = case.sample(grid)?;
        let ratio = lemma_ratio(&f, case.x_index(&grid), case.j, s, q, &op)?;
        if ratio > best.max_ratio {
            best.max_ratio = ratio;
            best.argmax = c;
        }
    }
    Ok(best)
}
