//! Multiplier symbols: dyadic families with singular centres, a Riesz-type
//! Mikhlin symbol, constants and user-supplied samples.
//!
//! Scale-indexed kinds have the form `σ(x) = Σ_k φ(2^{-k}x) F(2^{-k}x - a_k)`
//! with a bump `φ` supported in `A = {1/2 < |x| < 2}` and centres `a_k ∈ A`.
//! Only the (at most two) `k` with `2^{-k}x ∈ A` contribute.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{euclidean, psi_hat, Cutoff, Grid, GridFunction, LittlewoodPaleyFamily};

/// Default bump on `A`: `exp(1/0.5625 - 1/((r - 1/2)(2 - r)))`, peak 1 at `r = 5/4`.
pub fn default_bump(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        return 0.0;
    }
    (1.0 / 0.5625 - 1.0 / ((r - 0.5) * (2.0 - r))).exp()
}

/// `E_0 = 1`, `E_{m+1} = e^{E_m}`.
fn tower(height: u32) -> f64 {
    (0..height).fold(1.0, |acc: f64, _| acc.exp())
}

/// Largest iterated-log depth whose tower constant is representable.
pub const MAX_ELL: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    Constant {
        c: f64,
    },
    /// `ξ_axis / |ξ|`.
    MikhlinRiesz {
        axis: usize,
    },
    /// `|d|^β`.
    PowerType {
        beta: f64,
    },
    /// `(log(e 4^n / |d|^n))^β`.
    LogType {
        beta: f64,
    },
    /// `(log ⋯ log(4^n E_ℓ / |d|^n))^β` with `ℓ` logarithms and `E_ℓ` the tower `e^{e^{⋯}}`.
    IteratedLog {
        beta: f64,
        ell: u32,
    },
    /// The partition profile `Ψ̂(ξ)` itself.
    PartitionBump,
    /// Frequency samples, looked up by nearest neighbour.
    Custom {
        samples: GridFunction,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum CenterPreset {
    /// An empty point means `e_1`.
    Fixed {
        #[serde(default)]
        point: Vec<f64>,
    },
    /// `a_j = (cos 2πj/P, sin 2πj/P, 0)`; on the line `a_j = ±1` alternately.
    Rotating { period: u32 },
    /// Radius uniform in `[0.55, 1.95]`, uniform direction, one stream per `j`.
    #[serde(alias = "random-seeded")]
    RandomSeeded { seed: u64 },
}

/// Map `j ↦ a_{j + offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSchedule {
    #[serde(flatten)]
    pub preset: CenterPreset,
    #[serde(default)]
    pub offset: i64,
}

impl CenterSchedule {
    pub fn fixed(point: &[f64]) -> Self {
        Self {
            preset: CenterPreset::Fixed { point: point.to_vec() },
            offset: 0,
        }
    }

    pub fn rotating(period: u32) -> Self {
        Self {
            preset: CenterPreset::Rotating { period },
            offset: 0,
        }
    }

    pub fn random(seed: u64) -> Self {
        Self {
            preset: CenterPreset::RandomSeeded { seed },
            offset: 0,
        }
    }

    /// `a'_j = a_{j + by}`.
    pub fn shifted(&self, by: i64) -> Self {
        Self {
            preset: self.preset.clone(),
            offset: self.offset + by,
        }
    }

    pub fn center(&self, j: i64, dim: usize) -> [f64; 3] {
        let j = j + self.offset;
        let mut a = [0.0; 3];
        match &self.preset {
            CenterPreset::Fixed { point } if point.is_empty() => a[0] = 1.0,
            CenterPreset::Fixed { point } => a[..dim].copy_from_slice(&point[..dim]),
            CenterPreset::Rotating { period } => {
                if dim == 1 {
                    a[0] = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                } else {
                    let angle = 2.0 * PI * j.rem_euclid(*period as i64) as f64 / *period as f64;
                    a[0] = angle.cos();
                    a[1] = angle.sin();
                }
            }
            CenterPreset::RandomSeeded { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(j as u64);
                let radius = rng.random_range(0.55..1.95);
                match dim {
                    1 => a[0] = if rng.random_bool(0.5) { radius } else { -radius },
                    2 => {
                        let t = rng.random_range(0.0..2.0 * PI);
                        a[0] = radius * t.cos();
                        a[1] = radius * t.sin();
                    }
                    _ => {
                        let z: f64 = rng.random_range(-1.0..1.0);
                        let t = rng.random_range(0.0..2.0 * PI);
                        let rho = (1.0 - z * z).sqrt();
                        a = [radius * rho * t.cos(), radius * rho * t.sin(), radius * z];
                    }
                }
            }
        }
        a
    }

    /// Period of `j ↦ a_j`, if the schedule is periodic.
    pub fn period(&self, dim: usize) -> Option<u32> {
        match &self.preset {
            CenterPreset::Fixed { .. } => Some(1),
            CenterPreset::Rotating { period } => Some(if dim == 1 { 2 } else { *period }),
            CenterPreset::RandomSeeded { .. } => None,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match &self.preset {
            CenterPreset::Fixed { point } if point.is_empty() => {}
            CenterPreset::Fixed { point } => {
                if point.len() != dim {
                    return Err(Error::param(
                        "centers.point",
                        format!("expected {dim} coordinates, got {}", point.len()),
                    ));
                }
                let r = euclidean(point);
                if !(r > 0.5 && r < 2.0) {
                    return Err(Error::param("centers.point", format!("|a| = {r} must lie in (1/2, 2)")));
                }
            }
            CenterPreset::Rotating { period } => {
                if *period == 0 {
                    return Err(Error::param("centers.period", "must be positive"));
                }
            }
            CenterPreset::RandomSeeded { .. } => {}
        }
        Ok(())
    }
}

impl Default for CenterSchedule {
    fn default() -> Self {
        Self::fixed(&[])
    }
}

/// Fully validated symbol description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: SymbolKind,
    #[serde(default)]
    pub centers: CenterSchedule,
    /// Overall constant factor.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl SymbolSpec {
    /// Symbol with the default centre schedule (fixed at `e_1`).
    pub fn new(dim: usize, kind: SymbolKind) -> Result<Self> {
        let spec = Self {
            dim,
            kind,
            centers: CenterSchedule::default(),
            scale: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::new(dim, SymbolKind::Constant { c })
    }

    pub fn log_type(dim: usize, beta: f64) -> Result<Self> {
        Self::new(dim, SymbolKind::LogType { beta })
    }

    pub fn power_type(dim: usize, beta: f64) -> Result<Self> {
        Self::new(dim, SymbolKind::PowerType { beta })
    }

    pub fn with_centers(mut self, centers: CenterSchedule) -> Result<Self> {
        self.centers = centers;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        self.scale = scale;
        self.validate()?;
        Ok(self)
    }

    /// The same family with centre schedule `a'_j = a_{j + by}`; for
    /// scale-indexed kinds this is `σ(2^{by} ·)`.
    pub fn shifted(&self, by: i64) -> Self {
        Self {
            centers: self.centers.shifted(by),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::param("dim", format!("must be 1, 2 or 3, got {}", self.dim)));
        }
        if !self.scale.is_finite() {
            return Err(Error::param("scale", "must be finite"));
        }
        let negative_beta = |beta: f64| {
            if beta.is_finite() && beta < 0.0 {
                Ok(())
            } else {
                Err(Error::param("beta", format!("must be negative, got {beta}")))
            }
        };
        match &self.kind {
            SymbolKind::Constant { c } if !c.is_finite() => {
                return Err(Error::param("c", "must be finite"));
            }
            SymbolKind::MikhlinRiesz { axis } if *axis >= self.dim => {
                return Err(Error::param(
                    "axis",
                    format!("{axis} is not an axis of a {}-dimensional space", self.dim),
                ));
            }
            SymbolKind::PowerType { beta } | SymbolKind::LogType { beta } => negative_beta(*beta)?,
            SymbolKind::IteratedLog { beta, ell } => {
                negative_beta(*beta)?;
                if !(1..=MAX_ELL).contains(ell) {
                    return Err(Error::param(
                        "ell",
                        format!("must be in 1..={MAX_ELL} (larger towers overflow), got {ell}"),
                    ));
                }
            }
            SymbolKind::Custom { samples } => {
                if samples.dim() != self.dim {
                    return Err(Error::Shape(format!(
                        "custom samples are {}-dimensional, symbol is {}-dimensional",
                        samples.dim(),
                        self.dim
                    )));
                }
                if samples.domain() != crate::spectral::Domain::Frequency {
                    return Err(Error::Shape("custom samples must be frequency samples".into()));
                }
            }
            _ => {}
        }
        self.centers.validate(self.dim)
    }

    pub fn is_scale_indexed(&self) -> bool {
        matches!(
            self.kind,
            SymbolKind::PowerType { .. } | SymbolKind::LogType { .. } | SymbolKind::IteratedLog { .. }
        )
    }

    /// False only for the power family, which blows up at its centres.
    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, SymbolKind::PowerType { .. })
    }

    pub fn center(&self, k: i64) -> [f64; 3] {
        self.centers.center(k, self.dim)
    }

    /// `σ(ξ)`. Power-type symbols return `+∞` exactly at a centre; other
    /// scale-indexed kinds return their limit value 0 there.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        self.check_point(xi)?;
        Ok(self.eval_unscaled(xi)? * self.scale)
    }

    fn eval_unscaled(&self, xi: &[f64]) -> Result<Complex64> {
        Ok(match &self.kind {
            SymbolKind::Constant { c } => Complex64::new(*c, 0.0),
            SymbolKind::MikhlinRiesz { axis } => {
                let r = euclidean(xi);
                Complex64::new(if r == 0.0 { 0.0 } else { xi[*axis] / r }, 0.0)
            }
            SymbolKind::PartitionBump => Complex64::new(psi_hat(euclidean(xi)), 0.0),
            SymbolKind::Custom { samples } => lookup_nearest(samples, xi)?,
            _ => Complex64::new(self.dyadic_sum(xi, 0, 0.0), 0.0),
        })
    }

    /// Samples of `σ` on the frequency lattice of `grid`.
    pub fn sample(&self, grid: Grid) -> Result<GridFunction> {
        if grid.dim != self.dim {
            return Err(Error::Shape(format!(
                "grid is {}-dimensional, symbol is {}-dimensional",
                grid.dim, self.dim
            )));
        }
        let data = (0..grid.len())
            .map(|k| self.eval(&grid.frequency(k)[..grid.dim]))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(grid, crate::spectral::Domain::Frequency, data)
    }

    fn check_point(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::Shape(format!(
                "point has {} coordinates, symbol is {}-dimensional",
                xi.len(),
                self.dim
            )));
        }
        if xi.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite evaluation point".into()));
        }
        Ok(())
    }

    /// `Σ_m φ(2^{-m}x) F(2^{-m}x - a_{m + shift})`, i.e. `σ(2^{shift} x)`.
    /// Distances to a centre are clipped below by `2^{-m} min_dist` (in
    /// units of `x`).
    fn dyadic_sum(&self, x: &[f64], shift: i64, min_dist: f64) -> f64 {
        let r = euclidean(x);
        if r == 0.0 {
            return 0.0;
        }
        let k0 = r.log2().floor() as i64;
        let mut total = 0.0;
        for m in k0 - 1..=k0 + 1 {
            let scale = (-m as f64).exp2();
            let rho = r * scale;
            if !(rho > 0.5 && rho < 2.0) {
                continue;
            }
            let a = self.center(m + shift);
            let d = x
                .iter()
                .zip(a.iter())
                .map(|(xi, ai)| (xi * scale - ai).powi(2))
                .sum::<f64>()
                .sqrt()
                .max(min_dist * scale);
            total += default_bump(rho) * self.profile(d);
        }
        total
    }

    /// The factor `F(|d|)` of a scale-indexed kind.
    fn profile(&self, d: f64) -> f64 {
        let n = self.dim as f64;
        match self.kind {
            SymbolKind::PowerType { beta } => {
                if d == 0.0 {
                    f64::INFINITY
                } else {
                    d.powf(beta)
                }
            }
            SymbolKind::LogType { beta } => {
                if d == 0.0 {
                    0.0
                } else {
                    (1.0 + 2.0 * n * LN_2 - n * d.ln()).powf(beta)
                }
            }
            SymbolKind::IteratedLog { beta, ell } => {
                if d == 0.0 {
                    return 0.0;
                }
                let mut v = 2.0 * n * LN_2 + tower(ell - 1) - n * d.ln();
                for _ in 1..ell {
                    v = v.ln();
                }
                v.powf(beta)
            }
            _ => unreachable!("profile is only used by scale-indexed kinds"),
        }
    }
}

fn lookup_nearest(samples: &GridFunction, xi: &[f64]) -> Result<Complex64> {
    let grid = samples.grid();
    let n = grid.samples_per_dim as i64;
    let mut idx = [0usize; 3];
    for (axis, &c) in xi.iter().enumerate() {
        let k = (c * grid.box_side).round();
        if !(k >= -(n / 2) as f64 && k <= (n / 2 - 1) as f64) {
            return Err(Error::Domain(format!(
                "frequency {c} outside the sampled band [{}, {})",
                -grid.nyquist(),
                grid.nyquist()
            )));
        }
        idx[axis] = (k as i64).rem_euclid(n) as usize;
    }
    Ok(samples.data()[grid.flat(idx)])
}

/// `σ(ξ)` for a validated spec.
pub fn eval_symbol(spec: &SymbolSpec, xi: &[f64]) -> Result<Complex64> {
    spec.eval(xi)
}

/// Samples of `Ψ̂(x) σ(2^j x)` on `grid`. The symbol variable is the spatial
/// variable of the returned function, ready for a Bessel potential.
/// Power-type distances are clipped below by half the grid spacing.
pub fn localized_piece(spec: &SymbolSpec, j: i32, fam: &LittlewoodPaleyFamily, grid: Grid) -> Result<GridFunction> {
    if !fam.contains(j) {
        return Err(Error::param(
            "j",
            format!("{j} outside window [{}, {}]", fam.j_min, fam.j_max),
        ));
    }
    if grid.dim != spec.dim {
        return Err(Error::Shape(format!(
            "grid is {}-dimensional, symbol is {}-dimensional",
            grid.dim, spec.dim
        )));
    }
    if grid.box_side < 4.0 {
        return Err(Error::Config(format!(
            "piece grid box {} does not contain the annulus |x| < 2",
            grid.box_side
        )));
    }
    let clip = 0.5 * grid.spacing();
    let jj = j as i64;
    let jf = (j as f64).exp2();
    let mut out = Vec::with_capacity(grid.len());
    let mut scaled = [0.0; 3];
    for k in 0..grid.len() {
        let x = &grid.point(k)[..grid.dim];
        let r = euclidean(x);
        let psi = Cutoff::Psi.profile(r);
        if psi == 0.0 {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let value = match &spec.kind {
            SymbolKind::Constant { c } => Complex64::new(*c, 0.0),
            SymbolKind::PowerType { .. } | SymbolKind::LogType { .. } | SymbolKind::IteratedLog { .. } => {
                Complex64::new(spec.dyadic_sum(x, jj, clip), 0.0)
            }
            _ => {
                for (s, c) in scaled.iter_mut().zip(x) {
                    *s = c * jf;
                }
                spec.eval_unscaled(&scaled[..grid.dim])?
            }
        };
        out.push(value * psi * spec.scale);
    }
    GridFunction::new(grid, crate::spectral::Domain::Space, out)
}

/// How `mikhlin_check` picks its evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub enum MikhlinSampling {
    /// `count` points with log-uniform radius in `[r_min, r_max]` and uniform direction.
    Random {
        count: usize,
        seed: u64,
        r_min: f64,
        r_max: f64,
    },
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize)]
pub struct MikhlinEntry {
    pub alpha: Vec<u32>,
    pub order: u32,
    /// `sup |ξ|^{|α|} |∂^α σ(ξ)|` over the sample.
    pub constant: f64,
    /// Largest Richardson gap between steps `h` and `h/2`, relative to the value.
    pub truncation_estimate: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MikhlinReport {
    pub entries: Vec<MikhlinEntry>,
    pub points_used: usize,
    pub points_rejected: usize,
}

impl MikhlinReport {
    /// Largest constant among multi-indices of the given order.
    pub fn max_for_order(&self, order: u32) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.order == order)
            .map(|e| e.constant)
            .fold(0.0, f64::max)
    }
}

fn multi_indices(dim: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &out {
            let used: u32 = prefix.iter().sum();
            for a in 0..=max_order - used {
                let mut v = prefix.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out.sort_by_key(|a| (a.iter().sum::<u32>(), std::cmp::Reverse(a.clone())));
    out
}

fn binomial(m: u32, i: u32) -> f64 {
    (0..i).fold(1.0, |acc, t| acc * (m - t) as f64 / (t + 1) as f64)
}

/// Tensor-product central difference `Π_i δ_{h,i}^{α_i} σ(ξ)`.
fn central_difference(spec: &SymbolSpec, xi: &[f64], alpha: &[u32], h: f64) -> Result<Complex64> {
    let dim = xi.len();
    let mut total = Complex64::new(0.0, 0.0);
    let counts: Vec<u32> = alpha.iter().map(|a| a + 1).collect();
    let terms: u32 = counts.iter().product();
    let mut point = xi.to_vec();
    for t in 0..terms {
        let mut rest = t;
        let mut weight = 1.0;
        for axis in 0..dim {
            let m = alpha[axis];
            let i = rest % counts[axis];
            rest /= counts[axis];
            weight *= if i.is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(m, i);
            point[axis] = xi[axis] + (m as f64 / 2.0 - i as f64) * h;
        }
        total += spec.eval(&point)? * weight;
    }
    let order: u32 = alpha.iter().sum();
    Ok(total / h.powi(order as i32))
}

fn random_points(dim: usize, count: usize, seed: u64, r_min: f64, r_max: f64, rng_skip: &mut u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(*rng_skip);
    *rng_skip += 1;
    (0..count)
        .map(|_| {
            let r = (r_min.ln() + rng.random::<f64>() * (r_max / r_min).ln()).exp();
            let mut v: Vec<f64> = (0..dim)
                .map(|_| {
                    // Box–Muller normal for an isotropic direction
                    let u1: f64 = 1.0 - rng.random::<f64>();
                    let u2: f64 = rng.random();
                    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
                })
                .collect();
            let norm = euclidean(&v).max(f64::MIN_POSITIVE);
            v.iter_mut().for_each(|c| *c *= r / norm);
            v
        })
        .collect()
}

/// Empirical Mikhlin constants `sup_ξ |ξ|^{|α|} |∂^α σ(ξ)|` for `|α| ≤ alpha_max`,
/// by central differences with step `h = 10^{-4}|ξ|` and a Richardson
/// comparison at `h/2`. Points where σ is not finite nearby are redrawn
/// (random sampling) or skipped (explicit points).
pub fn mikhlin_check(spec: &SymbolSpec, alpha_max: u32, sampling: &MikhlinSampling) -> Result<MikhlinReport> {
    let mut points = match sampling {
        MikhlinSampling::Points(p) => p.clone(),
        MikhlinSampling::Random {
            count,
            seed,
            r_min,
            r_max,
        } => {
            if !(*r_min > 0.0 && r_max > r_min) {
                return Err(Error::param(
                    "radii",
                    format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]"),
                ));
            }
            let mut stream = 0;
            random_points(spec.dim, *count, *seed, *r_min, *r_max, &mut stream)
        }
    };
    let alphas = multi_indices(spec.dim, alpha_max);
    let mut entries: Vec<MikhlinEntry> = alphas
        .iter()
        .map(|a| MikhlinEntry {
            alpha: a.clone(),
            order: a.iter().sum(),
            constant: 0.0,
            truncation_estimate: 0.0,
            argmax: vec![],
        })
        .collect();
    let mut used = 0;
    let mut rejected = 0;
    let mut redraw_stream = 1u64 << 32;
    let mut i = 0;
    while i < points.len() {
        let xi = points[i].clone();
        i += 1;
        spec.check_point(&xi)?;
        let r = euclidean(&xi);
        if r == 0.0 {
            rejected += 1;
            continue;
        }
        let h = 1e-4 * r;
        let mut values = Vec::with_capacity(alphas.len());
        let mut finite = true;
        for alpha in &alphas {
            let coarse = central_difference(spec, &xi, alpha, h)?;
            let fine = central_difference(spec, &xi, alpha, 0.5 * h)?;
            if !(coarse.re.is_finite() && coarse.im.is_finite() && fine.re.is_finite() && fine.im.is_finite()) {
                finite = false;
                break;
            }
            values.push((coarse, fine));
        }
        if !finite {
            rejected += 1;
            if let MikhlinSampling::Random { seed, r_min, r_max, .. } = sampling {
                points.extend(random_points(spec.dim, 1, *seed, *r_min, *r_max, &mut redraw_stream));
            }
            continue;
        }
        used += 1;
        for (entry, (coarse, fine)) in entries.iter_mut().zip(values) {
            let weight = r.powi(entry.order as i32);
            let value = weight * fine.norm();
            let gap = (fine - coarse).norm() / 3.0 * weight;
            if value > entry.constant {
                entry.constant = value;
                entry.argmax = xi.clone();
            }
            if value > 0.0 {
                entry.truncation_estimate = entry.truncation_estimate.max(gap / value);
            }
        }
    }
    Ok(MikhlinReport {
        entries,
        points_used: used,
        points_rejected: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Domain;
    use proptest::prelude::*;

    #[test]
    fn bump_peaks_at_one() {
        assert!((default_bump(1.25) - 1.0).abs() < 1e-15);
        assert_eq!(default_bump(0.5), 0.0);
        assert_eq!(default_bump(2.0), 0.0);
        assert!(default_bump(0.51) > 0.0);
    }

    #[test]
    fn constant_is_constant() {
        let s = SymbolSpec::constant(2, 3.5).unwrap();
        assert_eq!(s.eval(&[0.3, -7.0]).unwrap(), Complex64::new(3.5, 0.0));
        assert_eq!(s.eval(&[0.0, 0.0]).unwrap(), Complex64::new(3.5, 0.0));
    }

    #[test]
    fn single_bump_on_dyadic_spheres() {
        // on |x| = 2^m the neighbouring bumps sit on the edge of their support
        let s = SymbolSpec::log_type(2, -1.0).unwrap();
        assert_eq!(s.eval(&[0.0, 0.0]).unwrap().norm(), 0.0);
        for m in -5..6 {
            let r = 2f64.powi(m);
            let x = [r * 0.6, r * 0.8];
            let d = euclidean(&[0.6 - 1.0, 0.8]);
            let expected = default_bump(1.0) * (1.0 + 4.0 * LN_2 - 2.0 * d.ln()).recip();
            assert!((s.eval(&x).unwrap().re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn log_type_is_zero_at_centres() {
        let s = SymbolSpec::log_type(2, -1.0)
            .unwrap()
            .with_centers(CenterSchedule::rotating(6))
            .unwrap();
        for k in -3..4i64 {
            let a = s.center(k);
            let x = [a[0] * 2f64.powi(k as i32), a[1] * 2f64.powi(k as i32)];
            // only the k-th bump is active at x when |a| = 1
            assert_eq!(s.eval(&x).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn power_type_is_infinite_at_centre() {
        let s = SymbolSpec::power_type(2, -0.6).unwrap();
        assert!(s.eval(&[1.0, 0.0]).unwrap().re.is_infinite());
        assert!(!s.is_bounded());
    }

    #[test]
    fn log_value_matches_formula() {
        let s = SymbolSpec::log_type(2, -2.0).unwrap();
        let x = [1.3, 0.2];
        let d = ((0.3f64).powi(2) + 0.04).sqrt();
        let r = euclidean(&x);
        let expected = default_bump(r) * (1.0 + 4.0 * LN_2 - 2.0 * d.ln()).powf(-2.0);
        // 2^{-1}x has radius 0.66, inside A as well; its centre is also e_1
        let y = [0.65, 0.1];
        let d1 = ((0.35f64).powi(2) + 0.01).sqrt();
        let expected = expected + default_bump(euclidean(&y)) * (1.0 + 4.0 * LN_2 - 2.0 * d1.ln()).powf(-2.0);
        assert!((s.eval(&x).unwrap().re - expected).abs() < 1e-14);
    }

    #[test]
    fn iterated_log_of_depth_one_is_log_type() {
        let a = SymbolSpec::new(2, SymbolKind::IteratedLog { beta: -1.5, ell: 1 }).unwrap();
        let b = SymbolSpec::log_type(2, -1.5).unwrap();
        for x in [[1.1, 0.3], [0.7, -0.2], [3.0, 1.0]] {
            assert!((a.eval(&x).unwrap() - b.eval(&x).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn iterated_log_depth_limits() {
        assert!(SymbolSpec::new(1, SymbolKind::IteratedLog { beta: -1.0, ell: 5 }).is_err());
        let s = SymbolSpec::new(3, SymbolKind::IteratedLog { beta: -1.0, ell: 4 }).unwrap();
        let v = s.eval(&[1.2, 0.1, 0.0]).unwrap().re;
        assert!(v.is_finite() && v > 0.0 && v <= 1.0);
    }

    #[test]
    fn validation_errors() {
        assert!(SymbolSpec::log_type(2, 0.5).is_err());
        assert!(SymbolSpec::new(2, SymbolKind::MikhlinRiesz { axis: 2 }).is_err());
        let bad = SymbolSpec::log_type(2, -1.0)
            .unwrap()
            .with_centers(CenterSchedule::fixed(&[3.0, 0.0]));
        assert!(bad.is_err());
    }

    #[test]
    fn custom_uses_nearest_sample() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let samples = GridFunction::from_frequency_fn(g, |xi| Complex64::new(xi[0], 1.0)).unwrap();
        let s = SymbolSpec::new(1, SymbolKind::Custom { samples }).unwrap();
        assert_eq!(s.eval(&[0.26]).unwrap(), Complex64::new(0.25, 1.0));
        assert_eq!(s.eval(&[-1.0]).unwrap(), Complex64::new(-1.0, 1.0));
        assert!(matches!(s.eval(&[1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn pieces_vanish_outside_annulus() {
        let fam = LittlewoodPaleyFamily::new(-2, 3).unwrap();
        let g = Grid::new(2, 8.0, 64).unwrap();
        let specs = [
            SymbolSpec::constant(2, 1.0).unwrap(),
            SymbolSpec::log_type(2, -1.0).unwrap(),
            SymbolSpec::power_type(2, -0.6).unwrap(),
            SymbolSpec::new(2, SymbolKind::MikhlinRiesz { axis: 0 }).unwrap(),
        ];
        for spec in &specs {
            let piece = localized_piece(spec, 1, &fam, g).unwrap();
            assert_eq!(piece.domain(), Domain::Space);
            for k in 0..g.len() {
                let r = euclidean(&g.point(k)[..2]);
                if r <= 0.5 || r >= 2.0 {
                    assert_eq!(piece.data()[k].norm(), 0.0);
                }
                assert!(piece.data()[k].re.is_finite());
            }
        }
    }

    #[test]
    fn constant_piece_is_scaled_psi() {
        let fam = LittlewoodPaleyFamily::new(-2, 3).unwrap();
        let g = Grid::new(1, 8.0, 64).unwrap();
        let piece = localized_piece(&SymbolSpec::constant(1, 2.0).unwrap(), 0, &fam, g).unwrap();
        for k in 0..g.len() {
            let expected = 2.0 * psi_hat(g.point(k)[0].abs());
            assert_eq!(piece.data()[k].re, expected);
        }
        assert!(localized_piece(&SymbolSpec::constant(1, 2.0).unwrap(), 5, &fam, g).is_err());
    }

    #[test]
    fn fixed_centre_pieces_are_identical_across_scales() {
        let fam = LittlewoodPaleyFamily::new(-4, 4).unwrap();
        let g = Grid::new(2, 8.0, 64).unwrap();
        let spec = SymbolSpec::log_type(2, -1.0).unwrap();
        let p0 = localized_piece(&spec, -3, &fam, g).unwrap();
        let p1 = localized_piece(&spec, 2, &fam, g).unwrap();
        assert_eq!(p0, p1);
    }

    #[test]
    fn mikhlin_constant_has_zero_derivatives() {
        let spec = SymbolSpec::constant(2, 4.0).unwrap();
        let rep = mikhlin_check(
            &spec,
            2,
            &MikhlinSampling::Random {
                count: 50,
                seed: 1,
                r_min: 0.1,
                r_max: 10.0,
            },
        )
        .unwrap();
        assert_eq!(rep.max_for_order(1), 0.0);
        assert_eq!(rep.max_for_order(2), 0.0);
        assert_eq!(rep.max_for_order(0), 4.0);
    }

    #[test]
    fn mikhlin_riesz_is_scale_invariant() {
        let spec = SymbolSpec::new(2, SymbolKind::MikhlinRiesz { axis: 0 }).unwrap();
        let dirs: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.37) / 64.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let at = |scale: f64| {
            let pts = dirs.iter().map(|d| vec![d[0] * scale, d[1] * scale]).collect();
            mikhlin_check(&spec, 2, &MikhlinSampling::Points(pts)).unwrap()
        };
        let base = at(1.0);
        for scale in [0.1, 10.0] {
            let other = at(scale);
            for order in 1..=2 {
                let (a, b) = (base.max_for_order(order), other.max_for_order(order));
                assert!(a > 0.0 && (a - b).abs() < 0.01 * a, "order {order}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mikhlin_gradient_matches_analytic_log_gradient() {
        // σ(x) = Σ_m φ(|2^{-m}x|) (1 + n log 4 - n log|2^{-m}x - e_1|)^β and
        // both m = 0 and m = 1 are active near x = (1.2, 0.1)
        let (beta, n) = (-1.0, 2.0);
        let spec = SymbolSpec::log_type(2, beta).unwrap();
        let x = [1.2, 0.1];
        let mut grad = [0.0; 2];
        for m in 0..2 {
            let scale = 0.5f64.powi(m);
            let y = [x[0] * scale, x[1] * scale];
            let dv = [y[0] - 1.0, y[1]];
            let d = euclidean(&dv);
            let l = 1.0 + n * 2.0 * LN_2 - n * d.ln();
            let r = euclidean(&y);
            let phi = default_bump(r);
            let g = (r - 0.5) * (2.0 - r);
            let dphi = phi * ((2.0 - r) - (r - 0.5)) / (g * g);
            for i in 0..2 {
                let dy = dphi * y[i] / r * l.powf(beta) + phi * beta * l.powf(beta - 1.0) * (-n * dv[i] / (d * d));
                grad[i] += scale * dy;
            }
        }
        let r = euclidean(&x);
        let rep = mikhlin_check(&spec, 1, &MikhlinSampling::Points(vec![x.to_vec()])).unwrap();
        for e in rep.entries.iter().filter(|e| e.order == 1) {
            let axis = e.alpha.iter().position(|&a| a == 1).unwrap();
            let expected = r * grad[axis].abs();
            assert!(
                (e.constant - expected).abs() < 1e-6 * expected,
                "{} vs {expected}",
                e.constant
            );
        }
    }

    #[test]
    fn mikhlin_log_type_grows_near_centre() {
        let spec = SymbolSpec::log_type(2, -1.0).unwrap();
        let growth: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&d| {
                let pts = vec![vec![1.0 + d, 0.0], vec![1.0, d], vec![1.0 - d, 0.0]];
                mikhlin_check(&spec, 1, &MikhlinSampling::Points(pts))
                    .unwrap()
                    .max_for_order(1)
            })
            .collect();
        assert!(growth[0] < growth[1] && growth[1] < growth[2], "{growth:?}");
    }

    #[test]
    fn mikhlin_redraws_singular_points() {
        let spec = SymbolSpec::power_type(1, -0.5).unwrap();
        let rep = mikhlin_check(&spec, 1, &MikhlinSampling::Points(vec![vec![1.0], vec![1.3]])).unwrap();
        assert_eq!(rep.points_rejected, 1);
        assert_eq!(rep.points_used, 1);
    }

    #[test]
    fn serde_schema_roundtrip() {
        let json = r#"{"dim": 2, "kind": "log_type", "beta": -2.0,
                       "centers": {"preset": "random-seeded", "seed": 7}}"#;
        let spec: SymbolSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.kind, SymbolKind::LogType { beta: -2.0 });
        assert_eq!(spec.centers, CenterSchedule::random(7));
        let back: SymbolSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    fn schedule_strategy() -> impl Strategy<Value = CenterSchedule> {
        prop_oneof![
            Just(CenterSchedule::default()),
            (1u32..9).prop_map(CenterSchedule::rotating),
            any::<u64>().prop_map(CenterSchedule::random),
        ]
    }

    proptest! {
        #[test]
        fn centres_lie_in_annulus(sched in schedule_strategy(), j in -40i64..40, dim in 1usize..4) {
            let a = sched.center(j, dim);
            let r = euclidean(&a[..dim]);
            prop_assert!(r > 0.5 && r < 2.0);
        }

        #[test]
        fn index_shift_is_dilation(
            sched in schedule_strategy(),
            x0 in -6.0f64..6.0,
            x1 in -6.0f64..6.0,
            beta in -4.0f64..-0.1,
        ) {
            let spec = SymbolSpec::log_type(2, beta).unwrap().with_centers(sched).unwrap();
            let lhs = spec.shifted(1).eval(&[x0, x1]).unwrap();
            let rhs = spec.eval(&[2.0 * x0, 2.0 * x1]).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn log_type_is_bounded_by_bump(
            sched in schedule_strategy(),
            x0 in -20.0f64..20.0,
            x1 in -20.0f64..20.0,
            beta in -4.0f64..-0.1,
        ) {
            let spec = SymbolSpec::log_type(2, beta).unwrap().with_centers(sched).unwrap();
            let v = spec.eval(&[x0, x1]).unwrap();
            prop_assert!(v.im == 0.0 && v.re >= 0.0);
            // every log factor is at most 1
            let r = euclidean(&[x0, x1]);
            let bumps: f64 = (-8..8).map(|k| default_bump(r * 2f64.powi(-k))).sum();
            prop_assert!(v.re <= bumps * (1.0 + 1e-15));
        }
    }
}
