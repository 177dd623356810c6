//! Hörmander-type conditions `sup_j ‖(I-Δ)^{s/2}[Ψ̂ σ(2^j ·)]‖` in `L^r`
//! and in the Lorentz space `L^{n/s,1}`.
//!
//! Each localized piece is supported in `|x| < 2` and is sampled on its own
//! periodic box (side 32 by default), independent of any operator grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, Tolerance};
use crate::rearrange::rearrangement;
use crate::spectral::{bessel_potential, Grid, LittlewoodPaleyFamily};
use crate::symbols::{localized_piece, SymbolKind, SymbolSpec};

/// Relative growth between the two finest resolutions above which a scale is
/// flagged divergent.
pub const DIVERGENCE_GROWTH: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConditionSpace {
    /// `L^r`, `1 ≤ r ≤ 2`.
    Sobolev { r: f64 },
    /// `L^{n/s,1}`.
    Lorentz,
}

impl ConditionSpace {
    pub fn label(&self) -> String {
        match self {
            ConditionSpace::Sobolev { r } => format!("L^{r}"),
            ConditionSpace::Lorentz => "L^{n/s,1}".to_string(),
        }
    }
}

/// Sampling of the localized pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PieceGrid {
    pub box_side: f64,
    /// Increasing sample counts per axis; the last two drive divergence flags.
    pub resolutions: Vec<usize>,
}

impl Default for PieceGrid {
    fn default() -> Self {
        Self {
            box_side: 32.0,
            resolutions: vec![256, 512],
        }
    }
}

impl PieceGrid {
    pub fn new(box_side: f64, resolutions: Vec<usize>) -> Result<Self> {
        let pg = Self { box_side, resolutions };
        pg.validate()?;
        Ok(pg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(Error::param("resolutions", "need at least one resolution"));
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("resolutions", "must be strictly increasing"));
        }
        if self.box_side < 4.0 {
            return Err(Error::param(
                "box_side",
                format!("piece box {} must contain the annulus |x| < 2", self.box_side),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRow {
    pub resolution: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleEntry {
    pub j: i32,
    /// `K_j` at the finest resolution.
    pub k_j: f64,
    pub refinement: Vec<RefinementRow>,
    pub divergent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub space: ConditionSpace,
    pub s: f64,
    pub n: usize,
    /// Lorentz exponent `n/s`, when applicable.
    pub p: Option<f64>,
    pub box_side: f64,
    pub resolutions: Vec<usize>,
    pub j_min: i32,
    pub j_max: i32,
    pub per_j: Vec<ScaleEntry>,
    /// `max_j K_j` at the finest resolution.
    pub k: f64,
    pub divergent: bool,
    /// True when the window provably contains every distinct `K_j`.
    pub sup_exact: bool,
}

impl ConditionReport {
    pub fn min_k(&self) -> f64 {
        self.per_j.iter().map(|e| e.k_j).fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `j, K_j, resolution, s, space`, one row per (j, resolution).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,K_j,resolution,s,space\n");
        for e in &self.per_j {
            for row in &e.refinement {
                out.push_str(&format!(
                    "{},{:.16e},{},{:.16e},{}\n",
                    e.j,
                    row.value,
                    row.resolution,
                    self.s,
                    self.space.label()
                ));
            }
        }
        out
    }
}

/// Norm of `(I-Δ)^{s/2}` applied to one piece.
fn piece_norm(
    spec: &SymbolSpec,
    j: i32,
    fam: &LittlewoodPaleyFamily,
    grid: Grid,
    s: f64,
    space: ConditionSpace,
) -> Result<f64> {
    let piece = localized_piece(spec, j, fam, grid)?;
    let lifted = bessel_potential(&piece, Complex64::new(s, 0.0))?;
    match space {
        ConditionSpace::Sobolev { r } => Ok(lifted.lp_norm(r)),
        ConditionSpace::Lorentz => rearrangement(&lifted)?.lorentz_p1_norm(spec.dim as f64 / s),
    }
}

/// Scales whose pieces can differ: one period of a periodic centre
/// schedule, or a single scale for dilation-invariant symbols.
fn distinct_scales(spec: &SymbolSpec, fam: &LittlewoodPaleyFamily) -> (Vec<i32>, bool) {
    let window: Vec<i32> = fam.j_range().collect();
    let period = match spec.kind {
        SymbolKind::Constant { .. } | SymbolKind::MikhlinRiesz { .. } => Some(1),
        SymbolKind::PowerType { .. } | SymbolKind::LogType { .. } | SymbolKind::IteratedLog { .. } => {
            spec.centers.period(spec.dim)
        }
        // Ψ̂ σ(2^j ·) vanishes unless |j| ≤ 1
        SymbolKind::PartitionBump => return (window.clone(), fam.j_min <= -1 && fam.j_max >= 1),
        SymbolKind::Custom { .. } => None,
    };
    match period {
        Some(p) if (p as usize) <= window.len() => (window[..p as usize].to_vec(), true),
        _ => (window, false),
    }
}

fn condition(
    spec: &SymbolSpec,
    s: f64,
    space: ConditionSpace,
    fam: &LittlewoodPaleyFamily,
    piece_grid: &PieceGrid,
) -> Result<ConditionReport> {
    spec.validate()?;
    piece_grid.validate()?;
    let n = spec.dim;
    let (evaluated, sup_exact) = distinct_scales(spec, fam);
    let grids = piece_grid
        .resolutions
        .iter()
        .map(|&res| Grid::new(n, piece_grid.box_side, res))
        .collect::<Result<Vec<_>>>()?;
    let mut computed: Vec<ScaleEntry> = Vec::with_capacity(evaluated.len());
    for &j in &evaluated {
        let refinement = grids
            .iter()
            .map(|&g| {
                Ok(RefinementRow {
                    resolution: g.samples_per_dim,
                    value: piece_norm(spec, j, fam, g, s, space)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<f64> = refinement.iter().map(|r| r.value).collect();
        let k_j = *values.last().expect("nonempty resolutions");
        let divergent = !k_j.is_finite()
            || (values.len() >= 2 && {
                let prev = values[values.len() - 2];
                prev > 0.0 && k_j > DIVERGENCE_GROWTH * prev
            });
        computed.push(ScaleEntry {
            j,
            k_j,
            refinement,
            divergent,
        });
    }
    // replicate periodic scales across the window
    let per_j: Vec<ScaleEntry> = fam
        .j_range()
        .map(|j| {
            let idx = (j - fam.j_min) as usize % computed.len();
            ScaleEntry {
                j,
                ..computed[idx].clone()
            }
        })
        .collect();
    let k = per_j.iter().map(|e| e.k_j).fold(0.0, f64::max);
    let divergent = per_j.iter().any(|e| e.divergent);
    Ok(ConditionReport {
        space,
        s,
        n,
        p: matches!(space, ConditionSpace::Lorentz).then(|| n as f64 / s),
        box_side: piece_grid.box_side,
        resolutions: piece_grid.resolutions.clone(),
        j_min: fam.j_min,
        j_max: fam.j_max,
        per_j,
        k,
        divergent,
        sup_exact,
    })
}

/// `sup_j ‖(I-Δ)^{s/2}[Ψ̂ σ(2^j ·)]‖_{L^r}` over the window of `fam`.
pub fn sobolev_condition(
    spec: &SymbolSpec,
    s: f64,
    r: f64,
    fam: &LittlewoodPaleyFamily,
    piece_grid: &PieceGrid,
) -> Result<ConditionReport> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("s", format!("must be positive, got {s}")));
    }
    if !(1.0..=2.0).contains(&r) {
        return Err(Error::param("r", format!("must lie in [1, 2], got {r}")));
    }
    condition(spec, s, ConditionSpace::Sobolev { r }, fam, piece_grid)
}

/// `sup_j ‖(I-Δ)^{s/2}[Ψ̂ σ(2^j ·)]‖_{L^{n/s,1}}` over the window of `fam`.
pub fn lorentz_condition(
    spec: &SymbolSpec,
    s: f64,
    fam: &LittlewoodPaleyFamily,
    piece_grid: &PieceGrid,
) -> Result<ConditionReport> {
    let n = spec.dim as f64;
    if !(s > 0.0 && s < n) {
        return Err(Error::param("s", format!("must lie in (0, {n}), got {s}")));
    }
    condition(spec, s, ConditionSpace::Lorentz, fam, piece_grid)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExampleIntegral {
    pub quadrature: f64,
    pub closed_form: f64,
    pub relative_difference: f64,
    pub error_estimate: f64,
}

/// `∫_0^{2^n ω_n} (log(e 4^n ω_n / t))^{β-1} dt/t = (1 + n log 2)^β / (-β)`.
///
/// The quadrature runs in `v = log(2^n ω_n / t)`, which turns the
/// integrand into `(1 + n log 2 + v)^{β-1}` on `[0, ∞)`; `ω_n` drops out.
pub fn example_integral(beta: f64, n: usize) -> Result<ExampleIntegral> {
    if !(beta.is_finite() && beta < 0.0) {
        return Err(Error::param(
            "beta",
            format!("the integral diverges unless beta < 0, got {beta}"),
        ));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    let c = 1.0 + n as f64 * std::f64::consts::LN_2;
    let closed_form = c.powf(beta) / -beta;
    let tol = Tolerance {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 20_000,
    };
    let est = integrate_to_infinity(|v| (c + v).powf(beta - 1.0), 0.0, tol);
    Ok(ExampleIntegral {
        quadrature: est.value,
        closed_form,
        relative_difference: (est.value - closed_form).abs() / closed_form,
        error_estimate: est.error,
    })
}
