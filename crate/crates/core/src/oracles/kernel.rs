//! The Bessel kernel `G_s`, whose transform is `(1 + 4π²|ξ|²)^{-s/2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use super::{CheckResult, ConstantUsed};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, Tolerance};
use crate::spectral::{euclidean, forward_fourier, Domain, Grid, GridFunction};

const REL_TOL: Tolerance = Tolerance {
    abs_tol: 0.0,
    rel_tol: 1e-12,
    max_intervals: 4000,
};

fn prefactor(s: f64) -> f64 {
    (4.0 * PI).powf(-0.5 * s) / gamma(0.5 * s)
}

/// `ln` of the δ-integrand in `u = ln δ`, including the `dδ/δ` Jacobian.
fn exponent(q: f64, a: f64, u: f64) -> f64 {
    q * u - a * (-u).exp() - u.exp() / (4.0 * PI)
}

/// Maximiser of the (strictly concave) exponent.
fn peak(q: f64, a: f64) -> f64 {
    let slope = |u: f64| q + a * (-u).exp() - u.exp() / (4.0 * PI);
    let (mut lo, mut hi) = (-1.0, 1.0);
    while slope(lo) < 0.0 {
        lo *= 2.0;
    }
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫ e^{-k u} exp(E(u) - E(u*)) du` and `E(u*)`, over the range where the
/// integrand exceeds `e^{-745}` of its peak.
fn scaled_integral(q: f64, a: f64, k: f64) -> (f64, f64) {
    let q = q - k;
    let u_star = peak(q, a);
    let e_star = exponent(q, a, u_star);
    let reach = |dir: f64| {
        let mut step = 1.0;
        while exponent(q, a, u_star + dir * step) - e_star > -745.0 {
            step *= 1.5;
        }
        u_star + dir * step
    };
    let (lo, hi) = (reach(-1.0), reach(1.0));
    let mut breaks = vec![lo, u_star, hi];
    for split in [a.ln(), 0.0] {
        if split > lo && split < hi {
            breaks.push(split);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let est = integrate_with_breaks(&mut |u| (exponent(q, a, u) - e_star).exp(), &breaks, REL_TOL);
    (est.value, e_star)
}

fn check_order(s: f64, n: usize) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param("s", format!("need s > 0, got {s}")));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    Ok(())
}

fn radial_kernel(s: f64, n: usize, r: f64) -> f64 {
    let (v, e) = scaled_integral(0.5 * (s - n as f64), PI * r * r, 0.0);
    prefactor(s) * v * e.exp()
}

/// `G_s(x) = (4π)^{-s/2} Γ(s/2)^{-1} ∫_0^∞ e^{-π|x|²/δ} e^{-δ/4π} δ^{(s-n)/2} dδ/δ`,
/// integrated adaptively in `ln δ` with splits at `δ = π|x|²`, `δ = 1` and
/// the integrand's peak.
pub fn bessel_kernel(s: f64, x: &[f64], n: usize) -> Result<f64> {
    check_order(s, n)?;
    if x.len() != n {
        return Err(Error::Shape(format!("point has {} coordinates, expected {n}", x.len())));
    }
    let r = euclidean(x);
    if r == 0.0 {
        if s <= n as f64 {
            return Err(Error::Domain(format!(
                "G_s is singular at the origin for s = {s} ≤ n = {n}"
            )));
        }
        let q = 0.5 * (s - n as f64);
        return Ok(prefactor(s) * gamma(q) * (4.0 * PI).powf(q));
    }
    Ok(radial_kernel(s, n, r))
}

/// `Γ((n-s)/2 + 1) / (2^s π^{n/2} Γ(s/2 + 1))`: the Riesz kernel dominates
/// `G_s`, which gives `G_s(x) |x|^{n-s} (n-s)/s` at most this value.
pub fn kernel_bound_constant(n: usize, s: f64) -> f64 {
    let n = n as f64;
    gamma(0.5 * (n - s) + 1.0) / (2f64.powf(s) * PI.powf(0.5 * n) * gamma(0.5 * s + 1.0))
}

/// `max_r G_s(r) r^{n-s} (n-s)/s` over the given radii against
/// [`kernel_bound_constant`]. The smallest ratio is kept in the context.
pub fn kernel_bound_check(s: f64, n: usize, radii: &[f64]) -> Result<CheckResult> {
    check_order(s, n)?;
    if s >= n as f64 {
        return Err(Error::param("s", format!("need s < n = {n}, got {s}")));
    }
    let ratios: Vec<f64> = radii
        .iter()
        .map(|&r| radial_kernel(s, n, r) * r.powf(n as f64 - s) * (n as f64 - s) / s)
        .collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c = kernel_bound_constant(n, s);
    Ok(
        CheckResult::inequality("bessel_kernel_bound", max, c, ConstantUsed::Explicit(c))
            .with("n", n as f64)
            .with("s", s)
            .with("min_ratio", min),
    )
}

/// `ln G_s` tabulated on a uniform grid in `ln r` with Hermite interpolation.
/// Below the table the kernel is continued as the power law matching the
/// first node; beyond it evaluation falls back to direct quadrature.
#[derive(Debug, Clone)]
pub struct KernelTable {
    s: f64,
    n: usize,
    u0: f64,
    du: f64,
    log_g: Vec<f64>,
    slope: Vec<f64>,
}

impl KernelTable {
    pub fn new(s: f64, n: usize, r_min: f64, r_max: f64) -> Result<Self> {
        check_order(s, n)?;
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::param(
                "r_min, r_max",
                format!("need 0 < r_min < r_max, got {r_min}, {r_max}"),
            ));
        }
        let u0 = r_min.ln();
        let nodes = ((r_max.ln() - u0) / 0.005).ceil() as usize + 1;
        let du = (r_max.ln() - u0) / (nodes - 1) as f64;
        let q = 0.5 * (s - n as f64);
        let (mut log_g, mut slope) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
        for i in 0..nodes {
            let r = (u0 + i as f64 * du).exp();
            let a = PI * r * r;
            let (v0, e0) = scaled_integral(q, a, 0.0);
            let (v1, e1) = scaled_integral(q, a, 1.0);
            log_g.push(prefactor(s).ln() + v0.ln() + e0);
            // d ln G / d ln r = -2π r² ∫e^{-u}e^E / ∫e^E
            slope.push(-2.0 * a * (v1 / v0) * (e1 - e0).exp());
        }
        Ok(Self {
            s,
            n,
            u0,
            du,
            log_g,
            slope,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let u = r.ln();
        let t = (u - self.u0) / self.du;
        if t <= 0.0 {
            return (self.log_g[0] + self.slope[0] * (u - self.u0)).exp();
        }
        let i = t.floor() as usize;
        if i + 1 >= self.log_g.len() {
            return radial_kernel(self.s, self.n, r);
        }
        let x = t - i as f64;
        let (y0, y1) = (self.log_g[i], self.log_g[i + 1]);
        let (m0, m1) = (self.slope[i] * self.du, self.slope[i + 1] * self.du);
        let x2 = x * x;
        let x3 = x2 * x;
        let v =
            (2.0 * x3 - 3.0 * x2 + 1.0) * y0 + (x3 - 2.0 * x2 + x) * m0 + (-2.0 * x3 + 3.0 * x2) * y1 + (x3 - x2) * m1;
        v.exp()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (`m ≥ 2`) by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫_{[-h/2,h/2]^n} G_s` for `n ∈ {1, 2}`, substituting `r = t^{1/s}` to
/// remove the `r^{s-1}` radial singularity.
fn origin_cell_integral(table: &KernelTable, s: f64, n: usize, h: f64) -> f64 {
    let radial = |rho: f64| -> f64 {
        // ∫_0^ρ G(r) r^{n-1} dr
        let t_max = rho.powf(s);
        integrate(
            |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let r = t.powf(1.0 / s);
                table.eval(r) * r.powi(n as i32 - 1) * r / (s * t)
            },
            0.0,
            t_max,
            REL_TOL,
        )
        .value
    };
    match n {
        1 => 2.0 * radial(0.5 * h),
        _ => 8.0 * integrate(|phi: f64| radial(0.5 * h / phi.cos()), 0.0, 0.25 * PI, REL_TOL).value,
    }
}

/// Cell averages `h^{-n} ∫_{cell} G_s` on a grid of dimension 1 or 2, the
/// origin cell handled by a singular radial quadrature and every other cell
/// by tensor Gauss–Legendre with node count falling off with distance.
pub fn sampled_bessel_kernel(s: f64, grid: Grid) -> Result<GridFunction> {
    let n = grid.dim;
    check_order(s, n)?;
    if n > 2 {
        return Err(Error::Unsupported(
            "sampled Bessel kernel is implemented for n ≤ 2".into(),
        ));
    }
    if s >= n as f64 {
        return Err(Error::param("s", format!("need s < n = {n}, got {s}")));
    }
    let h = grid.spacing();
    let table = KernelTable::new(s, n, 1e-10 * h, grid.box_side * (n as f64).sqrt())?;
    let rules: Vec<Vec<(f64, f64)>> = [10, 6, 4, 3].iter().map(|&m| gauss_legendre(m)).collect();
    let half = grid.samples_per_dim / 2;
    let coords = grid.axis_coordinates();
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, z) in data.iter_mut().enumerate() {
        let idx = grid.indices(k);
        let d = idx[..n].iter().map(|&i| i.abs_diff(half)).max().unwrap_or(0);
        let value = if d == 0 {
            origin_cell_integral(&table, s, n, h) / h.powi(n as i32)
        } else {
            let rule = match d {
                1 => &rules[0],
                2 => &rules[1],
                3..=5 => &rules[2],
                _ => &rules[3],
            };
            let mut acc = 0.0;
            if n == 1 {
                for &(x, w) in rule {
                    acc += w * table.eval((coords[idx[0]] + 0.5 * h * x).abs());
                }
                acc * 0.5
            } else {
                for &(x, wx) in rule {
                    let px = coords[idx[0]] + 0.5 * h * x;
                    for &(y, wy) in rule {
                        let py = coords[idx[1]] + 0.5 * h * y;
                        acc += wx * wy * table.eval(px.hypot(py));
                    }
                }
                acc * 0.25
            }
        };
        *z = Complex64::new(value, 0.0);
    }
    GridFunction::new(grid, Domain::Space, data)
}

#[derive(Debug, Clone, Copy)]
pub struct KernelTransformCheck {
    /// Sum of cell integrals plus the kernel mass outside the inscribed ball.
    pub mass: f64,
    pub tail: f64,
    /// Largest relative deviation from `(1 + 4π²|ξ|²)^{-s/2}` on `|ξ| ≤ band`,
    /// after dividing out the cell-average transfer function.
    pub max_rel_error: f64,
    pub band: f64,
}

/// Transform the sampled kernel and compare with the Bessel symbol.
pub fn kernel_transform_check(s: f64, grid: Grid, band: f64) -> Result<KernelTransformCheck> {
    let g = sampled_bessel_kernel(s, grid)?;
    let n = grid.dim;
    let h = grid.spacing();
    let sum: f64 = g.data().iter().map(|z| z.re).sum::<f64>() * grid.cell_volume();
    let r_out = 0.5 * grid.box_side;
    let sphere = 2.0 * PI.powf(0.5 * n as f64) / gamma(0.5 * n as f64);
    let tail = sphere
        * crate::quadrature::integrate_to_infinity(
            |r| radial_kernel(s, n, r) * r.powi(n as i32 - 1),
            r_out,
            Tolerance::absolute(1e-300),
        )
        .value;
    let ghat = forward_fourier(&g)?;
    let mut max_rel_error: f64 = 0.0;
    for (k, z) in ghat.data().iter().enumerate() {
        let xi = grid.frequency(k);
        let xi_sq: f64 = xi[..n].iter().map(|c| c * c).sum();
        if xi_sq.sqrt() > band {
            continue;
        }
        let transfer: f64 = xi[..n]
            .iter()
            .map(|&c| {
                let a = PI * h * c;
                if a == 0.0 {
                    1.0
                } else {
                    a.sin() / a
                }
            })
            .product();
        let exact = (1.0 + 4.0 * PI * PI * xi_sq).powf(-0.5 * s);
        max_rel_error = max_rel_error.max((z / transfer - exact).norm() / exact);
    }
    Ok(KernelTransformCheck {
        mass: sum + tail,
        tail,
        max_rel_error,
        band,
    })
}
