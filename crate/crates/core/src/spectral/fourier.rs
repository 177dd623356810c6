//! Continuum-normalised DFT on the periodic box, with the `e^{-2πi x·ξ}`
//! convention: `f̂(ξ_k) ≈ Σ_i f(x_i) e^{-2πi x_i·ξ_k} h^n`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::{Domain, Grid, GridFunction};
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalised in-place n-dimensional DFT over every axis.
fn fft_nd(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.samples_per_dim;
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.dim {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

/// `(-1)^{m_1 + … + m_n}`: the phase from placing the box origin at `-L/2`.
fn checkerboard(grid: &Grid, flat: usize) -> f64 {
    let idx = grid.indices(flat);
    if idx[..grid.dim].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward_fourier(f: &GridFunction) -> Result<GridFunction> {
    if f.domain() != Domain::Space {
        return Err(Error::Shape("forward transform expects spatial samples".into()));
    }
    let grid = *f.grid();
    let mut data = f.data().to_vec();
    fft_nd(&grid, &mut data, FftDirection::Forward);
    let h = grid.cell_volume();
    for (k, z) in data.iter_mut().enumerate() {
        *z *= h * checkerboard(&grid, k);
    }
    Ok(GridFunction::from_parts_unchecked(grid, Domain::Frequency, data))
}

pub fn inverse_fourier(fhat: &GridFunction) -> Result<GridFunction> {
    if fhat.domain() != Domain::Frequency {
        return Err(Error::Shape("inverse transform expects frequency samples".into()));
    }
    let grid = *fhat.grid();
    let w = grid.frequency_cell_volume();
    let mut data: Vec<Complex64> = fhat
        .data()
        .iter()
        .enumerate()
        .map(|(k, &z)| z * (w * checkerboard(&grid, k)))
        .collect();
    fft_nd(&grid, &mut data, FftDirection::Inverse);
    Ok(GridFunction::from_parts_unchecked(grid, Domain::Space, data))
}

/// `(1 + 4π²|ξ|²)^{w/2}` on the principal branch (the base is real and ≥ 1).
pub fn bessel_symbol(xi_sq: f64, order: Complex64) -> Complex64 {
    let log_base = (1.0 + 4.0 * PI * PI * xi_sq).ln();
    (order * 0.5 * log_base).exp()
}

/// Multiply the transform by a function of the frequency and transform back.
pub fn apply_frequency_weight<F>(f: &GridFunction, mut weight: F) -> Result<GridFunction>
where
    F: FnMut(&[f64]) -> Complex64,
{
    let mut fhat = forward_fourier(f)?;
    let grid = *fhat.grid();
    for (k, z) in fhat.data_mut().iter_mut().enumerate() {
        *z *= weight(&grid.frequency(k)[..grid.dim]);
    }
    inverse_fourier(&fhat)
}

/// Bessel potential `(I - Δ)^{w/2} f` of complex order `w`.
pub fn bessel_potential(f: &GridFunction, order: Complex64) -> Result<GridFunction> {
    if order == Complex64::new(0.0, 0.0) {
        // exact identity up to the FFT round trip
        return inverse_fourier(&forward_fourier(f)?);
    }
    apply_frequency_weight(f, |xi| {
        let xi_sq: f64 = xi.iter().map(|c| c * c).sum();
        bessel_symbol(xi_sq, order)
    })
}

/// `T_σ f`: pointwise product with frequency samples of σ, then inverse transform.
pub fn apply_multiplier(sigma: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    if sigma.domain() != Domain::Frequency {
        return Err(Error::Shape("multiplier must be sampled in frequency".into()));
    }
    if sigma.grid() != f.grid() {
        return Err(Error::Shape(format!(
            "multiplier grid {:?} vs function grid {:?}",
            sigma.grid(),
            f.grid()
        )));
    }
    let mut fhat = forward_fourier(f)?;
    for (z, s) in fhat.data_mut().iter_mut().zip(sigma.data()) {
        *z *= s;
    }
    inverse_fourier(&fhat)
}
