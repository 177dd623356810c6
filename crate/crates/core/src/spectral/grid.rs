//! Uniform periodic boxes `[-L/2, L/2)^n` and complex samples on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice geometry shared by a function and its transform.
///
/// Spatial sample `i` along an axis sits at `-L/2 + i L/N`. Frequency samples
/// use the standard DFT ordering: index `m` carries the integer wavenumber
/// `k = m` for `m < N/2` and `k = m - N` otherwise, at physical frequency
/// `k / L`. The Nyquist bin therefore has frequency `-N/(2L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub box_side: f64,
    pub samples_per_dim: usize,
}

impl Grid {
    pub fn new(dim: usize, box_side: f64, samples_per_dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")));
        }
        if !(box_side.is_finite() && box_side > 0.0) {
            return Err(Error::param("box_side", format!("must be positive, got {box_side}")));
        }
        if samples_per_dim < 2 || !samples_per_dim.is_power_of_two() {
            return Err(Error::param(
                "samples_per_dim",
                format!("must be a power of two >= 2, got {samples_per_dim}"),
            ));
        }
        let grid = Self {
            dim,
            box_side,
            samples_per_dim,
        };
        if grid.len_checked().is_none() {
            return Err(Error::Config(format!("{samples_per_dim}^{dim} samples overflow")));
        }
        Ok(grid)
    }

    fn len_checked(&self) -> Option<usize> {
        self.samples_per_dim.checked_pow(self.dim as u32)
    }

    pub fn len(&self) -> usize {
        self.samples_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_side / self.samples_per_dim as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume element of the dual lattice, `(1/L)^n`.
    pub fn frequency_cell_volume(&self) -> f64 {
        self.box_side.recip().powi(self.dim as i32)
    }

    pub fn indices(&self, flat: usize) -> [usize; 3] {
        let n = self.samples_per_dim;
        let mut idx = [0; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rest % n;
            rest /= n;
        }
        idx
    }

    pub fn flat(&self, idx: [usize; 3]) -> usize {
        let n = self.samples_per_dim;
        idx[..self.dim].iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -0.5 * self.box_side + i as f64 * self.spacing()
    }

    /// Spatial coordinates of a sample; unused trailing axes are zero.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.indices(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.samples_per_dim;
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    /// Physical frequency of a frequency-domain sample.
    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let idx = self.indices(flat);
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            xi[axis] = self.wavenumber(idx[axis]) as f64 / self.box_side;
        }
        xi
    }

    /// Per-axis coordinate table, handy for tight loops.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.samples_per_dim).map(|i| self.coordinate(i)).collect()
    }

    pub fn axis_frequencies(&self) -> Vec<f64> {
        (0..self.samples_per_dim)
            .map(|m| self.wavenumber(m) as f64 / self.box_side)
            .collect()
    }

    /// Index of the sample at the spatial origin.
    pub fn origin(&self) -> usize {
        self.flat([self.samples_per_dim / 2; 3])
    }

    /// Highest resolved frequency magnitude along an axis, `N / (2L)`.
    pub fn nyquist(&self) -> f64 {
        self.samples_per_dim as f64 / (2.0 * self.box_side)
    }

    /// Same lattice with the box scaled by `factor` (the sample count is kept).
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Grid::new(self.dim, self.box_side * factor, self.samples_per_dim)
    }

    pub fn refined(&self) -> Result<Self> {
        Grid::new(self.dim, self.box_side, self.samples_per_dim * 2)
    }
}

pub(crate) fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

/// Complex samples on a [`Grid`], either in space or in frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction", into = "RawGridFunction")]
pub struct GridFunction {
    grid: Grid,
    domain: Domain,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, domain: Domain, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {pos}")));
        }
        Ok(Self { grid, domain, data })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, domain: Domain, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, domain, data }
    }

    pub fn zeros(grid: Grid, domain: Domain) -> Self {
        Self {
            grid,
            domain,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Sample a function of the spatial coordinates.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: Grid, mut f: F) -> Result<Self> {
        let data = (0..grid.len()).map(|k| f(&grid.point(k)[..grid.dim])).collect();
        Self::new(grid, Domain::Space, data)
    }

    pub fn from_real_fn<F: FnMut(&[f64]) -> f64>(grid: Grid, mut f: F) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Sample a function of the physical frequency (a multiplier, typically).
    pub fn from_frequency_fn<F: FnMut(&[f64]) -> Complex64>(grid: Grid, mut f: F) -> Result<Self> {
        let data = (0..grid.len()).map(|k| f(&grid.frequency(k)[..grid.dim])).collect();
        Self::new(grid, Domain::Frequency, data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    /// Element volume of the lattice this function lives on.
    pub fn measure_element(&self) -> f64 {
        match self.domain {
            Domain::Space => self.grid.cell_volume(),
            Domain::Frequency => self.grid.frequency_cell_volume(),
        }
    }

    /// Riemann-sum `L^p` norm, `p ∈ [1, ∞)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.measure_element();
        if p == 2.0 {
            return (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt();
        }
        let sum: f64 = self.data.iter().map(|z| z.norm().powf(p)).sum();
        (sum * w).powf(p.recip())
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            domain: self.domain,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn map<F: FnMut(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            domain: self.domain,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    /// Pointwise combination with another function on the same lattice and domain.
    pub fn zip_with<F: FnMut(Complex64, Complex64) -> Complex64>(
        &self,
        other: &GridFunction,
        mut f: F,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            domain: self.domain,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!("grid {:?} vs {:?}", self.grid, other.grid)));
        }
        if self.domain != other.domain {
            return Err(Error::Shape(format!("domain {:?} vs {:?}", self.domain, other.domain)));
        }
        Ok(())
    }

    /// Largest pointwise difference to another function on the same lattice.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Cyclic translation by whole samples: `out[i] = self[i + shift]`.
    pub fn cyclic_shift(&self, shift: [i64; 3]) -> Self {
        let n = self.grid.samples_per_dim as i64;
        let data = (0..self.grid.len())
            .map(|k| {
                let mut idx = self.grid.indices(k);
                for axis in 0..self.grid.dim {
                    idx[axis] = (idx[axis] as i64 + shift[axis]).rem_euclid(n) as usize;
                }
                self.data[self.grid.flat(idx)]
            })
            .collect();
        Self {
            grid: self.grid,
            domain: self.domain,
            data,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawGridFunction {
    dim: usize,
    box_side: f64,
    samples_per_dim: usize,
    #[serde(default = "default_domain")]
    domain: Domain,
    data: Vec<[f64; 2]>,
}

fn default_domain() -> Domain {
    Domain::Space
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;
    fn try_from(raw: RawGridFunction) -> Result<Self> {
        let grid = Grid::new(raw.dim, raw.box_side, raw.samples_per_dim)?;
        let data = raw.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        GridFunction::new(grid, raw.domain, data)
    }
}

impl From<GridFunction> for RawGridFunction {
    fn from(f: GridFunction) -> Self {
        RawGridFunction {
            dim: f.grid.dim,
            box_side: f.grid.box_side,
            samples_per_dim: f.grid.samples_per_dim,
            domain: f.domain,
            data: f.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry() {
        assert!(Grid::new(4, 1.0, 8).is_err());
        assert!(Grid::new(1, -1.0, 8).is_err());
        assert!(Grid::new(1, 1.0, 12).is_err());
    }

    #[test]
    fn index_roundtrip_and_coordinates() {
        let g = Grid::new(3, 4.0, 8).unwrap();
        for k in [0, 1, 63, 200, 511] {
            assert_eq!(g.flat(g.indices(k)), k);
        }
        assert_eq!(g.point(g.origin()), [0.0, 0.0, 0.0]);
        assert_eq!(g.coordinate(0), -2.0);
    }

    #[test]
    fn nyquist_bin_is_negative() {
        let g = Grid::new(1, 2.0, 8).unwrap();
        assert_eq!(g.wavenumber(4), -4);
        assert_eq!(g.frequency(4)[0], -2.0);
        assert_eq!(g.frequency(3)[0], 1.5);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::new(1, 1.0, 4).unwrap();
        let mut data = vec![Complex64::new(1.0, 0.0); 4];
        data[2].im = f64::NAN;
        assert!(matches!(
            GridFunction::new(g, Domain::Space, data),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn serde_roundtrip() {
        let g = Grid::new(2, 1.5, 4).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new(x[0], x[1])).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: GridFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
