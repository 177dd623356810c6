//! Sampled functions on periodic boxes, the continuum-normalised Fourier
//! transform, Bessel potentials, multipliers and the Littlewood–Paley partition.

mod fourier;
mod grid;
pub mod io;
mod partition;
mod random;

pub use fourier::{
    apply_frequency_weight, apply_multiplier, bessel_potential, bessel_symbol, forward_fourier, inverse_fourier,
};
pub(crate) use grid::euclidean;
pub use grid::{Domain, Grid, GridFunction};
pub use partition::{
    build_partition, cutoff_samples, eta, lp_piece, phi_hat, psi_hat, theta_hat, Cutoff, LittlewoodPaleyFamily,
};
pub use random::{modulated_gaussian, random_band_limited, random_rough};
