//! Numerical toolkit for Fourier multipliers with Lorentz–Sobolev symbol
//! conditions: rearrangements and Lorentz norms, FFT-based multipliers and
//! Bessel potentials, Littlewood–Paley pieces, centred maximal functions,
//! empirical operator norms and checks of the supporting inequalities.

pub mod cli;
pub mod error;
pub mod hormander;
pub mod maximal;
pub mod opnorm;
pub mod oracles;
pub mod quadrature;
pub mod rearrange;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
