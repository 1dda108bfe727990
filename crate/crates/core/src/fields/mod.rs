//! Grids, complex fields, quadrature and spectral derivatives.

mod fft;
mod field;
mod grid;
pub mod io;

pub use fft::FftNd;
pub use field::{
    gradient_norm_sq, h1_norm, h1_norm_sq, lp_integral, lp_norm, mass, partial_derivative,
    ComplexField,
};
pub(crate) use field::spectral_weight;
pub use grid::{RadialGrid, UniformGrid};
