//! Numerical laboratory for the cubic-quintic nonlinear Schrödinger equation
//!
//! `i∂ₜu + ½Δu = -|u|²u + |u|⁴u`, `x ∈ ℝ^d`, `d ≤ 3`.

pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod fields;
pub mod groundstate;
mod ode;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
