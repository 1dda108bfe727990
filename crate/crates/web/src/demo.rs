//! The demo's operations in plain Rust, so they can be tested off the browser.

use cqnls::diagnostics::Functionals;
use cqnls::evolve::SplitStepper;
use cqnls::experiments::{log_omega_grid, mass_curve};
use cqnls::fields::{ComplexField, UniformGrid};
use cqnls::groundstate::{shoot_radial, ShootingParams};
use cqnls::{Complex64, Result};
use serde::Serialize;

/// Plots never need more than this many points.
const PLOT_POINTS: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePlot {
    pub omega: f64,
    pub dim: usize,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub mass: f64,
    pub energy: f64,
    pub sup_norm: f64,
}

pub fn profile_plot(omega: f64, dim: usize) -> Result<ProfilePlot> {
    let p = shoot_radial(omega, dim, &ShootingParams::default())?;
    let nodes = p.nodes();
    let stride = nodes.len().div_ceil(PLOT_POINTS).max(1);
    let (r, phi) = nodes.iter().zip(&p.values).step_by(stride).map(|(r, v)| (*r, *v)).unzip();
    Ok(ProfilePlot { omega, dim, r, phi, mass: p.mass, energy: p.energy, sup_norm: p.sup_norm })
}

#[derive(Debug, Clone, Serialize)]
pub struct MassCurvePlot {
    pub dim: usize,
    pub omega: Vec<f64>,
    pub mass: Vec<f64>,
    /// "stable", "unstable" or "none" per frequency.
    pub verdict: Vec<String>,
}

pub fn mass_curve_plot(dim: usize, omega_min: f64, omega_max: f64, points: usize) -> Result<MassCurvePlot> {
    let omegas = log_omega_grid(omega_min, omega_max, points);
    let curve = mass_curve(dim, &omegas, &ShootingParams::default())?;
    let verdict = curve.verdicts.iter().map(|v| v.map_or("none", |v| v.as_str()).to_string()).collect();
    Ok(MassCurvePlot { dim, omega: curve.omegas, mass: curve.masses, verdict })
}

/// A 1D soliton `λ φ_ω(x) e^{ivx}` stepped on demand.
pub struct LineEvolution {
    field: ComplexField,
    stepper: SplitStepper,
}

impl LineEvolution {
    pub fn new(omega: f64, amplitude: f64, velocity: f64, extent: f64, points: usize, dt: f64) -> Result<Self> {
        let grid = UniformGrid::new(1, extent, points)?;
        let phi = shoot_radial(omega, 1, &ShootingParams::default())?;
        let mut field = phi.to_field(grid, [0.0; 3])?;
        for (z, x) in field.values_mut().iter_mut().zip(grid.axis()) {
            *z *= Complex64::from_polar(amplitude, velocity * x);
        }
        Ok(Self { field, stepper: SplitStepper::new(grid, dt, false) })
    }

    pub fn step(&mut self, steps: usize) -> Result<()> {
        self.stepper.advance_field(&mut self.field, steps)
    }

    pub fn time(&self) -> f64 {
        self.field.time()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.field.grid().axis()
    }

    pub fn density(&self) -> Vec<f64> {
        self.field.values().iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn functionals(&self) -> Functionals {
        Functionals::of(&self.field)
    }
}
