//! Energy minimization on the mass sphere `Γ(ρ) = {‖u‖²_{L²} = ρ}` by a
//! preconditioned, normalized gradient flow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{mass, ComplexField, FftNd, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowParams {
    /// Initial pseudo-time step.
    pub tau: f64,
    pub tau_max: f64,
    pub max_iter: usize,
    /// Stop once `‖Hu + ωu‖ / ‖u‖` drops below this.
    pub tol: f64,
    /// Width of the Gaussian seed used when no seed is supplied.
    pub seed_width: f64,
    /// Fraction of mass in the outer half-box at which the flow is declared
    /// to be dispersing rather than concentrating.
    pub edge_mass_limit: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            tau: 0.5,
            tau_max: 8.0,
            max_iter: 50_000,
            tol: 1e-8,
            seed_width: 4.0,
            edge_mass_limit: 1e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimizer {
    pub field: ComplexField,
    /// Lagrange multiplier: the field solves `-½Δu - |u|²u + |u|⁴u + ωu = 0`.
    pub omega: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
}

struct Flow {
    grid: UniformGrid,
    fft: FftNd,
    half_k2: Vec<f64>,
    rho: f64,
}

struct State {
    values: Vec<Complex64>,
    energy: f64,
    /// `Hu` in physical space.
    h_u: Vec<Complex64>,
    mu: f64,
    residual: f64,
}

impl Flow {
    fn evaluate(&self, values: Vec<Complex64>) -> State {
        let dv = self.grid.cell_volume();
        let mut hat = values.clone();
        self.fft.forward(&mut hat);
        let kinetic: f64 = hat.iter().zip(&self.half_k2).map(|(z, k)| k * z.norm_sqr()).sum::<f64>()
            * dv
            / self.grid.len() as f64;
        for (z, k) in hat.iter_mut().zip(&self.half_k2) {
            *z *= k;
        }
        self.fft.inverse(&mut hat);
        let mut potential = 0.0;
        let mut h_u = hat;
        for (hu, u) in h_u.iter_mut().zip(&values) {
            let a = u.norm_sqr();
            potential += -0.5 * a * a + a * a * a / 3.0;
            *hu += u * (-a + a * a);
        }
        let energy = kinetic + potential * dv;
        let m: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dv;
        let mu = values.iter().zip(&h_u).map(|(u, hu)| (u.conj() * hu).re).sum::<f64>() * dv / m;
        let res: f64 = values.iter().zip(&h_u).map(|(u, hu)| (hu - u * mu).norm_sqr()).sum::<f64>() * dv;
        State { values, energy, h_u, mu, residual: (res / m).sqrt() }
    }

    fn normalize(&self, values: &mut [Complex64]) {
        let m: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume();
        let s = (self.rho / m).sqrt();
        for z in values.iter_mut() {
            *z *= s;
        }
    }

    /// `u - τ P⁻¹(Hu - μu)` with `P = ½|k|² + c`, then renormalized.
    fn step(&self, s: &State, tau: f64) -> Vec<Complex64> {
        let shift = (-s.mu).max(1e-3);
        let mut r: Vec<Complex64> = s.values.iter().zip(&s.h_u).map(|(u, hu)| hu - u * s.mu).collect();
        self.fft.forward(&mut r);
        for (z, k) in r.iter_mut().zip(&self.half_k2) {
            *z /= k + shift;
        }
        self.fft.inverse(&mut r);
        let mut next: Vec<Complex64> = s.values.iter().zip(&r).map(|(u, g)| u - g * tau).collect();
        self.normalize(&mut next);
        next
    }
}

fn edge_fraction(grid: &UniformGrid, values: &[Complex64]) -> f64 {
    ComplexField::from_parts(*grid, values.to_vec(), 0.0).edge_mass_fraction()
}

/// Runs the flow from a centered Gaussian seed of width `params.seed_width`.
pub fn minimize_energy_on_sphere(rho: f64, grid: UniformGrid, params: &FlowParams) -> Result<Minimizer> {
    let w2 = params.seed_width * params.seed_width;
    let seed = ComplexField::from_real_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w2)).exp())?;
    minimize_energy_from(&seed, rho, params)
}

/// Runs the flow from an arbitrary nonzero seed (rescaled to mass `rho`).
pub fn minimize_energy_from(seed: &ComplexField, rho: f64, params: &FlowParams) -> Result<Minimizer> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("mass {rho} must be positive")));
    }
    if mass(seed) == 0.0 {
        return Err(Error::InvalidArgument("seed field is zero".into()));
    }
    let grid = *seed.grid();
    let flow = Flow {
        grid,
        fft: FftNd::new(&grid),
        half_k2: grid.k_squared().into_iter().map(|k| 0.5 * k).collect(),
        rho,
    };
    let mut values = seed.values().to_vec();
    flow.normalize(&mut values);
    let mut state = flow.evaluate(values);
    let mut tau = params.tau;
    let mut iterations = 0;
    while state.residual > params.tol {
        if iterations >= params.max_iter {
            if state.energy >= 0.0 {
                return Err(Error::NoNegativeEnergyMinimizer {
                    rho,
                    reason: format!("energy {:.3e} after {iterations} iterations", state.energy),
                });
            }
            return Err(Error::ConvergenceFailure(format!(
                "gradient flow residual {:.3e} after {iterations} iterations",
                state.residual
            )));
        }
        iterations += 1;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = flow.evaluate(flow.step(&state, tau));
            if candidate.energy <= state.energy + 1e-14 * state.energy.abs().max(1e-300) {
                accepted = Some(candidate);
                tau = (tau * 1.25).min(params.tau_max);
                break;
            }
            tau *= 0.5;
        }
        state = match accepted {
            Some(s) => s,
            // No descent at any step size: the residual is at round-off level.
            None => break,
        };
        if iterations % 50 == 0 {
            let edge = edge_fraction(&grid, &state.values);
            if edge > params.edge_mass_limit && state.energy >= 0.0 {
                return Err(Error::NoNegativeEnergyMinimizer {
                    rho,
                    reason: format!("flow disperses (edge mass fraction {edge:.2e}, energy {:.3e})", state.energy),
                });
            }
        }
    }
    if state.energy >= 0.0 {
        return Err(Error::NoNegativeEnergyMinimizer {
            rho,
            reason: format!("stationary point has energy {:.3e}", state.energy),
        });
    }
    let edge = edge_fraction(&grid, &state.values);
    if edge > params.edge_mass_limit {
        return Err(Error::NoNegativeEnergyMinimizer {
            rho,
            reason: format!("stationary point is delocalized (edge mass fraction {edge:.2e})"),
        });
    }
    Ok(Minimizer {
        field: ComplexField::new(grid, state.values, 0.0)?,
        omega: -state.mu,
        energy: state.energy,
        residual: state.residual,
        iterations,
    })
}
