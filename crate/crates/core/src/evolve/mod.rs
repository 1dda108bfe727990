//! Strang-split spectral time stepping for
//! `i∂ₜu + ½Δu = -|u|²u + |u|⁴u` on the periodic box, the free flow
//! `e^{i t Δ/2}`, and the Galilean operator `J(t) = x + it∇`.

mod checkpoint;

pub use checkpoint::{CheckpointObserver, CheckpointRecord};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{spectral_weight, ComplexField, FftNd, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Time step; negative values integrate backwards.
    pub dt: f64,
    /// Absolute end time.
    pub t_end: f64,
    /// Observers run every `callback_stride` steps (and at the end).
    pub callback_stride: usize,
    /// Apply the 2/3 rule after every kinetic sub-step.
    #[serde(default)]
    pub dealias: bool,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64, callback_stride: usize) -> Self {
        Self { dt, t_end, callback_stride, dealias: false }
    }

    /// Number of steps from `t0` to `t_end`.
    pub fn steps_from(&self, t0: f64) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidArgument(format!("dt = {} must be finite and nonzero", self.dt)));
        }
        if self.callback_stride == 0 {
            return Err(Error::InvalidArgument("callback_stride must be positive".into()));
        }
        let ratio = (self.t_end - t0) / self.dt;
        let steps = ratio.round();
        if !(steps >= 0.0) || (ratio - steps).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "(t_end - t0) / dt = {ratio} is not a nonnegative integer"
            )));
        }
        Ok(steps as usize)
    }

    /// Largest `|dt|` for which the highest resolved mode turns by at most
    /// `π` per step, `2h²/π`.
    pub fn dt_guidance(grid: &UniformGrid) -> f64 {
        let h = grid.spacing();
        2.0 * h * h / std::f64::consts::PI
    }
}

/// Precomputed multipliers for repeated Strang steps of a fixed size.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    grid: UniformGrid,
    dt: f64,
    fft: FftNd,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: UniformGrid, dt: f64, dealias: bool) -> Self {
        let k2 = grid.k_squared();
        let keep = if dealias { Some(dealias_mask(&grid)) } else { None };
        let multiplier = |tau: f64| -> Vec<Complex64> {
            k2.iter()
                .enumerate()
                .map(|(i, k)| match &keep {
                    Some(mask) if !mask[i] => Complex64::new(0.0, 0.0),
                    _ => Complex64::from_polar(1.0, -tau * 0.5 * k),
                })
                .collect()
        };
        Self { grid, dt, fft: FftNd::new(&grid), half: multiplier(0.5 * dt), full: multiplier(dt) }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kinetic(&self, values: &mut [Complex64], multiplier: &[Complex64]) {
        self.fft.forward(values);
        for (z, m) in values.iter_mut().zip(multiplier) {
            *z *= m;
        }
        self.fft.inverse(values);
    }

    fn nonlinear(&self, values: &mut [Complex64]) {
        let dt = self.dt;
        for z in values.iter_mut() {
            let a = z.norm_sqr();
            *z *= Complex64::from_polar(1.0, dt * (a - a * a));
        }
    }

    /// Applies `steps` Strang steps, fusing adjacent kinetic half-steps.
    pub fn advance(&self, values: &mut [Complex64], steps: usize) {
        if steps == 0 {
            return;
        }
        self.kinetic(values, &self.half);
        for i in 0..steps {
            self.nonlinear(values);
            let last = if i + 1 == steps { &self.half } else { &self.full };
            self.kinetic(values, last);
        }
    }

    /// Advances the field in place and updates its time tag.
    pub fn advance_field(&self, field: &mut ComplexField, steps: usize) -> Result<()> {
        if *field.grid() != self.grid {
            return Err(Error::InvalidField("field grid differs from the stepper grid".into()));
        }
        self.advance(field.values_mut(), steps);
        let t = field.time() + steps as f64 * self.dt;
        field.set_time(t);
        if !field.is_finite() {
            return Err(Error::NumericalBlowup { t });
        }
        Ok(())
    }
}

/// Modes kept by the 2/3 rule: `|k_i| ≤ (2/3) k_max` along every axis.
fn dealias_mask(grid: &UniformGrid) -> Vec<bool> {
    let cutoff = (2.0 / 3.0) * std::f64::consts::PI / grid.spacing();
    let mut keep = vec![true; grid.len()];
    grid.for_each_mode(|i, k| {
        keep[i] = k.iter().all(|c| c.abs() <= cutoff + 1e-12);
    });
    keep
}

/// One Strang step: half kinetic, full nonlinear phase, half kinetic.
pub fn strang_step(field: &ComplexField, dt: f64) -> Result<ComplexField> {
    let mut out = field.clone();
    SplitStepper::new(*field.grid(), dt, false).advance_field(&mut out, 1)?;
    Ok(out)
}

/// Receives read-only snapshots during [`evolve`].
pub trait Observer {
    fn observe(&mut self, field: &ComplexField) -> Result<()>;
}

impl<F: FnMut(&ComplexField) -> Result<()>> Observer for F {
    fn observe(&mut self, field: &ComplexField) -> Result<()> {
        self(field)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Times at which the observers ran.
    pub times: Vec<f64>,
    pub final_field: ComplexField,
}

/// Steps `field` to `config.t_end`, calling every observer at the start,
/// every `callback_stride` steps, and at the end.
pub fn evolve(field: &ComplexField, config: &EvolveConfig, observers: &mut [&mut dyn Observer]) -> Result<Trajectory> {
    let t0 = field.time();
    let steps = config.steps_from(t0)?;
    let stepper = SplitStepper::new(*field.grid(), config.dt, config.dealias);
    let mut u = field.clone();
    let mut times = Vec::with_capacity(steps / config.callback_stride + 2);
    let mut notify = |u: &ComplexField, times: &mut Vec<f64>| -> Result<()> {
        times.push(u.time());
        for obs in observers.iter_mut() {
            obs.observe(u)?;
        }
        Ok(())
    };
    notify(&u, &mut times)?;
    let mut done = 0;
    while done < steps {
        let chunk = config.callback_stride.min(steps - done);
        stepper.advance_field(&mut u, chunk)?;
        done += chunk;
        // Recompute from the step count so that round-off does not drift.
        u.set_time(t0 + done as f64 * config.dt);
        notify(&u, &mut times)?;
    }
    Ok(Trajectory { times, final_field: u })
}

/// Exact free flow `e^{i t Δ/2}`: Fourier multiplier `exp(-i t |k|²/2)`.
pub fn free_propagate(field: &ComplexField, t: f64) -> ComplexField {
    let grid = *field.grid();
    let mut hat = field.fourier();
    for (z, k) in hat.iter_mut().zip(grid.k_squared()) {
        *z *= Complex64::from_polar(1.0, -t * 0.5 * k);
    }
    ComplexField::from_fourier(grid, hat, field.time() + t)
}

/// `‖J(t)u‖_{L²}` with `J(t) = x + it∇`.
///
/// For `t ≠ 0` this uses `J(t)u = it e^{i|x|²/2t} ∇(e^{-i|x|²/2t} u)`, which
/// needs the chirped field to be resolved on the grid; when it is not (small
/// `|t|` on a large box) the direct form is used instead.
pub fn galilean_norm(field: &ComplexField, t: f64) -> f64 {
    if t == 0.0 {
        return position_norm(field);
    }
    match galilean_norm_factorized(field, t) {
        Some(v) => v,
        None => galilean_norm_direct(field, t),
    }
}

/// `‖xu‖_{L²}`, i.e. `J(0)u`.
fn position_norm(field: &ComplexField) -> f64 {
    let mut sum = 0.0;
    let values = field.values();
    field.grid().for_each_point(|i, x| {
        sum += (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * values[i].norm_sqr();
    });
    (sum * field.grid().cell_volume()).sqrt()
}

/// `‖J(t)u‖` through the chirp factorization, or `None` when more than a
/// negligible fraction of the chirped field sits in the top third of the
/// spectrum.
pub fn galilean_norm_factorized(field: &ComplexField, t: f64) -> Option<f64> {
    let grid = *field.grid();
    let values = field.values();
    let mut chirped = vec![Complex64::new(0.0, 0.0); grid.len()];
    grid.for_each_point(|i, x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        chirped[i] = values[i] * Complex64::from_polar(1.0, -r2 / (2.0 * t));
    });
    FftNd::new(&grid).forward(&mut chirped);
    let keep = dealias_mask(&grid);
    let mut total = 0.0;
    let mut high = 0.0;
    let mut grad = 0.0;
    grid.for_each_mode(|i, k| {
        let p = chirped[i].norm_sqr();
        total += p;
        if !keep[i] {
            high += p;
        }
        grad += (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * p;
    });
    if total == 0.0 {
        return Some(0.0);
    }
    if high > 1e-24 * total {
        return None;
    }
    Some(t.abs() * (grad * spectral_weight(&grid)).sqrt())
}

/// `‖xu + it∇u‖` with the spectral gradient.
pub fn galilean_norm_direct(field: &ComplexField, t: f64) -> f64 {
    let grid = *field.grid();
    let values = field.values();
    let mut sum = 0.0;
    for axis in 0..grid.dim() {
        let d = crate::fields::partial_derivative(field, axis);
        let dv = d.values();
        grid.for_each_point(|i, x| {
            let j = values[i] * x[axis] + Complex64::new(0.0, t) * dv[i];
            sum += j.norm_sqr();
        });
    }
    (sum * grid.cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lp_norm, mass};
    use crate::groundstate::{soliton_1d_closed_form, ShootingParams};
    use std::f64::consts::PI;

    fn gaussian_1d(grid: UniformGrid, sigma: f64) -> ComplexField {
        ComplexField::from_real_fn(grid, |x| (-x[0] * x[0] / (2.0 * sigma * sigma)).exp()).unwrap()
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = UniformGrid::new(2, 10.0, 16).unwrap();
        let u = strang_step(&ComplexField::zeros(g), 0.1).unwrap();
        assert!(u.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn plane_wave_phase() {
        let g = UniformGrid::new(1, 2.0 * PI, 32).unwrap();
        let (amp, k) = (0.7, 3.0);
        let mut u = ComplexField::from_fn(g, |x| Complex64::from_polar(amp, k * x[0])).unwrap();
        let dt = 0.01;
        let steps = 37;
        SplitStepper::new(g, dt, false).advance_field(&mut u, steps).unwrap();
        let phase = -dt * steps as f64 * (k * k / 2.0 - amp * amp + amp.powi(4));
        let axis = g.axis();
        for (z, x) in u.values().iter().zip(&axis) {
            let exact = Complex64::from_polar(amp, k * x + phase);
            assert!((z - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn soliton_modulus_is_stationary() {
        let g = UniformGrid::new(1, 40.0, 1024).unwrap();
        let w = 0.12;
        let u0 = ComplexField::from_real_fn(g, |x| soliton_1d_closed_form(w, x[0]).unwrap()).unwrap();
        let out = evolve(&u0, &EvolveConfig::new(1e-3, 5.0, 1000), &mut []).unwrap();
        let err = out
            .final_field
            .values()
            .iter()
            .zip(u0.values())
            .map(|(a, b)| (a.norm() - b.re).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert!((out.final_field.time() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn mass_observer_constant() {
        let g = UniformGrid::new(2, 20.0, 64).unwrap();
        let u0 = ComplexField::from_fn(g, |x| {
            Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 3.0).exp() * 1.5, 0.3 * x[0].sin())
        })
        .unwrap();
        let m0 = mass(&u0);
        let mut masses = Vec::new();
        let mut obs = |u: &ComplexField| {
            masses.push(mass(u));
            Ok(())
        };
        let traj = evolve(&u0, &EvolveConfig::new(0.01, 1.0, 10), &mut [&mut obs]).unwrap();
        assert_eq!(traj.times.len(), 11);
        for m in masses {
            assert!(((m - m0) / m0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_duration_observes_once() {
        let g = UniformGrid::new(1, 10.0, 16).unwrap();
        let mut count = 0;
        let mut obs = |_: &ComplexField| {
            count += 1;
            Ok(())
        };
        let traj = evolve(&gaussian_1d(g, 1.0), &EvolveConfig::new(0.1, 0.0, 3), &mut [&mut obs]).unwrap();
        assert_eq!(count, 1);
        assert_eq!(traj.times, vec![0.0]);
    }

    #[test]
    fn non_integer_step_count_rejected() {
        let g = UniformGrid::new(1, 10.0, 16).unwrap();
        let r = evolve(&gaussian_1d(g, 1.0), &EvolveConfig::new(0.3, 1.0, 1), &mut []);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn time_reversal() {
        let g = UniformGrid::new(1, 30.0, 256).unwrap();
        let u0 = ComplexField::from_fn(g, |x| {
            Complex64::new(0.9 * (-x[0] * x[0] / 4.0).exp(), 0.2 * (-x[0] * x[0]).exp() * x[0])
        })
        .unwrap();
        let fwd = evolve(&u0, &EvolveConfig::new(1e-3, 1.0, 1000), &mut []).unwrap();
        let back = evolve(&fwd.final_field, &EvolveConfig::new(-1e-3, 0.0, 1000), &mut []).unwrap();
        let err = back.final_field.sub(&u0).unwrap().sup_norm();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn blowup_is_reported() {
        let g = UniformGrid::new(1, 10.0, 16).unwrap();
        let mut u = ComplexField::from_real_fn(g, |_| 1e200).unwrap();
        let r = SplitStepper::new(g, 0.1, false).advance_field(&mut u, 1);
        assert!(matches!(r, Err(Error::NumericalBlowup { .. })));
    }

    #[test]
    fn dealiasing_removes_top_third() {
        let g = UniformGrid::new(1, 2.0 * PI, 32).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, 14.0 * x[0])).unwrap();
        let mut v = u.clone();
        SplitStepper::new(g, 0.01, true).advance_field(&mut v, 1).unwrap();
        assert!(v.sup_norm() < 1e-12);
        let u = ComplexField::from_fn(g, |x| Complex64::from_polar(0.5, 3.0 * x[0])).unwrap();
        let mut v = u.clone();
        SplitStepper::new(g, 0.01, true).advance_field(&mut v, 1).unwrap();
        assert!((v.sup_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn free_flow_inverse_and_identity() {
        let g = UniformGrid::new(2, 16.0, 32).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), x[1].cos() * 0.1))
            .unwrap();
        let same = free_propagate(&u, 0.0);
        assert!(same.sub(&u).unwrap().sup_norm() < 1e-15);
        let back = free_propagate(&free_propagate(&u, 1.7), -1.7);
        assert!(back.sub(&u).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn free_gaussian_spreads() {
        // |u(t,x)|² for u0 = e^{-x²/2σ²} has width σ√(1 + t²/σ⁴).
        let g = UniformGrid::new(1, 80.0, 1024).unwrap();
        let sigma = 1.3;
        let u0 = gaussian_1d(g, sigma);
        for t in [0.5, 2.0, 5.0] {
            let u = free_propagate(&u0, t);
            let m = mass(&u);
            let mut second = 0.0;
            let vals = u.values();
            g.for_each_point(|i, x| second += x[0] * x[0] * vals[i].norm_sqr());
            let width = (2.0 * second * g.cell_volume() / m).sqrt();
            let exact = sigma * (1.0 + t * t / sigma.powi(4)).sqrt();
            assert!((width - exact).abs() < 1e-6 * exact, "t={t}: {width} vs {exact}");
            assert!(((m - mass(&u0)) / mass(&u0)).abs() < 1e-13);
        }
    }

    #[test]
    fn galilean_norm_at_zero_is_position_moment() {
        // ∫ x² e^{-x²} dx = √π / 2
        let g = UniformGrid::new(1, 40.0, 512).unwrap();
        let u = gaussian_1d(g, 1.0);
        let exact = (PI.sqrt() / 2.0).sqrt();
        assert!((galilean_norm(&u, 0.0) - exact).abs() < 1e-8);
    }

    #[test]
    fn galilean_routes_agree() {
        let g = UniformGrid::new(2, 24.0, 128).unwrap();
        let u = ComplexField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            Complex64::new((-r2 / 2.0).exp(), 0.3 * x[0] * (-r2).exp())
        })
        .unwrap();
        for t in [1.5, 3.0, -2.0] {
            let a = galilean_norm_factorized(&u, t).expect("chirp resolved");
            let b = galilean_norm_direct(&u, t);
            assert!((a - b).abs() < 1e-10 * b, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn galilean_norm_constant_under_free_flow() {
        let g = UniformGrid::new(1, 120.0, 2048).unwrap();
        let u0 = gaussian_1d(g, 1.5);
        let j0 = galilean_norm(&u0, 0.0);
        for t in [0.5, 1.0, 4.0] {
            let j = galilean_norm(&free_propagate(&u0, t), t);
            assert!((j - j0).abs() < 1e-8 * j0, "t={t}: {j} vs {j0}");
        }
    }

    #[test]
    fn soliton_lp_norm_matches_profile() {
        let g = UniformGrid::new(1, 40.0, 1024).unwrap();
        let p = crate::groundstate::shoot_radial(0.12, 1, &ShootingParams::default()).unwrap();
        let u = p.to_field(g, [0.0; 3]).unwrap();
        // ∫φ² of the closed form by 30-digit quadrature.
        let exact_mass: f64 = 1.3455197661940433;
        assert!((lp_norm(&u, 2.0).unwrap() - exact_mass.sqrt()).abs() < 1e-8);
        assert!((p.mass - exact_mass).abs() < 1e-12);
    }
}
