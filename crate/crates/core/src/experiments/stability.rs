use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::run::{config_hash, relative_drift, RunReport};
use crate::diagnostics::{DiagnosticsRecorder, Functionals, OrbitDistance};
use crate::error::{Error, Result};
use crate::evolve::{evolve, EvolveConfig};
use crate::fields::{h1_norm, ComplexField, UniformGrid};
use crate::groundstate::SolitonProfile;

/// Growth of the modulated distance beyond which a run counts as unstable.
pub const GROWTH_THRESHOLD: f64 = 10.0;

/// Relative mass drift tolerated before fitted values are withheld.
pub const MASS_DRIFT_TOL: f64 = 1e-8;
/// Energy drift relative to the kinetic scale `½‖∇u₀‖²`.
pub const ENERGY_DRIFT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    /// `‖p‖_{H¹} / ‖φ‖_{H¹}`.
    pub delta: f64,
    pub seed: u64,
    /// Fourier modes with `|k| ≤ k_cut` are drawn.
    #[serde(default = "PerturbationSpec::default_k_cut")]
    pub k_cut: f64,
}

impl PerturbationSpec {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self { delta, seed, k_cut: Self::default_k_cut() }
    }

    fn default_k_cut() -> f64 {
        2.0
    }
}

/// Seeded band-limited complex noise shaped by `φ(|x|)/φ(0)` so that it sits
/// on the soliton, normalized to `δ‖φ‖_{H¹}`.
pub fn perturbation(profile: &SolitonProfile, grid: UniformGrid, spec: &PerturbationSpec) -> Result<ComplexField> {
    if !(spec.delta >= 0.0 && spec.delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta = {} must be nonnegative", spec.delta)));
    }
    if !(spec.k_cut > 0.0) {
        return Err(Error::InvalidArgument(format!("k_cut = {} must be positive", spec.k_cut)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut hat = vec![Complex64::new(0.0, 0.0); grid.len()];
    let cut2 = spec.k_cut * spec.k_cut;
    // Every mode consumes two draws so the noise does not depend on k_cut
    // through the stream position.
    grid.for_each_mode(|i, k| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if k[0] * k[0] + k[1] * k[1] + k[2] * k[2] <= cut2 {
            hat[i] = Complex64::new(re, im);
        }
    });
    let noise = ComplexField::from_fourier(grid, hat, 0.0);
    let peak = profile.value_at(0.0);
    let values = noise.values();
    let shaped = ComplexField::from_fn(grid, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        Complex64::new(profile.value_at(r) / peak, 0.0)
    })?;
    let shaped: Vec<Complex64> = shaped.values().iter().zip(values).map(|(e, z)| e * z).collect();
    let shaped = ComplexField::new(grid, shaped, 0.0)?;
    let norm = h1_norm(&shaped);
    if spec.delta == 0.0 || norm == 0.0 {
        return Ok(ComplexField::zeros(grid));
    }
    let target = spec.delta * h1_norm(&profile.to_field(grid, [0.0; 3])?);
    Ok(shaped.scaled(Complex64::new(target / norm, 0.0)))
}

/// Everything that determines a stability run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub omega: f64,
    pub dim: usize,
    pub grid: UniformGrid,
    pub perturbation: PerturbationSpec,
    pub evolve: EvolveConfig,
}

/// Evolves `φ + p` and tracks the modulated distance to the orbit of `φ`.
///
/// Fitted: `initial_mod_dist`, `max_mod_dist`, `growth_factor`, drifts.
/// Flags: mass and energy conservation.
pub fn stability_run(
    profile: &SolitonProfile,
    spec: &PerturbationSpec,
    grid: UniformGrid,
    config: &EvolveConfig,
) -> Result<RunReport> {
    if grid.dim() != profile.dim {
        return Err(Error::DimensionError { expected: profile.dim, got: grid.dim() });
    }
    let resolved =
        StabilityConfig { omega: profile.omega, dim: profile.dim, grid, perturbation: *spec, evolve: *config };
    let mut report = RunReport::new("stability", config_hash(&resolved)?);

    let phi = profile.to_field(grid, [0.0; 3])?;
    let u0 = phi.add(&perturbation(profile, grid, spec)?)?;
    let mut recorder = DiagnosticsRecorder::new().with_orbit(OrbitDistance::new(&phi));
    evolve(&u0, config, &mut [&mut recorder])?;
    let series = recorder.series;

    let dist = series.column(|r| r.mod_dist);
    let initial = dist[0];
    let max = dist.iter().copied().fold(0.0, f64::max);
    let growth = if initial > 0.0 { max / initial } else { f64::NAN };
    report.fit("initial_mod_dist", initial);
    report.fit("max_mod_dist", max);
    report.fit("growth_factor", growth);
    report.fit("final_mod_dist", *dist.last().expect("evolve observes at least once"));
    report.fit("max_edge_fraction", recorder.max_edge_fraction);

    let m0 = series.rows[0].mass;
    let mass_drift = relative_drift(&series.column(|r| r.mass), m0);
    let kinetic = 0.5 * Functionals::of(&u0).grad_sq;
    let energy_drift = relative_drift(&series.column(|r| r.energy), kinetic);
    report.fit("mass_drift", mass_drift);
    report.fit("energy_drift", energy_drift);
    report.flag("mass_conserved", mass_drift < MASS_DRIFT_TOL);
    report.flag("energy_conserved", energy_drift < ENERGY_DRIFT_TOL);
    if growth.is_finite() {
        let label = if growth > GROWTH_THRESHOLD { "unstable" } else { "stable" };
        report.labels.insert("dynamics".into(), label.into());
    }
    report.notes.push(
        "distance is to the orbit of the unperturbed profile; other minimizers of the same mass are not considered"
            .into(),
    );
    report.series = series;
    Ok(report)
}
