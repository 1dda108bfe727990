//! Batch drivers: mass curves, small-frequency asymptotics, the minimal
//! three-dimensional soliton mass, perturbed-soliton runs and dispersive
//! decay fits.

mod masscurve;
mod run;
mod scattering;
mod stability;
pub mod svg;

pub use masscurve::{
    asymptotic_slope_check, asymptotic_slope_error, default_omega_grid, log_omega_grid, mass_curve, rho0_estimate,
    slope_at_zero, MassCurve, Rho0Estimate,
};
pub use run::{config_hash, write_run_dir, RunReport};
pub use scattering::{initial_field, scattering_run, InitialSpec, ScatteringConfig, WRAP_EDGE_FRACTION};
pub use stability::{
    perturbation, stability_run, PerturbationSpec, StabilityConfig, ENERGY_DRIFT_TOL, GROWTH_THRESHOLD,
    MASS_DRIFT_TOL,
};
