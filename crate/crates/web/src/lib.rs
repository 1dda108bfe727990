//! wasm-bindgen surface for the static page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Radial profile as JSON: `{omega, dim, r, phi, mass, energy, sup_norm}`.
#[wasm_bindgen(js_name = solitonProfile)]
pub fn soliton_profile(omega: f64, dim: usize) -> Result<String, JsError> {
    let plot = demo::profile_plot(omega, dim).map_err(js_err)?;
    serde_json::to_string(&plot).map_err(js_err)
}

/// Mass curve on a log grid as JSON: `{dim, omega, mass, verdict}`.
#[wasm_bindgen(js_name = massCurve)]
pub fn mass_curve(dim: usize, omega_min: f64, omega_max: f64, points: usize) -> Result<String, JsError> {
    let plot = demo::mass_curve_plot(dim, omega_min, omega_max, points).map_err(js_err)?;
    serde_json::to_string(&plot).map_err(js_err)
}

#[wasm_bindgen]
pub struct Evolution(demo::LineEvolution);

#[wasm_bindgen]
impl Evolution {
    #[wasm_bindgen(constructor)]
    pub fn new(omega: f64, amplitude: f64, velocity: f64, extent: f64, points: usize, dt: f64) -> Result<Evolution, JsError> {
        demo::LineEvolution::new(omega, amplitude, velocity, extent, points, dt).map(Evolution).map_err(js_err)
    }

    pub fn step(&mut self, steps: usize) -> Result<(), JsError> {
        self.0.step(steps).map_err(js_err)
    }

    pub fn time(&self) -> f64 {
        self.0.time()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.0.positions()
    }

    pub fn density(&self) -> Vec<f64> {
        self.0.density()
    }

    pub fn mass(&self) -> f64 {
        self.0.functionals().mass
    }

    pub fn energy(&self) -> f64 {
        self.0.functionals().energy()
    }
}
