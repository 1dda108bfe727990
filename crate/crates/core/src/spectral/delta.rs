use serde::{Deserialize, Serialize};

use super::operator::OperatorKind;
use crate::error::{Error, Result};
use crate::groundstate::SolitonProfile;
use crate::ode::Dopri;

/// How the first-order term of `-½δ'' - c(r)δ' + (5φ⁴ - 3φ² + ω)δ = 0`
/// is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaConvention {
    /// `c = 1/r`, as written for three dimensions.
    Cited,
    /// `c = (d - 1)/(2r)`, the radial part of `-½Δ` in `d` dimensions.
    RadialLaplacian,
}

impl DeltaConvention {
    pub const ALL: [Self; 2] = [Self::Cited, Self::RadialLaplacian];

    /// `c(r) · r`.
    fn drift(self, dim: usize) -> f64 {
        match self {
            Self::Cited => 1.0,
            Self::RadialLaplacian => 0.5 * (dim as f64 - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaTrajectory {
    pub omega: f64,
    pub dim: usize,
    pub convention: DeltaConvention,
    pub r: Vec<f64>,
    pub delta: Vec<f64>,
    /// First radius at which `δ` turns negative, interpolated between samples.
    pub sign_change: Option<f64>,
    /// `δ(r_max) < -1` and `δ` decreasing over the last quarter.
    pub diverges_negative: bool,
}

/// Integrates the radial `L1` zero-energy equation from `δ(0) = 1`,
/// `δ'(0) = 0` out to `r_max`, sampling `samples` equally spaced radii.
pub fn delta_ode(
    profile: &SolitonProfile,
    convention: DeltaConvention,
    r_max: f64,
    samples: usize,
) -> Result<DeltaTrajectory> {
    if !(r_max > 0.0) || samples < 8 {
        return Err(Error::InvalidArgument(format!("r_max = {r_max}, samples = {samples}")));
    }
    let drift = convention.drift(profile.dim);
    let q = profile.nonlinearity.quintic_coefficient();
    let potential = |r: f64| OperatorKind::L1.potential(profile.omega, q, profile.value_at(r));
    // δ'' = 2Vδ - 2c δ'; at the origin δ''(0) = 2V(0)/(1 + 2rc) by regularity.
    let rhs = |r: f64, y: &[f64; 2]| {
        let v = potential(r);
        let dd = if r < 1e-12 { 2.0 * v * y[0] / (1.0 + 2.0 * drift) } else { 2.0 * v * y[0] - 2.0 * drift / r * y[1] };
        [y[1], dd]
    };
    let h = profile.grid.spacing();
    let mut ode = Dopri::new(rhs, 0.0, [1.0, 0.0], 0.1 * h, 1e-11, 1e-14).with_max_step(h);
    let step = r_max / (samples - 1) as f64;
    let mut r = Vec::with_capacity(samples);
    let mut delta = Vec::with_capacity(samples);
    for j in 0..samples {
        let target = j as f64 * step;
        ode.advance_to(target)?;
        r.push(target);
        delta.push(ode.y[0]);
    }
    let sign_change = (1..samples).find(|&j| delta[j] < 0.0).map(|j| {
        // Linear interpolation between the bracketing samples.
        let (d0, d1) = (delta[j - 1], delta[j]);
        r[j - 1] + step * d0 / (d0 - d1)
    });
    let tail = &delta[3 * samples / 4..];
    let diverges_negative = *delta.last().expect("samples ≥ 8") < -1.0 && tail.windows(2).all(|w| w[1] < w[0]);
    Ok(DeltaTrajectory {
        omega: profile.omega,
        dim: profile.dim,
        convention,
        r,
        delta,
        sign_change,
        diverges_negative,
    })
}
