use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::weinstein_quotient_radial;
use crate::error::{Error, Result};
use crate::groundstate::{shoot_radial, ShootingParams, SolitonProfile, OMEGA_MAX};
use crate::spectral::{check_assumption, spectral_report, Verdict};

/// `n` log-spaced frequencies from `lo` to `hi` inclusive.
pub fn log_omega_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..n).map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp()).collect()
}

/// The default sweep: 24 log-spaced points in `[0.005, 0.18]`.
pub fn default_omega_grid() -> Vec<f64> {
    log_omega_grid(0.005, 0.18, 24)
}

/// `ω ↦ M(φ_ω)` on a sweep. Failed points carry `NaN` and a note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassCurve {
    pub dim: usize,
    pub omegas: Vec<f64>,
    pub masses: Vec<f64>,
    /// `dM/dω`: centered three-point differences inside, one-sided at the ends.
    pub slopes: Vec<f64>,
    /// Slope verdict where the spectral assumption was confirmed.
    pub verdicts: Vec<Option<Verdict>>,
    /// Weinstein quotient of each profile (three dimensions only).
    pub weinstein: Vec<f64>,
    /// Why a point has no mass or no verdict.
    pub notes: Vec<Option<String>>,
}

/// Derivative at `x[i]` of the quadratic through three neighbouring points.
fn three_point_slope(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    let c = i.clamp(1, n - 2);
    let (x0, x1, x2) = (x[c - 1], x[c], x[c + 1]);
    let (y0, y1, y2) = (y[c - 1], y[c], y[c + 1]);
    let t = x[i];
    y0 * ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2))
        + y1 * ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2))
        + y2 * ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1))
}

struct PointResult {
    mass: f64,
    weinstein: f64,
    assumption: std::result::Result<(), String>,
}

fn evaluate(omega: f64, dim: usize, params: &ShootingParams) -> std::result::Result<PointResult, String> {
    let profile: SolitonProfile = shoot_radial(omega, dim, params).map_err(|e| e.to_string())?;
    let weinstein = if dim == 3 { weinstein_quotient_radial(&profile).map_err(|e| e.to_string())? } else { f64::NAN };
    let assumption = match spectral_report(&profile, 2, 4) {
        Ok(report) => {
            let check = check_assumption(&report);
            if check.passed {
                Ok(())
            } else {
                Err(format!("spectral assumption violated: {}", check.failures.join("; ")))
            }
        }
        Err(e) => Err(format!("spectral solve failed: {e}")),
    };
    Ok(PointResult { mass: profile.mass, weinstein, assumption })
}

/// Shoots every `ω` (in parallel), then differentiates the curve.
pub fn mass_curve(dim: usize, omegas: &[f64], params: &ShootingParams) -> Result<MassCurve> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    if omegas.len() < 3 {
        return Err(Error::NotEnoughData(format!("{} frequencies, need at least 3", omegas.len())));
    }
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("frequencies must increase strictly".into()));
    }
    if let Some(&w) = omegas.iter().find(|w| !(**w > 0.0 && **w < OMEGA_MAX)) {
        return Err(Error::OmegaOutOfRange { omega: w, range: "(0, 3/16)" });
    }
    params.validate()?;
    let results: Vec<_> = omegas.par_iter().map(|&w| evaluate(w, dim, params)).collect();

    let masses: Vec<f64> = results.iter().map(|r| r.as_ref().map_or(f64::NAN, |p| p.mass)).collect();
    let slopes: Vec<f64> = (0..omegas.len()).map(|i| three_point_slope(omegas, &masses, i)).collect();
    let mut verdicts = Vec::with_capacity(omegas.len());
    let mut notes = Vec::with_capacity(omegas.len());
    for (r, s) in results.iter().zip(&slopes) {
        match r {
            Err(e) => {
                verdicts.push(None);
                notes.push(Some(e.clone()));
            }
            Ok(p) => match &p.assumption {
                Ok(()) if s.is_finite() => {
                    verdicts.push(Some(Verdict::from_slope(*s)));
                    notes.push(None);
                }
                Ok(()) => {
                    verdicts.push(None);
                    notes.push(Some("slope unavailable next to a failed point".into()));
                }
                Err(e) => {
                    verdicts.push(None);
                    notes.push(Some(e.clone()));
                }
            },
        }
    }
    let weinstein = results.iter().map(|r| r.as_ref().map_or(f64::NAN, |p| p.weinstein)).collect();
    Ok(MassCurve { dim, omegas: omegas.to_vec(), masses, slopes, verdicts, weinstein, notes })
}

impl MassCurve {
    pub const CSV_HEADER: &'static str = "omega,mass,slope,verdict";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.omegas.len() {
            let verdict = self.verdicts[i].map_or("none", Verdict::as_str);
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{verdict}\n", self.omegas[i], self.masses[i], self.slopes[i]));
        }
        out
    }
}

/// Intercept `b` of the least-squares line `(M(φ_ω) - M(Q))/ω ≈ b + cω`
/// over the points with `ω ≤ omega_cut`, i.e. `dM/dω` at `ω = 0⁺`.
pub fn slope_at_zero(curve: &MassCurve, q_mass: f64, omega_cut: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .omegas
        .iter()
        .zip(&curve.masses)
        .filter(|(w, m)| **w <= omega_cut && m.is_finite())
        .map(|(w, m)| (*w, (m - q_mass) / w))
        .collect();
    if pts.len() < 4 {
        return Err(Error::NotEnoughData(format!("{} points with ω ≤ {omega_cut}, need 4", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(my - sxy / sxx * mx)
}

/// Relative error of the small-`ω` slope of a planar curve against
/// `coefficient` (normally `(2/3)‖Q‖⁶_{L⁶}`).
pub fn asymptotic_slope_error(curve: &MassCurve, q_mass: f64, coefficient: f64) -> Result<f64> {
    if curve.dim != 2 {
        return Err(Error::DimensionError { expected: 2, got: curve.dim });
    }
    let b = slope_at_zero(curve, q_mass, 0.02)?;
    Ok((b - coefficient).abs() / coefficient.abs())
}

/// [`asymptotic_slope_error`] against `(1 - d/6)‖Q‖⁶_{L⁶} = (2/3)‖Q‖⁶_{L⁶}`.
pub fn asymptotic_slope_check(curve: &MassCurve, q: &SolitonProfile) -> Result<f64> {
    if q.dim != 2 {
        return Err(Error::DimensionError { expected: 2, got: q.dim });
    }
    asymptotic_slope_error(curve, q.mass, (1.0 - 2.0 / 6.0) * q.integrals.l6)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho0Estimate {
    /// Smallest mass, from the parabola through the lowest sample and its
    /// neighbours.
    pub rho0: f64,
    pub omega_min: f64,
    /// Smallest sampled mass and where it sits.
    pub sampled_min: f64,
    pub sampled_omega: f64,
    /// Location of the smallest sampled Weinstein quotient.
    pub weinstein_omega_min: f64,
}

fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Minimum of `M(φ_ω)` over a three-dimensional sweep.
pub fn rho0_estimate(curve: &MassCurve) -> Result<Rho0Estimate> {
    if curve.dim != 3 {
        return Err(Error::DimensionError { expected: 3, got: curve.dim });
    }
    let i = argmin(&curve.masses).ok_or_else(|| Error::NotEnoughData("no finite masses".into()))?;
    let n = curve.omegas.len();
    if i == 0 || i + 1 == n {
        return Err(Error::BoundaryMinimum { omega: curve.omegas[i] });
    }
    let (x0, x1, x2) = (curve.omegas[i - 1], curve.omegas[i], curve.omegas[i + 1]);
    let (y0, y1, y2) = (curve.masses[i - 1], curve.masses[i], curve.masses[i + 1]);
    // Vertex of the interpolating parabola.
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    let b = d01 - a * (x0 + x1);
    let (omega_min, rho0) = if a > 0.0 {
        let xv = (-b / (2.0 * a)).clamp(x0, x2);
        (xv, y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1))
    } else {
        (x1, y1)
    };
    let weinstein_omega_min = argmin(&curve.weinstein).map_or(f64::NAN, |j| curve.omegas[j]);
    Ok(Rho0Estimate { rho0, omega_min, sampled_min: y1, sampled_omega: x1, weinstein_omega_min })
}
