use serde::{Deserialize, Serialize};

use super::operator::{build_sector, GRID_REFINEMENT, eigen_bottom, eigenpair, negative_count, OperatorKind, SectorOperator, ZERO_MODE_TOL};
use crate::error::{Error, Result};
use crate::experiments::MassCurve;
use crate::groundstate::{shoot_radial, ShootingParams, SolitonProfile};

/// Slopes `dM/dω` with magnitude below this are not trusted to have a sign.
pub const SLOPE_TOL: f64 = 1e-3;

/// `ℓ = 1` zero mode of `L1` must sit within this of 0.
const TRANSLATION_EIGEN_TOL: f64 = 1e-4;
/// `‖L2 φ‖ / ‖φ‖` must fall below this.
const PHASE_RESIDUAL_TOL: f64 = 1e-6;
/// Cosine similarity required between a computed zero mode and its
/// expected form.
const KERNEL_OVERLAP_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Inconclusive => "inconclusive",
        }
    }

    pub fn from_slope(slope: f64) -> Self {
        if slope > SLOPE_TOL {
            Self::Stable
        } else if slope < -SLOPE_TOL {
            Self::Unstable
        } else {
            Self::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub omega: f64,
    pub dim: usize,
    pub kind: OperatorKind,
    pub ell: usize,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    /// `‖A f‖ / ‖f‖` for the expected kernel element (`φ` for `L2`, `ℓ = 0`;
    /// `φ'` for `L1`, `ℓ = 1`).
    pub kernel_residual: Option<f64>,
    /// Cosine similarity of the lowest eigenvector with that element.
    pub kernel_overlap: Option<f64>,
    /// Distance from 0 to the nearest eigenvalue that is not a zero mode.
    pub spectral_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub omega: f64,
    pub dim: usize,
    pub nodes: usize,
    pub sectors: Vec<SectorSummary>,
}

impl SpectralReport {
    pub fn sector(&self, kind: OperatorKind, ell: usize) -> Option<&SectorSummary> {
        self.sectors.iter().find(|s| s.kind == kind && s.ell == ell)
    }
}

fn weighted_cosine(op: &SectorOperator, a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for ((x, y), w) in a.iter().zip(b).zip(&op.weights) {
        ab += w * x * y;
        aa += w * x * x;
        bb += w * y * y;
    }
    ab.abs() / (aa * bb).sqrt()
}

fn summarize(profile: &SolitonProfile, kind: OperatorKind, ell: usize, k: usize) -> Result<SectorSummary> {
    let op = build_sector(profile, ell, kind)?;
    let eigenvalues = eigen_bottom(&op, k)?;
    let zero = ZERO_MODE_TOL * op.potential_sup();
    let expected = match (kind, ell) {
        (OperatorKind::L2, 0) => Some(op.sample(|r| profile.value_at(r))),
        (OperatorKind::L1, 1) => Some(op.sample(|r| profile.derivative_at(r))),
        _ => None,
    };
    let (kernel_residual, kernel_overlap) = match &expected {
        Some(f) => {
            let (_, v) = eigenpair(&op, 0)?;
            (Some(op.residual(f)), Some(weighted_cosine(&op, &v, f)))
        }
        None => (None, None),
    };
    let kernel_expected = expected.is_some();
    let spectral_gap = eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, l)| !(kernel_expected && *i == 0) && l.abs() > zero)
        .map(|(_, l)| l.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(SectorSummary {
        omega: profile.omega,
        dim: profile.dim,
        kind,
        ell,
        negative_count: negative_count(&op),
        eigenvalues,
        kernel_residual,
        kernel_overlap,
        spectral_gap,
    })
}

/// Bottom `k` eigenvalues of `L1` and `L2` in sectors `ℓ = 0 ..= max_ell`
/// (only `ℓ ≤ 1` on the line).
pub fn spectral_report(profile: &SolitonProfile, max_ell: usize, k: usize) -> Result<SpectralReport> {
    let top = if profile.dim == 1 { max_ell.min(1) } else { max_ell };
    let mut sectors = Vec::new();
    for kind in [OperatorKind::L1, OperatorKind::L2] {
        for ell in 0..=top {
            sectors.push(summarize(profile, kind, ell, k)?);
        }
    }
    let nodes = (profile.grid.len() - 1) * GRID_REFINEMENT + 1;
    Ok(SpectralReport { omega: profile.omega, dim: profile.dim, nodes, sectors })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub omega: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// One negative `L1` mode at `ℓ = 0` and no radial kernel; the `ℓ = 1`
/// translation modes at 0 with no negative partner; `ℓ ≥ 2` positive;
/// `φ` the zero-energy ground state of `L2`.
pub fn check_assumption(report: &SpectralReport) -> AssumptionCheck {
    let mut failures = Vec::new();
    let need = |kind, ell| report.sector(kind, ell).ok_or(format!("{kind:?} ℓ={ell} missing"));
    let mut fail = |msg: String| failures.push(msg);

    match need(OperatorKind::L1, 0) {
        Ok(s) => {
            if s.negative_count != 1 {
                fail(format!("L1 ℓ=0 has {} negative eigenvalues", s.negative_count));
            }
            if s.eigenvalues.len() > 1 && !(s.eigenvalues[1] > 0.0) {
                fail(format!("L1 ℓ=0 second eigenvalue {:.3e} is not positive", s.eigenvalues[1]));
            }
        }
        Err(e) => fail(e),
    }
    match need(OperatorKind::L1, 1) {
        Ok(s) => {
            if s.negative_count != 0 {
                fail(format!("L1 ℓ=1 has {} negative eigenvalues", s.negative_count));
            }
            if !(s.eigenvalues[0].abs() < TRANSLATION_EIGEN_TOL) {
                fail(format!("L1 ℓ=1 lowest eigenvalue {:.3e} is not a zero mode", s.eigenvalues[0]));
            }
            if !s.kernel_overlap.is_some_and(|c| c > 1.0 - KERNEL_OVERLAP_TOL) {
                fail(format!("L1 ℓ=1 zero mode does not match φ' (overlap {:?})", s.kernel_overlap));
            }
            if s.eigenvalues.len() > 1 && !(s.eigenvalues[1] > TRANSLATION_EIGEN_TOL) {
                fail(format!("L1 ℓ=1 second eigenvalue {:.3e} leaves no gap", s.eigenvalues[1]));
            }
        }
        Err(e) => fail(e),
    }
    if report.dim > 1 {
        match need(OperatorKind::L1, 2) {
            Ok(s) => {
                if !(s.eigenvalues[0] > 0.0) {
                    fail(format!("L1 ℓ=2 lowest eigenvalue {:.3e} is not positive", s.eigenvalues[0]));
                }
            }
            Err(e) => fail(e),
        }
    }
    match need(OperatorKind::L2, 0) {
        Ok(s) => {
            if s.negative_count != 0 {
                fail(format!("L2 ℓ=0 has {} negative eigenvalues", s.negative_count));
            }
            if !s.kernel_residual.is_some_and(|r| r < PHASE_RESIDUAL_TOL) {
                fail(format!("‖L2 φ‖/‖φ‖ = {:?}", s.kernel_residual));
            }
            if !s.kernel_overlap.is_some_and(|c| c > 1.0 - KERNEL_OVERLAP_TOL) {
                fail(format!("L2 ℓ=0 ground state does not match φ (overlap {:?})", s.kernel_overlap));
            }
        }
        Err(e) => fail(e),
    }
    AssumptionCheck { omega: report.omega, passed: failures.is_empty(), failures }
}

/// `dM/dω` at `omega` from the quadratic through the three usable curve
/// points nearest to it.
pub fn slope_at(curve: &MassCurve, omega: f64) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> =
        curve.omegas.iter().zip(&curve.masses).filter(|(_, m)| m.is_finite()).map(|(w, m)| (*w, *m)).collect();
    if pts.len() < 3 {
        return Err(Error::NotEnoughData(format!("{} usable mass points", pts.len())));
    }
    let (first, last) = (pts[0].0, pts[pts.len() - 1].0);
    if !(omega >= first && omega <= last) {
        return Err(Error::InvalidArgument(format!("omega = {omega} outside the sampled range [{first}, {last}]")));
    }
    pts.sort_by(|a, b| (a.0 - omega).abs().total_cmp(&(b.0 - omega).abs()));
    let mut three = [pts[0], pts[1], pts[2]];
    three.sort_by(|a, b| a.0.total_cmp(&b.0));
    let [(x0, y0), (x1, y1), (x2, y2)] = three;
    let x = omega;
    Ok(y0 * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2))
        + y1 * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2))
        + y2 * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1)))
}

/// Slope verdict at `omega`, provided `report` (computed at the same `ω`)
/// confirms the spectral assumption.
pub fn gss_verdict(curve: &MassCurve, omega: f64, report: &SpectralReport) -> Result<Verdict> {
    if curve.dim != report.dim || (report.omega - omega).abs() > 1e-12 * omega {
        return Err(Error::InvalidArgument(format!(
            "spectral report at (ω = {}, d = {}) does not match (ω = {omega}, d = {})",
            report.omega, report.dim, curve.dim
        )));
    }
    let first = curve.omegas.first().copied().unwrap_or(f64::NAN);
    let last = curve.omegas.last().copied().unwrap_or(f64::NAN);
    if !(omega > first && omega < last) {
        return Err(Error::InvalidArgument(format!("omega = {omega} is not interior to [{first}, {last}]")));
    }
    let check = check_assumption(report);
    if !check.passed {
        return Err(Error::AssumptionViolated { omega, detail: check.failures.join("; ") });
    }
    Ok(Verdict::from_slope(slope_at(curve, omega)?))
}

/// [`gss_verdict`] with the profile and spectral report computed here.
pub fn gss_verdict_at(curve: &MassCurve, omega: f64, params: &ShootingParams) -> Result<Verdict> {
    let profile = shoot_radial(omega, curve.dim, params)?;
    gss_verdict(curve, omega, &spectral_report(&profile, 2, 4)?)
}
