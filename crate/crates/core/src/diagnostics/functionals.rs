use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::galilean_norm;
use crate::fields::{spectral_weight, ComplexField};
use crate::groundstate::SolitonProfile;

/// Largest admissible mass fraction outside the central half-box for the
/// `|x|²`-weighted functionals.
pub const VIRIAL_EDGE_LIMIT: f64 = 1e-6;

/// Mass, momentum `Im∫ū∇u` and energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriple {
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub energy: f64,
}

/// The quadratures every diagnostic is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub mass: f64,
    /// `‖∇u‖²`
    pub grad_sq: f64,
    /// `‖u‖⁴_{L⁴}`
    pub l4: f64,
    /// `‖u‖⁶_{L⁶}`
    pub l6: f64,
    pub momentum: [f64; 3],
}

impl Functionals {
    pub fn of(field: &ComplexField) -> Self {
        let grid = *field.grid();
        let dv = grid.cell_volume();
        let (mut m, mut l4, mut l6) = (0.0, 0.0, 0.0);
        for z in field.values() {
            let a = z.norm_sqr();
            m += a;
            l4 += a * a;
            l6 += a * a * a;
        }
        let hat = field.fourier();
        let nyquist = std::f64::consts::PI / grid.spacing();
        let mut grad = 0.0;
        let mut p = [0.0; 3];
        grid.for_each_mode(|i, k| {
            let w = hat[i].norm_sqr();
            grad += (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * w;
            for a in 0..grid.dim() {
                // The unpaired Nyquist mode carries no net momentum.
                if (k[a] + nyquist).abs() > 1e-9 * nyquist {
                    p[a] += k[a] * w;
                }
            }
        });
        let sw = spectral_weight(&grid);
        Self {
            mass: m * dv,
            grad_sq: grad * sw,
            l4: l4 * dv,
            l6: l6 * dv,
            momentum: [p[0] * sw, p[1] * sw, p[2] * sw],
        }
    }

    /// `E = ½‖∇u‖² - ½‖u‖⁴_{L⁴} + ⅓‖u‖⁶_{L⁶}`
    pub fn energy(&self) -> f64 {
        0.5 * self.grad_sq - 0.5 * self.l4 + self.l6 / 3.0
    }
}

pub fn invariants(field: &ComplexField) -> InvariantTriple {
    let f = Functionals::of(field);
    InvariantTriple {
        mass: f.mass,
        momentum: f.momentum[..field.grid().dim()].to_vec(),
        energy: f.energy(),
    }
}

fn check_edge(field: &ComplexField) -> Result<()> {
    let fraction = field.edge_mass_fraction();
    if fraction > VIRIAL_EDGE_LIMIT {
        return Err(Error::EdgeMass { fraction, limit: VIRIAL_EDGE_LIMIT });
    }
    Ok(())
}

/// `∫|x|²|u|²` about the box center, without the decay check.
pub fn virial_unchecked(field: &ComplexField) -> f64 {
    let values = field.values();
    let mut sum = 0.0;
    field.grid().for_each_point(|i, x| {
        sum += (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * values[i].norm_sqr();
    });
    sum * field.grid().cell_volume()
}

/// `∫|x|²|u|²`; fails with `EdgeMass` unless the field has decayed well
/// inside the box.
pub fn virial(field: &ComplexField) -> Result<f64> {
    check_edge(field)?;
    Ok(virial_unchecked(field))
}

/// `d/dt ∫|x|²|u|² = 2 Im∫ū x·∇u`.
pub fn virial_rate(field: &ComplexField) -> Result<f64> {
    check_edge(field)?;
    let grid = *field.grid();
    let values = field.values();
    let mut sum = 0.0;
    for axis in 0..grid.dim() {
        let d = crate::fields::partial_derivative(field, axis);
        let dv = d.values();
        grid.for_each_point(|i, x| {
            sum += x[axis] * (values[i].conj() * dv[i]).im;
        });
    }
    Ok(2.0 * sum * grid.cell_volume())
}

/// Right-hand side of the virial identity,
/// `d²/dt² ∫|x|²|u|² = 2‖∇u‖² - d‖u‖⁴_{L⁴} + (4d/3)‖u‖⁶_{L⁶}`.
pub fn virial_acceleration(field: &ComplexField) -> f64 {
    let f = Functionals::of(field);
    let d = field.grid().dim() as f64;
    2.0 * f.grad_sq - d * f.l4 + 4.0 * d / 3.0 * f.l6
}

fn require_dim(field: &ComplexField, expected: usize) -> Result<()> {
    let got = field.grid().dim();
    if got != expected {
        return Err(Error::DimensionError { expected, got });
    }
    Ok(())
}

/// `P(t) = ½‖J(t)u‖² - (t²/2)‖u‖⁴_{L⁴} + (t²/3)‖u‖⁶_{L⁶}` (planar fields).
pub fn pseudoconformal(field: &ComplexField, t: f64) -> Result<f64> {
    require_dim(field, 2)?;
    let f = Functionals::of(field);
    let j = galilean_norm(field, t);
    Ok(0.5 * j * j - 0.5 * t * t * f.l4 + t * t / 3.0 * f.l6)
}

/// `½‖J(t)u‖² - (t²/2)‖u‖⁴_{L⁴}`, nonnegative below the critical mass.
pub fn pseudoconformal_lower(field: &ComplexField, t: f64) -> Result<f64> {
    require_dim(field, 2)?;
    let j = galilean_norm(field, t);
    Ok(0.5 * j * j - 0.5 * t * t * Functionals::of(field).l4)
}

/// One sample of `(t, P(t), ‖u(t)‖⁶_{L⁶})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoconformalSample {
    pub t: f64,
    pub p: f64,
    pub l6: f64,
}

/// `max |dP/dt + (2t/3)‖u‖⁶_{L⁶}| / max |P|` over interior samples, with
/// centered differences (uniform or not).
pub fn pseudoconformal_rate_check(samples: &[PseudoconformalSample]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::NotEnoughData(format!("{} samples, need at least 3", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidArgument("sample times must increase".into()));
    }
    let scale = samples.iter().map(|s| s.p.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Undefined("P vanishes identically".into()));
    }
    let mut worst: f64 = 0.0;
    for w in samples.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        // Three-point derivative at b for possibly unequal spacing.
        let (h1, h2) = (b.t - a.t, c.t - b.t);
        let dp = -h2 / (h1 * (h1 + h2)) * a.p + (h2 - h1) / (h1 * h2) * b.p + h1 / (h2 * (h1 + h2)) * c.p;
        worst = worst.max((dp + 2.0 * b.t / 3.0 * b.l6).abs());
    }
    Ok(worst / scale)
}

/// `‖u‖⁴_{L⁴} M(Q) / (M(u) ‖∇u‖²)` for planar fields; at most 1.
pub fn gn_ratio(field: &ComplexField, q_mass: f64) -> Result<f64> {
    require_dim(field, 2)?;
    let f = Functionals::of(field);
    if f.mass == 0.0 || f.grad_sq == 0.0 {
        return Err(Error::Undefined("GN ratio of a field with zero mass or gradient".into()));
    }
    Ok(f.l4 * q_mass / (f.mass * f.grad_sq))
}

/// The same ratio from radial integrals of a planar profile.
pub fn gn_ratio_radial(profile: &SolitonProfile, q_mass: f64) -> Result<f64> {
    if profile.dim != 2 {
        return Err(Error::DimensionError { expected: 2, got: profile.dim });
    }
    let i = profile.integrals;
    Ok(i.l4 * q_mass / (i.l2 * i.grad_sq))
}

fn weinstein(l2: f64, grad_sq: f64, l4: f64, l6: f64) -> Result<f64> {
    if l4 == 0.0 {
        return Err(Error::Undefined("Weinstein quotient of the zero field".into()));
    }
    Ok(l2.sqrt() * l6.powf(0.25) * grad_sq.powf(0.75) / l4)
}

/// `‖u‖₂ ‖u‖₆^{3/2} ‖∇u‖₂^{3/2} / ‖u‖₄⁴` for fields on ℝ³.
pub fn weinstein_quotient_3d(field: &ComplexField) -> Result<f64> {
    require_dim(field, 3)?;
    let f = Functionals::of(field);
    weinstein(f.mass, f.grad_sq, f.l4, f.l6)
}

/// The same quotient from radial integrals of a three-dimensional profile.
pub fn weinstein_quotient_radial(profile: &SolitonProfile) -> Result<f64> {
    if profile.dim != 3 {
        return Err(Error::DimensionError { expected: 3, got: profile.dim });
    }
    let i = profile.integrals;
    weinstein(i.l2, i.grad_sq, i.l4, i.l6)
}
