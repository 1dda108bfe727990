use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sphere_area;
use crate::error::Result;
use crate::fields::{ComplexField, RadialGrid, UniformGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `-|u|²u + |u|⁴u`
    CubicQuintic,
    /// `-|u|²u` only (the reference state `Q`).
    Cubic,
}

impl Nonlinearity {
    pub fn quintic_coefficient(self) -> f64 {
        match self {
            Self::CubicQuintic => 1.0,
            Self::Cubic => 0.0,
        }
    }
}

/// `∫|∇φ|²`, `∫φ²`, `∫φ⁴`, `∫φ⁶` over `ℝ^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegrals {
    pub grad_sq: f64,
    pub l2: f64,
    pub l4: f64,
    pub l6: f64,
}

/// `∫_{ℝ^d} f(|x|) dx` from samples on a uniform radial grid.
///
/// Trapezoid in `r` with weight `r^{d-1}`. For `d = 1, 3` the integrand is
/// even in `r` and the rule is spectrally accurate; for `d = 2` it is odd
/// and the first two Euler–Maclaurin endpoint terms at `r = 0` are added back.
pub fn radial_integral(grid: &RadialGrid, dim: usize, f: &[f64]) -> f64 {
    let h = grid.spacing();
    let n = f.len();
    let mut sum = 0.0;
    for (j, &v) in f.iter().enumerate() {
        let r = grid.node(j);
        let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
        sum += w * v * r.powi(dim as i32 - 1);
    }
    let mut total = h * sum;
    if dim == 2 {
        // g(r) = r f(r): g'(0) = f(0), g'''(0) = 3 f''(0) ≈ 6 (f1 - f0) / h².
        total += h * h / 12.0 * f[0] - h * h * (f[1] - f[0]) / 120.0;
    }
    sphere_area(dim) * total
}

/// `e^{κr} K_ν(κr)` type scaled Bessel function `e^{x}K_ν(x)` from
/// `K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt`; the trapezoid rule converges
/// geometrically for this integrand.
fn scaled_bessel_k(nu: f64, x: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let term = (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        j += 1;
    }
    h * sum
}

/// Decaying solution of the linearized radial equation
/// `ψ'' + (d-1)/r ψ' = κ²ψ`, as `(ln ψ(r) + κr, ψ'/ψ)`.
pub(crate) fn linear_tail(dim: usize, kappa: f64, r: f64) -> (f64, f64) {
    match dim {
        1 => (0.0, -kappa),
        2 => {
            let x = kappa * r;
            let k0 = scaled_bessel_k(0.0, x);
            let k1 = scaled_bessel_k(1.0, x);
            (k0.ln(), -kappa * k1 / k0)
        }
        _ => (-r.ln(), -kappa - 1.0 / r),
    }
}

/// `ψ(r) / ψ(r0)` for the linear tail.
pub(crate) fn tail_ratio(dim: usize, kappa: f64, r0: f64, r: f64) -> f64 {
    let (a, _) = linear_tail(dim, kappa, r0);
    let (b, _) = linear_tail(dim, kappa, r);
    (b - a - kappa * (r - r0)).exp()
}

/// Real radial ground state sample `φ_ω(r_j)` with derived scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonProfile {
    pub omega: f64,
    pub dim: usize,
    pub nonlinearity: Nonlinearity,
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Radius past which the profile continues as the linearized tail.
    pub splice_radius: f64,
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub sup_norm: f64,
    /// Exponential rate fitted to `r^{(d-1)/2} φ` ahead of the splice.
    pub decay_rate: f64,
    pub integrals: RadialIntegrals,
}

impl SolitonProfile {
    /// Assembles a profile and evaluates every derived scalar.
    pub(crate) fn assemble(
        omega: f64,
        dim: usize,
        nonlinearity: Nonlinearity,
        grid: RadialGrid,
        values: Vec<f64>,
        derivative: Vec<f64>,
        splice_radius: f64,
        decay_rate: f64,
    ) -> Self {
        let pow = |p: i32| values.iter().map(|v| v.powi(p)).collect::<Vec<_>>();
        let grad: Vec<f64> = derivative.iter().map(|v| v * v).collect();
        let integrals = RadialIntegrals {
            grad_sq: radial_integral(&grid, dim, &grad),
            l2: radial_integral(&grid, dim, &pow(2)),
            l4: radial_integral(&grid, dim, &pow(4)),
            l6: radial_integral(&grid, dim, &pow(6)),
        };
        let q = nonlinearity.quintic_coefficient();
        let mass = integrals.l2;
        let energy = 0.5 * integrals.grad_sq - 0.5 * integrals.l4 + q / 3.0 * integrals.l6;
        let sup_norm = values.iter().cloned().fold(0.0, f64::max);
        Self {
            omega,
            dim,
            nonlinearity,
            grid,
            values,
            derivative,
            splice_radius,
            mass,
            energy,
            action: energy + omega * mass,
            sup_norm,
            decay_rate,
            integrals,
        }
    }

    /// Exact decay rate `√(2ω)` of the linearized tail.
    pub fn tail_kappa(&self) -> f64 {
        (2.0 * self.omega).sqrt()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    /// Cubic Hermite interpolation in `r` using the stored derivative; past
    /// the grid the fitted exponential tail continues.
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.abs();
        let h = self.grid.spacing();
        let last = self.values.len() - 1;
        let r_end = self.grid.r_max();
        if r >= r_end {
            return self.values[last] * tail_ratio(self.dim, self.tail_kappa(), r_end, r);
        }
        let j = ((r / h).floor() as usize).min(last - 1);
        let t = (r - j as f64 * h) / h;
        let (p0, p1) = (self.values[j], self.values[j + 1]);
        let (m0, m1) = (self.derivative[j] * h, self.derivative[j + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }

    /// `φ''` from the profile equation
    /// `φ'' + (d-1)/r φ' = 2(ωφ - φ³ + qφ⁵)`, using `φ''(0) = 2f(φ(0))/d`.
    fn second_derivative(&self, r: f64, phi: f64, dphi: f64) -> f64 {
        let q = self.nonlinearity.quintic_coefficient();
        let f = 2.0 * (self.omega * phi - phi.powi(3) + q * phi.powi(5));
        if r == 0.0 {
            f / self.dim as f64
        } else {
            f - (self.dim as f64 - 1.0) / r * dphi
        }
    }

    /// `φ'(r)` by cubic Hermite interpolation of the stored derivative with
    /// `φ''` taken from the equation.
    pub fn derivative_at(&self, r: f64) -> f64 {
        let sign = if r < 0.0 { -1.0 } else { 1.0 };
        let r = r.abs();
        let h = self.grid.spacing();
        let last = self.values.len() - 1;
        let r_end = self.grid.r_max();
        if r >= r_end {
            return sign * self.value_at(r) * linear_tail(self.dim, self.tail_kappa(), r).1;
        }
        let j = ((r / h).floor() as usize).min(last - 1);
        let t = (r - j as f64 * h) / h;
        let (r0, r1) = (j as f64 * h, (j + 1) as f64 * h);
        let (p0, p1) = (self.derivative[j], self.derivative[j + 1]);
        let m0 = self.second_derivative(r0, self.values[j], p0) * h;
        let m1 = self.second_derivative(r1, self.values[j + 1], p1) * h;
        let t2 = t * t;
        let t3 = t2 * t;
        sign * ((2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1)
    }

    /// Samples `φ(|x - center|)` on a Cartesian grid.
    pub fn to_field(&self, grid: UniformGrid, center: [f64; 3]) -> Result<ComplexField> {
        ComplexField::from_fn(grid, |x| {
            let mut r2 = 0.0;
            for a in 0..grid.dim() {
                let dx = x[a] - center[a];
                r2 += dx * dx;
            }
            Complex64::new(self.value_at(r2.sqrt()), 0.0)
        })
    }

    pub fn meta(&self) -> ProfileMeta {
        let (p1, p2) = pohozaev_residuals(self);
        ProfileMeta {
            omega: self.omega,
            dim: self.dim,
            nonlinearity: self.nonlinearity,
            r_max: self.grid.r_max(),
            n: self.grid.len(),
            mass: self.mass,
            energy: self.energy,
            action: self.action,
            sup_norm: self.sup_norm,
            decay_rate: self.decay_rate,
            splice_radius: self.splice_radius,
            residuals: [p1, p2],
        }
    }
}

/// Both Pohozaev left-hand sides, each divided by the sum of the absolute
/// values of its terms:
///
/// `½G - L4 + qL6 + ωM` and `(d-2)/2 G - d/2 L4 + q d/3 L6 + ωdM`.
pub fn pohozaev_residuals(profile: &SolitonProfile) -> (f64, f64) {
    let RadialIntegrals { grad_sq, l2, l4, l6 } = profile.integrals;
    let q = profile.nonlinearity.quintic_coefficient();
    let d = profile.dim as f64;
    let w = profile.omega;
    let first = [0.5 * grad_sq, -l4, q * l6, w * l2];
    let second = [0.5 * (d - 2.0) * grad_sq, -0.5 * d * l4, q * d / 3.0 * l6, w * d * l2];
    let norm = |t: &[f64; 4]| t.iter().sum::<f64>() / t.iter().map(|v| v.abs()).sum::<f64>();
    (norm(&first), norm(&second))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub omega: f64,
    pub dim: usize,
    pub nonlinearity: Nonlinearity,
    pub r_max: f64,
    pub n: usize,
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub sup_norm: f64,
    pub decay_rate: f64,
    pub splice_radius: f64,
    pub residuals: [f64; 2],
}

/// Writes `<stem>.csv` (`r,phi`) and `<stem>.json` (metadata).
pub fn write_profile(profile: &SolitonProfile, dir: &Path, stem: &str) -> Result<()> {
    let mut csv = String::with_capacity(profile.values.len() * 48);
    csv.push_str("r,phi\n");
    for (r, v) in profile.nodes().iter().zip(&profile.values) {
        csv.push_str(&format!("{r:.17e},{v:.17e}\n"));
    }
    fs::write(dir.join(format!("{stem}.csv")), csv)?;
    let mut f = fs::File::create(dir.join(format!("{stem}.json")))?;
    serde_json::to_writer_pretty(&mut f, &profile.meta())?;
    writeln!(f)?;
    Ok(())
}
