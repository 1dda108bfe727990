use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{spectral_weight, ComplexField, FftNd, UniformGrid};
use crate::groundstate::SolitonProfile;

/// `inf_{θ, y} ‖u - e^{iθ}φ(· - y)‖_{H¹}` and its minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulatedDistance {
    pub distance: f64,
    pub theta: f64,
    pub shift: [f64; 3],
}

/// Distance to the orbit `{e^{iθ}φ(· - y)}` of a fixed reference state,
/// with the reference spectrum cached for repeated use.
#[derive(Debug, Clone)]
pub struct OrbitDistance {
    grid: UniformGrid,
    fft: FftNd,
    /// `1 + |k|²`
    weight: Vec<f64>,
    reference_hat: Vec<Complex64>,
    wavevectors: Vec<[f64; 3]>,
}

impl OrbitDistance {
    pub fn new(reference: &ComplexField) -> Self {
        let grid = *reference.grid();
        let mut wavevectors = vec![[0.0; 3]; grid.len()];
        grid.for_each_mode(|i, k| wavevectors[i] = k);
        Self {
            grid,
            fft: FftNd::new(&grid),
            weight: grid.k_squared().into_iter().map(|k| 1.0 + k).collect(),
            reference_hat: reference.fourier(),
            wavevectors,
        }
    }

    /// Centers `profile` at the origin of `grid`.
    pub fn from_profile(profile: &SolitonProfile, grid: UniformGrid) -> Result<Self> {
        Ok(Self::new(&profile.to_field(grid, [0.0; 3])?))
    }

    /// `‖u - e^{iθ}φ(· - y)‖_{H¹}` for a given `θ`, `y`.
    fn distance_at(&self, u_hat: &[Complex64], theta: f64, shift: [f64; 3]) -> f64 {
        let rot = Complex64::from_polar(1.0, theta);
        let mut sum = 0.0;
        for (((u, p), w), k) in u_hat.iter().zip(&self.reference_hat).zip(&self.weight).zip(&self.wavevectors) {
            let phase = -(k[0] * shift[0] + k[1] * shift[1] + k[2] * shift[2]);
            let v = p * rot * Complex64::from_polar(1.0, phase);
            sum += w * (u - v).norm_sqr();
        }
        (sum * spectral_weight(&self.grid)).sqrt()
    }

    /// `⟨φ(· - y), u⟩_{H¹}` at an arbitrary shift.
    fn overlap_at(&self, u_hat: &[Complex64], shift: [f64; 3]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (((u, p), w), k) in u_hat.iter().zip(&self.reference_hat).zip(&self.weight).zip(&self.wavevectors) {
            let phase = k[0] * shift[0] + k[1] * shift[1] + k[2] * shift[2];
            sum += p.conj() * u * w * Complex64::from_polar(1.0, phase);
        }
        sum * spectral_weight(&self.grid)
    }

    pub fn measure(&self, field: &ComplexField) -> Result<ModulatedDistance> {
        if *field.grid() != self.grid {
            return Err(Error::InvalidField("field grid differs from the reference grid".into()));
        }
        let grid = self.grid;
        let n = grid.points();
        let h = grid.spacing();
        let u_hat = field.fourier();

        // |⟨φ(· - y_j), u⟩_{H¹}| on every grid shift y_j = j h by one inverse FFT.
        let mut corr: Vec<Complex64> = u_hat
            .iter()
            .zip(&self.reference_hat)
            .zip(&self.weight)
            .map(|((u, p), w)| p.conj() * u * w)
            .collect();
        self.fft.inverse(&mut corr);
        let (best, _) = corr
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
        let idx = grid.unravel(best);
        let signed = |j: usize| if j > n / 2 { j as f64 - n as f64 } else { j as f64 };
        let mut grid_shift = [0.0; 3];
        let mut refined = [0.0; 3];
        let stride = |axis: usize| n.pow((grid.dim() - 1 - axis) as u32);
        for axis in 0..grid.dim() {
            grid_shift[axis] = signed(idx[axis]) * h;
            let s = stride(axis);
            let at = |offset: isize| {
                let j = (idx[axis] as isize + offset).rem_euclid(n as isize) as usize;
                let flat = best - idx[axis] * s + j * s;
                corr[flat].norm()
            };
            let (fm, f0, fp) = (at(-1), at(0), at(1));
            let curvature = fm - 2.0 * f0 + fp;
            let offset = if curvature < 0.0 { (0.5 * (fm - fp) / curvature).clamp(-0.5, 0.5) } else { 0.0 };
            refined[axis] = grid_shift[axis] + offset * h;
        }

        // Keep whichever of the grid and sub-grid shifts fits better.
        let mut result: Option<ModulatedDistance> = None;
        for shift in [grid_shift, refined] {
            let theta = self.overlap_at(&u_hat, shift).arg().rem_euclid(2.0 * std::f64::consts::PI);
            let distance = self.distance_at(&u_hat, theta, shift);
            if result.is_none_or(|r| distance < r.distance) {
                result = Some(ModulatedDistance { distance, theta, shift });
            }
        }
        Ok(result.expect("two candidates evaluated"))
    }
}

/// One-off [`OrbitDistance::measure`] against a profile centered at the
/// origin.
pub fn modulated_distance(field: &ComplexField, profile: &SolitonProfile) -> Result<ModulatedDistance> {
    OrbitDistance::from_profile(profile, *field.grid())?.measure(field)
}
