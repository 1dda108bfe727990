use num_complex::Complex64;

use super::fft::FftNd;
use super::grid::UniformGrid;
use crate::error::{Error, Result};

/// Complex wavefunction sampled on a `UniformGrid`, tagged with the
/// simulation time it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: UniformGrid,
    values: Vec<Complex64>,
    time: f64,
}

impl ComplexField {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidField(format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, values, time })
    }

    /// Skips the finiteness scan; callers in hot loops check it themselves.
    pub(crate) fn from_parts(grid: UniformGrid, values: Vec<Complex64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, time }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], time: 0.0 }
    }

    /// Samples `f(x)` at every node; `x` has `grid.dim()` meaningful entries.
    pub fn from_fn(grid: UniformGrid, mut f: impl FnMut([f64; 3]) -> Complex64) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        grid.for_each_point(|i, x| values[i] = f(x));
        Self::new(grid, values, 0.0)
    }

    pub fn from_real_fn(grid: UniformGrid, mut f: impl FnMut([f64; 3]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let values = self.values.iter().map(|z| z * c).collect();
        Self { grid: self.grid, values, time: self.time }
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values, time: self.time })
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, values, time: self.time })
    }

    pub(crate) fn same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidField("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Unnormalized FFT of the samples.
    pub fn fourier(&self) -> Vec<Complex64> {
        let mut data = self.values.clone();
        FftNd::new(&self.grid).forward(&mut data);
        data
    }

    /// Rebuilds a field from FFT coefficients.
    pub fn from_fourier(grid: UniformGrid, mut coeffs: Vec<Complex64>, time: f64) -> Self {
        FftNd::new(&grid).inverse(&mut coeffs);
        Self { grid, values: coeffs, time }
    }

    /// `max |u_j|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fraction of the mass lying outside the central half-box `|x_i| < L/4`.
    pub fn edge_mass_fraction(&self) -> f64 {
        let quarter = 0.25 * self.grid.extent();
        let mut total = 0.0;
        let mut outside = 0.0;
        let values = &self.values;
        self.grid.for_each_point(|i, x| {
            let m = values[i].norm_sqr();
            total += m;
            if x.iter().any(|c| c.abs() >= quarter) {
                outside += m;
            }
        });
        if total == 0.0 {
            0.0
        } else {
            outside / total
        }
    }
}

/// Quadrature Lᵖ norm `(h^d Σ|u_j|^p)^{1/p}`; `p = f64::INFINITY` gives the
/// sup norm.
pub fn lp_norm(field: &ComplexField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be >= 1")));
    }
    if !field.is_finite() {
        return Err(Error::InvalidField("non-finite samples".into()));
    }
    if p.is_infinite() {
        return Ok(field.sup_norm());
    }
    let sum: f64 = if p == 2.0 {
        field.values.iter().map(|z| z.norm_sqr()).sum()
    } else {
        field.values.iter().map(|z| z.norm().powf(p)).sum()
    };
    Ok((field.grid.cell_volume() * sum).powf(1.0 / p))
}

/// `∫|u|^p` by grid quadrature (the p-th power of `lp_norm`).
pub fn lp_integral(field: &ComplexField, p: u32) -> f64 {
    let h = field.grid.cell_volume();
    let sum: f64 = match p {
        2 => field.values.iter().map(|z| z.norm_sqr()).sum(),
        4 => field.values.iter().map(|z| z.norm_sqr().powi(2)).sum(),
        6 => field.values.iter().map(|z| z.norm_sqr().powi(3)).sum(),
        _ => field.values.iter().map(|z| z.norm().powi(p as i32)).sum(),
    };
    h * sum
}

/// `M(u) = ‖u‖²_{L²}`.
pub fn mass(field: &ComplexField) -> f64 {
    lp_integral(field, 2)
}

/// Parseval weight turning `Σ|û|²` into an L² integral.
pub(crate) fn spectral_weight(grid: &UniformGrid) -> f64 {
    grid.cell_volume() / grid.len() as f64
}

/// `‖∇u‖²_{L²}` through the Fourier multiplier `|k|²`.
pub fn gradient_norm_sq(field: &ComplexField) -> Result<f64> {
    if !field.is_finite() {
        return Err(Error::InvalidField("non-finite samples".into()));
    }
    Ok(gradient_norm_sq_hat(&field.grid, &field.fourier()))
}

fn gradient_norm_sq_hat(grid: &UniformGrid, hat: &[Complex64]) -> f64 {
    let k2 = grid.k_squared();
    spectral_weight(grid) * hat.iter().zip(&k2).map(|(z, k)| k * z.norm_sqr()).sum::<f64>()
}

/// `‖u‖²_{H¹}` with the symbol `1 + |k|²`.
pub fn h1_norm_sq(field: &ComplexField) -> f64 {
    let hat = field.fourier();
    let k2 = field.grid.k_squared();
    spectral_weight(&field.grid)
        * hat.iter().zip(&k2).map(|(z, k)| (1.0 + k) * z.norm_sqr()).sum::<f64>()
}

pub fn h1_norm(field: &ComplexField) -> f64 {
    h1_norm_sq(field).sqrt()
}

/// Spectral partial derivative along `axis`.
pub fn partial_derivative(field: &ComplexField, axis: usize) -> ComplexField {
    let mut hat = field.fourier();
    let grid = field.grid;
    let n = grid.points();
    let ks = grid.wavenumbers();
    grid.for_each_mode(|i, _| {
        let idx = grid.unravel(i);
        let mut k = ks[idx[axis]];
        // Drop the unpaired Nyquist mode so real data stays real.
        if idx[axis] == n / 2 {
            k = 0.0;
        }
        hat[i] *= Complex64::new(0.0, k);
    });
    ComplexField::from_fourier(grid, hat, field.time)
}
