use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic Cartesian box `[-L/2, L/2)^d` sampled with `N` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    dim: usize,
    extent: f64,
    points: usize,
}

/// FFT-friendly sizes: even, at least 8, and 5-smooth.
fn fft_friendly(n: usize) -> bool {
    if n < 8 || n % 2 != 0 {
        return false;
    }
    let mut m = n;
    for p in [2, 3, 5] {
        while m % p == 0 {
            m /= p;
        }
    }
    m == 1
}

impl UniformGrid {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent {extent} must be positive")));
        }
        if !fft_friendly(points) {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points} must be even, >= 8 and have no prime factor above 5"
            )));
        }
        Ok(Self { dim, extent, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    /// Volume element `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinates along one axis: `-L/2 + j h`.
    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        let half = 0.5 * self.extent;
        (0..self.points).map(|j| -half + j as f64 * h).collect()
    }

    /// FFT-ordered angular wavenumbers `2π m / L`, `m = 0..N/2-1, -N/2..-1`.
    /// The box is cubic so every axis shares the same array.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points as i64;
        let scale = 2.0 * PI / self.extent;
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j } else { j - n };
                scale * m as f64
            })
            .collect()
    }

    /// Multi-index of a flat index; the last axis varies fastest.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Calls `f(flat_index, x)` for every node, `x` padded with zeros past `dim`.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, [f64; 3])) {
        let axis = self.axis();
        for flat in 0..self.len() {
            let idx = self.unravel(flat);
            let mut x = [0.0; 3];
            for a in 0..self.dim {
                x[a] = axis[idx[a]];
            }
            f(flat, x);
        }
    }

    /// Calls `f(flat_index, k)` for every Fourier mode in FFT order.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 3])) {
        let ks = self.wavenumbers();
        for flat in 0..self.len() {
            let idx = self.unravel(flat);
            let mut k = [0.0; 3];
            for a in 0..self.dim {
                k[a] = ks[idx[a]];
            }
            f(flat, k);
        }
    }

    /// `|k|^2` for every mode, in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each_mode(|i, k| out[i] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        out
    }

    /// `|x|^2` for every node, measured from the box center.
    pub fn r_squared(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each_point(|i, x| out[i] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        out
    }
}

/// Uniform nodes `r_j = j Δr` on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max {r_max} must be positive")));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("radial grid needs at least 3 nodes, got {n}")));
        }
        Ok(Self { r_max, n })
    }

    /// Grid with the given spacing covering at least `[0, r_min]`.
    pub fn with_spacing(spacing: f64, r_min: f64) -> Result<Self> {
        let intervals = (r_min / spacing - 1e-9).ceil().max(2.0) as usize;
        Self::new(intervals as f64 * spacing, intervals + 1)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.n {
            self.r_max
        } else {
            j as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_fft_order() {
        let g = UniformGrid::new(1, 2.0 * PI, 8).unwrap();
        let k = g.wavenumbers();
        let expected = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (a, b) in k.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn wavenumber_sum_is_negative_nyquist() {
        for (n, l) in [(8, 3.0), (16, 40.0), (96, 150.0), (1024, 40.0)] {
            let g = UniformGrid::new(1, l, n).unwrap();
            let s: f64 = g.wavenumbers().iter().sum();
            let expected = -(n as f64) / 2.0 * 2.0 * PI / l;
            assert!((s - expected).abs() < 1e-9 * expected.abs(), "{n} {l}");
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(UniformGrid::new(1, 1.0, 4).is_err());
        assert!(UniformGrid::new(1, 1.0, 14).is_err());
        assert!(UniformGrid::new(4, 1.0, 16).is_err());
        assert!(UniformGrid::new(2, -1.0, 16).is_err());
        assert!(UniformGrid::new(3, 1.0, 96).is_ok());
    }

    #[test]
    fn spacing_times_points_is_extent() {
        let g = UniformGrid::new(2, 37.5, 256).unwrap();
        assert_eq!(g.spacing() * g.points() as f64, g.extent());
    }

    #[test]
    fn radial_nodes_monotone_and_closed() {
        let g = RadialGrid::new(40.0, 4001).unwrap();
        let r = g.nodes();
        assert_eq!(r[0], 0.0);
        assert_eq!(*r.last().unwrap(), 40.0);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}
