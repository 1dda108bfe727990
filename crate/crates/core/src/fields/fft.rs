use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::UniformGrid;

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Separable d-dimensional FFT on a `UniformGrid` (last axis contiguous).
///
/// The forward transform is unnormalized; `inverse` divides by `N^d` so that
/// `inverse(forward(u)) == u`.
#[derive(Clone)]
pub struct FftNd {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("dim", &self.dim).field("n", &self.n).finish()
    }
}

impl FftNd {
    pub fn new(grid: &UniformGrid) -> Self {
        let (forward, inverse) = plans(grid.points());
        Self { dim: grid.dim(), n: grid.points(), forward, inverse }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Contiguous last axis.
        plan.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let outer = data.len() / (n * stride);
            // Gather every line of this axis into a contiguous buffer.
            let mut pos = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for j in 0..n {
                        lines[pos + j] = data[base + j * stride];
                    }
                    pos += n;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            let mut pos = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    for j in 0..n {
                        data[base + j * stride] = lines[pos + j];
                    }
                    pos += n;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_3d() {
        let g = UniformGrid::new(3, 5.0, 8).unwrap();
        let fft = FftNd::new(&g);
        let orig: Vec<Complex64> =
            (0..g.len()).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in orig.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_lands_on_single_mode_2d() {
        let g = UniformGrid::new(2, 2.0 * std::f64::consts::PI, 16).unwrap();
        let fft = FftNd::new(&g);
        let axis = g.axis();
        let mut data = vec![Complex64::new(0.0, 0.0); g.len()];
        for i in 0..16 {
            for j in 0..16 {
                // k = (2, -3)
                data[i * 16 + j] = Complex64::from_polar(1.0, 2.0 * axis[i] - 3.0 * axis[j]);
            }
        }
        fft.forward(&mut data);
        let peak = 2 * 16 + (16 - 3);
        for (idx, z) in data.iter().enumerate() {
            if idx == peak {
                assert!((z.norm() - 256.0).abs() < 1e-9);
            } else {
                assert!(z.norm() < 1e-9);
            }
        }
    }
}
