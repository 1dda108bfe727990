//! Symmetric tridiagonal eigenproblems by Sturm-sequence bisection and
//! inverse iteration.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` = entry `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal sizes {} / {} are inconsistent",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Number of eigenvalues below `x`: the count of negative pivots in the
    /// `LDLᵀ` factorization of `T - x`. An eigenvalue exactly at `x` may be
    /// counted.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + x.abs());
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!("eigenvalue {index} of a {} matrix", self.len())));
        }
        let (mut lo, mut hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
                return Ok(mid);
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::EigenFailure(format!("bisection for eigenvalue {index} did not settle")))
    }

    /// Unit eigenvector for an eigenvalue estimate `lambda` by inverse
    /// iteration with a partially pivoted tridiagonal solve.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let (lo, hi) = self.bounds();
        // Nudge the shift off the eigenvalue so the solve stays regular.
        let shift = lambda - 1e-13 * (hi - lo).max(1.0);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64 / 13.0).collect();
        normalize(&mut x);
        for _ in 0..8 {
            let mut y = self.solve_shifted(shift, &x)?;
            normalize(&mut y);
            let agree = y.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().abs();
            x = y;
            if (1.0 - agree).abs() < 1e-14 {
                break;
            }
        }
        // Fix the sign so the largest component is positive.
        let big = x.iter().cloned().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m });
        if big < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        let residual = {
            let tx = self.apply(&x);
            tx.iter().zip(&x).map(|(t, v)| (t - lambda * v).powi(2)).sum::<f64>().sqrt()
        };
        if !residual.is_finite() || residual > 1e-6 * (hi - lo).max(1.0) {
            return Err(Error::EigenFailure(format!("inverse iteration residual {residual:.3e}")));
        }
        Ok(x)
    }

    /// Solves `(T - s) y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        // Row i holds up to three entries after pivoting: u0 (diag), u1, u2.
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let mut d = self.diag[0] - s;
        let mut e = if n > 1 { self.off[0] } else { 0.0 };
        let mut f = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = d;
                break;
            }
            let below = self.off[i];
            let next_d = self.diag[i + 1] - s;
            let next_e = if i + 2 < n { self.off[i + 1] } else { 0.0 };
            if below.abs() > d.abs() {
                // Swap rows i and i+1.
                u0[i] = below;
                u1[i] = next_d;
                u2[i] = next_e;
                let m = d / below;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= m * rhs[i];
                d = e - m * next_d;
                e = f - m * next_e;
            } else {
                u0[i] = d;
                u1[i] = e;
                u2[i] = f;
                let m = if d == 0.0 { 0.0 } else { below / d };
                rhs[i + 1] -= m * rhs[i];
                d = next_d - m * e;
                e = next_e;
            }
            f = 0.0;
        }
        let floor = f64::EPSILON * self.bounds().1.abs().max(1.0);
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                v -= u2[i] * y[i + 2];
            }
            let p = if u0[i].abs() < floor { floor.copysign(u0[i]) } else { u0[i] };
            y[i] = v / p;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigenFailure("inverse iteration overflow".into()));
        }
        Ok(y)
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for j in [0, 1, 7, 49] {
            let exact = 2.0 - 2.0 * (PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((t.eigenvalue(j).unwrap() - exact).abs() < 1e-13);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), n);
    }

    #[test]
    fn eigenvector_is_a_sine() {
        let n = 40;
        let t = laplacian(n);
        let lambda = t.eigenvalue(2).unwrap();
        let v = t.eigenvector(lambda).unwrap();
        let mut s: Vec<f64> = (0..n).map(|i| (3.0 * PI * (i + 1) as f64 / (n + 1) as f64).sin()).collect();
        normalize(&mut s);
        let dot: f64 = v.iter().zip(&s).map(|(a, b)| a * b).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn count_matches_dense_diagonal() {
        let diag = vec![-3.0, -1.0, 0.5, 2.0, 7.0];
        let t = SymTridiagonal::new(diag, vec![0.0; 4]).unwrap();
        assert_eq!(t.count_below(0.0), 2);
        assert_eq!(t.count_below(-1.1), 1);
        assert_eq!(t.count_below(-0.9), 2);
        assert!((t.eigenvalue(3).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(laplacian(3).eigenvalue(3).is_err());
    }
}
