//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-in-form
//! systems `y' = f(t, y)`.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct Dopri<const N: usize, F> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    rtol: f64,
    atol: f64,
    h_max: f64,
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> Dopri<N, F> {
    pub fn new(f: F, t0: f64, y0: [f64; N], h0: f64, rtol: f64, atol: f64) -> Self {
        Self { f, t: t0, y: y0, h: h0, rtol, atol, h_max: f64::INFINITY }
    }

    pub fn with_max_step(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Attempts one step of size `h`; returns the candidate and its scaled error.
    fn trial(&self, h: f64) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; 7];
        k[0] = (self.f)(self.t, &self.y);
        for s in 1..7 {
            let mut ys = self.y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                *yi += h * acc;
            }
            k[s] = (self.f)(self.t + C[s] * h, &ys);
        }
        let mut y5 = self.y;
        let mut err = 0.0;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = self.atol + self.rtol * self.y[i].abs().max(y5[i].abs());
            let e = h * (d5 - d4) / scale;
            err += e * e;
        }
        (y5, (err / N as f64).sqrt())
    }

    /// Takes one accepted step, never passing `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<()> {
        loop {
            let remaining = t_stop - self.t;
            let natural = self.h.min(self.h_max);
            // Absorb a sliver that would otherwise be left for a separate step.
            let h = if remaining <= natural * (1.0 + 1e-9) { remaining } else { natural };
            if !(h > 1e-14 * (1.0 + self.t.abs())) {
                return Err(Error::ConvergenceFailure(format!(
                    "step size collapsed at t = {}",
                    self.t
                )));
            }
            let (y_new, err) = self.trial(h);
            let finite = y_new.iter().all(|v| v.is_finite());
            if finite && err <= 1.0 {
                self.t = if h == remaining { t_stop } else { self.t + h };
                self.y = y_new;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A step clipped by `t_stop` says little about the natural size.
                self.h = if h < natural && factor >= 1.0 { natural } else { h * factor };
                return Ok(());
            }
            let shrink = if finite { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            self.h = h * shrink;
        }
    }

    /// Takes one step of exactly `h` without error control, so that the map
    /// from initial data to the result is smooth.
    pub fn step_fixed(&mut self, h: f64) {
        let (y, _) = self.trial(h);
        self.y = y;
        self.t += h;
    }

    /// Integrates to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        if t_target - self.t <= 1e-13 * (1.0 + t_target.abs()) {
            self.t = self.t.max(t_target);
            return Ok(());
        }
        while self.t < t_target {
            self.step(t_target)?;
        }
        Ok(())
    }
}
