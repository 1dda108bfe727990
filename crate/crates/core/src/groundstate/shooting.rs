//! Bisection shooting on the radial profile equation
//!
//! `φ'' + (d-1)/r φ' = 2(ωφ - φ³ + qφ⁵)`, `φ(0) = a`, `φ'(0) = 0`.
//!
//! Read as a particle rolling in the potential `-(ωφ² - φ⁴/2 + qφ⁶/3)`
//! with friction `(d-1)/r`, an initial height above the ground state
//! overshoots and crosses zero, while a height below it runs out of energy
//! and turns back up. Bisection on `a` between the two outcomes converges to
//! the decaying solution.
//!
//! As `ω → 3/16` the ground state develops a plateau just below the upper
//! turning height `c = linf_bound(ω)`, and `c - a` becomes far smaller than
//! the spacing of doubles near `c`. The equation is therefore integrated for
//! the deviation `ψ = c - φ`, with the nonlinearity expanded about `c` so
//! that no cancellation occurs, and the bisection runs on `ψ(0)`.

use serde::{Deserialize, Serialize};

use super::profile::{linear_tail, tail_ratio, Nonlinearity, SolitonProfile};
use super::{linf_bound, lower_turning_height, OMEGA_MAX};
use crate::error::{Error, Result};
use crate::fields::RadialGrid;
use crate::ode::Dopri;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootingParams {
    /// Minimum radial extent; the solver extends the grid as far as the
    /// exponential tail requires.
    pub r_max: f64,
    /// Node count on `[0, r_max]`, fixing the spacing `r_max / (n - 1)`.
    pub n: usize,
    /// Bracket width on `φ(0)` (relative to the distance from the upper
    /// turning height when that is smaller) at which bisection stops.
    pub bisection_tol: f64,
    pub max_bisections: usize,
    /// Trajectories above `blowup_factor × linf_bound(ω)` count as too low.
    pub blowup_factor: f64,
    /// Height, relative to its starting value, below which a
    /// still-decreasing trajectory is accepted as decayed. Deciding the
    /// direction of a bracket that is adjacent in floating point takes a
    /// decay of about `√ε`, so this must sit well below `1e-8`.
    pub decay_threshold: f64,
    /// Fixed Runge–Kutta steps per grid node.
    pub substeps: usize,
}

impl Default for ShootingParams {
    fn default() -> Self {
        Self {
            r_max: 40.0,
            n: 4001,
            bisection_tol: 1e-14,
            max_bisections: 200,
            blowup_factor: 2.0,
            decay_threshold: 1e-12,
            substeps: 2,
        }
    }
}

impl ShootingParams {
    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r_max > 0.0
            && self.n >= 3
            && self.bisection_tol > 0.0
            && self.max_bisections > 0
            && self.blowup_factor > 1.0
            && self.decay_threshold > 0.0
            && self.substeps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid shooting parameters {self:?}")))
        }
    }
}

/// Relative height at which the integrated profile hands over to the tail.
const SPLICE_LEVEL: f64 = 1e-4;
/// Relative separation of the bracketing trajectories that triggers a
/// re-bisection.
const RESTART_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    TooHigh,
    TooLow,
    Decayed,
    Undecided,
}

/// One way of writing the profile equation: the unknown is `ψ` with
/// `φ = c + σψ`.
#[derive(Debug, Clone, Copy)]
struct Form {
    center: f64,
    sign: f64,
    /// Taylor coefficients of `2σ f(c + σψ)` in `ψ`, degree 1..=5; the
    /// constant term vanishes because `c` is a zero of `f`.
    coeffs: [f64; 5],
}

impl Form {
    fn new(omega: f64, quintic: f64, center: f64, sign: f64) -> Self {
        let c = center;
        // f(φ) = ωφ - φ³ + qφ⁵ and its scaled derivatives f⁽ᵏ⁾(c)/k!.
        let derivs = [
            omega - 3.0 * c * c + 5.0 * quintic * c.powi(4),
            -3.0 * c + 10.0 * quintic * c.powi(3),
            -1.0 + 10.0 * quintic * c * c,
            5.0 * quintic * c,
            quintic,
        ];
        let mut coeffs = [0.0; 5];
        let mut s = sign;
        for (k, d) in derivs.iter().enumerate() {
            s *= sign;
            coeffs[k] = 2.0 * s * d;
        }
        Self { center, sign, coeffs }
    }

    fn phi(&self, y: &[f64; 2]) -> [f64; 2] {
        [self.center + self.sign * y[0], self.sign * y[1]]
    }

    fn from_phi(&self, p: &[f64; 2]) -> [f64; 2] {
        [self.sign * (p[0] - self.center), self.sign * p[1]]
    }
}

type Rhs = Box<dyn Fn(f64, &[f64; 2]) -> [f64; 2]>;

/// A trajectory in the deviation form near the plateau and in the direct
/// form once `φ` has dropped below half the center.
struct Trajectory {
    ode: Dopri<2, Rhs>,
    direct: bool,
}

/// The profile equation written about the upper turning height (for
/// the plateau) and about zero (for the tail).
struct Problem {
    dim: usize,
    deviation: Form,
    direct: Form,
    blowup: f64,
    decay_threshold: f64,
    spacing: f64,
    substeps: usize,
    step: f64,
    r_limit: f64,
}

impl Problem {
    fn rhs(&self, form: Form) -> Rhs {
        let dim = self.dim as f64;
        Box::new(move |r, y| {
            let p = y[0];
            let c = &form.coeffs;
            let force = p * (c[0] + p * (c[1] + p * (c[2] + p * (c[3] + p * c[4]))));
            let acc = if r == 0.0 {
                // (d-1)/r ψ' → (d-1) ψ''(0) at the origin.
                force / dim
            } else {
                force - (dim - 1.0) / r * y[1]
            };
            [y[1], acc]
        })
    }

    fn form(&self, direct: bool) -> Form {
        if direct {
            self.direct
        } else {
            self.deviation
        }
    }

    fn start(&self, node: usize, y0: [f64; 2], direct: bool) -> Trajectory {
        let ode = Dopri::new(self.rhs(self.form(direct)), node as f64 * self.spacing, y0, self.step, 0.0, 0.0);
        Trajectory { ode, direct }
    }

    fn phi(&self, t: &Trajectory) -> [f64; 2] {
        self.form(t.direct).phi(&t.ode.y)
    }

    /// Advances one node, i.e. `substeps` fixed steps, switching to the
    /// direct form when due.
    fn advance(&self, t: &mut Trajectory, node: usize) {
        for _ in 0..self.substeps {
            t.ode.step_fixed(self.step);
        }
        t.ode.t = node as f64 * self.spacing;
        if !t.direct {
            let p = self.phi(t);
            if p[0] < 0.5 * self.deviation.center {
                *t = self.start(node, p, true);
            }
        }
    }

    fn classify(&self, node: usize, y0: [f64; 2], direct: bool) -> Outcome {
        let mut t = self.start(node, y0, direct);
        let floor = self.decay_threshold * self.phi(&t)[0].abs();
        let mut j = node;
        loop {
            j += 1;
            self.advance(&mut t, j);
            let [p, dp] = self.phi(&t);
            if !(p.is_finite() && dp.is_finite()) {
                return Outcome::TooLow;
            }
            if p < 0.0 {
                return Outcome::TooHigh;
            }
            if dp > 0.0 || p > self.blowup {
                return Outcome::TooLow;
            }
            if p < floor {
                return Outcome::Decayed;
            }
            if t.ode.t >= self.r_limit {
                return Outcome::Undecided;
            }
        }
    }

    /// Whether `ψ(0) = x` gives an initial height above the profile's.
    fn too_high(&self, x: f64) -> Option<bool> {
        match self.classify(0, [x, 0.0], false) {
            Outcome::TooHigh => Some(true),
            Outcome::TooLow => Some(false),
            Outcome::Decayed | Outcome::Undecided => None,
        }
    }

    /// Bisects along the segment joining the states of `low` and `high` at
    /// `node` until they are adjacent in floating point, and restarts both.
    fn rebisect(&self, node: usize, low: &Trajectory, high: &Trajectory, max: usize) -> (Trajectory, Trajectory) {
        let direct = low.direct || high.direct;
        let form = self.form(direct);
        let mut y_low = form.from_phi(&self.phi(low));
        let mut y_high = form.from_phi(&self.phi(high));
        if !low.direct && !high.direct {
            y_low = low.ode.y;
            y_high = high.ode.y;
        }
        for _ in 0..max {
            let mid = [0.5 * (y_low[0] + y_high[0]), 0.5 * (y_low[1] + y_high[1])];
            if mid == y_low || mid == y_high {
                break;
            }
            match self.classify(node, mid, direct) {
                Outcome::TooHigh => y_high = mid,
                Outcome::TooLow => y_low = mid,
                Outcome::Decayed | Outcome::Undecided => {
                    y_low = mid;
                    y_high = mid;
                    break;
                }
            }
        }
        (self.start(node, y_low, direct), self.start(node, y_high, direct))
    }
}

/// Bisection on `x = ψ(0) ∈ (lo, hi)`, geometric while the bracket spans
/// more than a factor of two. Returns `(x_low, x_high)`: the states whose
/// initial heights are too low and too high respectively.
fn bisect_origin(problem: &Problem, bracket: (f64, f64), params: &ShootingParams) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = bracket;
    // Orientation: which end of the bracket starts too high.
    let lo_is_high = problem.deviation.sign < 0.0;
    let mut moved = (false, false);
    for _ in 0..params.max_bisections {
        if hi - lo <= params.bisection_tol * hi.min(1.0) {
            break;
        }
        let mid = if hi > 2.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        match problem.too_high(mid) {
            Some(high) => {
                if high == lo_is_high {
                    lo = mid;
                    moved.0 = true;
                } else {
                    hi = mid;
                    moved.1 = true;
                }
            }
            None => {
                lo = mid;
                hi = mid;
                moved = (true, true);
                break;
            }
        }
    }
    if hi - lo > params.bisection_tol * hi.min(1.0) && lo < hi && 0.5 * (lo + hi) > lo && 0.5 * (lo + hi) < hi {
        return Err(Error::ConvergenceFailure(format!(
            "bisection bracket [{lo:e}, {hi:e}] not resolved after {} steps",
            params.max_bisections
        )));
    }
    if !(moved.0 && moved.1) {
        return Err(Error::ConvergenceFailure(format!(
            "bisection never left the initial bracket [{:e}, {:e}]",
            bracket.0, bracket.1
        )));
    }
    Ok(if lo_is_high { (hi, lo) } else { (lo, hi) })
}

fn solve(
    omega: f64,
    dim: usize,
    nonlinearity: Nonlinearity,
    center: f64,
    sign: f64,
    bracket: (f64, f64),
    blowup: f64,
    params: &ShootingParams,
) -> Result<SolitonProfile> {
    params.validate()?;
    let kappa = (2.0 * omega).sqrt();
    let q = nonlinearity.quintic_coefficient();
    let deviation = Form::new(omega, q, center, sign);
    let problem = Problem {
        dim,
        deviation,
        direct: Form::new(omega, q, 0.0, 1.0),
        blowup,
        decay_threshold: params.decay_threshold,
        spacing: params.spacing(),
        substeps: params.substeps,
        step: params.spacing() / params.substeps as f64,
        r_limit: 4.0 * (params.r_max + 60.0 / kappa),
    };

    let (x_low, x_high) = bisect_origin(&problem, bracket, params)?;
    let height = deviation.phi(&[0.5 * (x_low + x_high), 0.0])[0];

    // Trace both bracketing trajectories node by node. Wherever they start
    // to separate, the bracket is re-bisected along the segment joining
    // their current states; this recovers the precision that a long unstable
    // stretch (the plateau near ω = 3/16) amplifies away. Integration error
    // is amplified like the growing tail mode, so the trajectory is trusted
    // only until the profile has decayed by `SPLICE_LEVEL`; from there on the
    // decaying solution of the linearized equation continues it.
    let h = params.spacing();
    let mut low = problem.start(0, [x_low, 0.0], false);
    let mut high = problem.start(0, [x_high, 0.0], false);
    let mut values = vec![height];
    let mut derivative = vec![0.0];
    loop {
        let node = values.len();
        if node as f64 * h > problem.r_limit {
            break;
        }
        problem.advance(&mut low, node);
        problem.advance(&mut high, node);
        let (pl, ph) = (problem.phi(&low), problem.phi(&high));
        if (ph[0] - pl[0]).abs() > RESTART_GAP * 0.5 * (pl[0] + ph[0]).abs() {
            (low, high) = problem.rebisect(node, &low, &high, params.max_bisections);
        }
        let (pl, ph) = (problem.phi(&low), problem.phi(&high));
        let mean = 0.5 * (pl[0] + ph[0]);
        if ph[0] < 0.0 || pl[1] > 0.0 || (ph[0] - pl[0]).abs() > 1e-6 * mean {
            break;
        }
        values.push(mean);
        derivative.push(0.5 * (pl[1] + ph[1]));
        if mean < SPLICE_LEVEL * values[0] {
            break;
        }
    }
    if values.len() < 16 {
        return Err(Error::ConvergenceFailure(format!(
            "profile resolved on only {} nodes",
            values.len()
        )));
    }

    let splice = values.len() - 1;
    let r_splice = splice as f64 * h;
    let d = dim as f64;
    let window = (4.0 / kappa).min(0.5 * r_splice);
    let first = ((r_splice - window) / h).ceil().max(1.0) as usize;
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (jj, v) in values.iter().enumerate().take(splice + 1).skip(first) {
        let r = jj as f64 * h;
        let y = (v * r.powf(0.5 * (d - 1.0))).ln();
        sx += r;
        sy += y;
        sxx += r * r;
        sxy += r * y;
        count += 1.0;
    }
    let decay_rate = -(count * sxy - sx * sy) / (count * sxx - sx * sx);
    if !(decay_rate.is_finite() && decay_rate > 0.0) {
        return Err(Error::ConvergenceFailure(format!("tail fit produced decay rate {decay_rate}")));
    }

    let tail_len = 14.0 * std::f64::consts::LN_10 / kappa;
    let grid = RadialGrid::with_spacing(h, params.r_max.max(r_splice + tail_len))?;
    let phi_s = values[splice];
    for jj in splice + 1..grid.len() {
        let r = jj as f64 * h;
        let v = phi_s * tail_ratio(dim, kappa, r_splice, r);
        values.push(v);
        derivative.push(v * linear_tail(dim, kappa, r).1);
    }
    Ok(SolitonProfile::assemble(
        omega,
        dim,
        nonlinearity,
        grid,
        values,
        derivative,
        r_splice,
        decay_rate,
    ))
}

/// The positive radial decaying solution of `-½Δφ - φ³ + φ⁵ + ωφ = 0`.
pub fn shoot_radial(omega: f64, dim: usize, params: &ShootingParams) -> Result<SolitonProfile> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    if !(omega > 0.0 && omega < OMEGA_MAX) {
        return Err(Error::NoSoliton { omega });
    }
    let top = linf_bound(omega)?;
    // Admissible heights lie in (lower root of ω - a² + a⁴, top); the 1e-6
    // floor keeps the bracket well defined.
    let floor = 1e-6f64.min(lower_turning_height(omega));
    solve(
        omega,
        dim,
        Nonlinearity::CubicQuintic,
        top,
        -1.0,
        (f64::MIN_POSITIVE, top - floor),
        params.blowup_factor * top,
        params,
    )
}

/// The cubic ground state `-½ΔQ + Q - Q³ = 0`, stored with `omega = 1`.
pub fn cubic_ground_state(dim: usize, params: &ShootingParams) -> Result<SolitonProfile> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    let top = 10.0;
    solve(1.0, dim, Nonlinearity::Cubic, 0.0, 1.0, (1e-6, top), params.blowup_factor * top, params)
}
