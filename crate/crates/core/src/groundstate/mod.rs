//! Solitary-wave profiles `φ_ω` of `-½Δφ - φ³ + φ⁵ + ωφ = 0`, the cubic
//! reference state `Q`, and constrained energy minimizers.

mod minimizer;
mod profile;
mod shooting;

pub use minimizer::{minimize_energy_from, minimize_energy_on_sphere, FlowParams, Minimizer};
pub use profile::{
    pohozaev_residuals, radial_integral, write_profile, Nonlinearity, ProfileMeta, RadialIntegrals,
    SolitonProfile,
};
pub use shooting::{cubic_ground_state, shoot_radial, ShootingParams};

use crate::error::{Error, Result};

/// Upper end of the existence window for `φ_ω`.
pub const OMEGA_MAX: f64 = 3.0 / 16.0;

/// `ω* = sup{ω > 0 : ω s²/2 - F(s) < 0 for some s}` with `F(s) = s⁴/4 - s⁶/6`.
///
/// Dividing by `s²/2` and writing `m = s²` turns the condition into
/// `ω < h(m) = m/2 - m²/3`; the supremum is the vertex of that parabola.
pub fn omega_star() -> f64 {
    let linear = 0.5;
    let quadratic = 1.0 / 3.0;
    let m_star = linear / (2.0 * quadratic);
    linear * m_star - quadratic * m_star * m_star
}

/// Closed-form 1D profile
/// `φ(x) = 2 √(ω / (1 + √(1 - 16ω/3) cosh(2x√(2ω))))`.
///
/// Accepts the closed interval `(0, 3/16]`; at `ω = 3/16` the formula
/// degenerates to the constant `√3/2`.
pub fn soliton_1d_closed_form(omega: f64, x: f64) -> Result<f64> {
    if !(omega > 0.0 && omega <= OMEGA_MAX) {
        return Err(Error::OmegaOutOfRange { omega, range: "(0, 3/16]" });
    }
    let b = (1.0 - 16.0 * omega / 3.0).max(0.0).sqrt();
    let c = 2.0 * (2.0 * omega).sqrt();
    let arg = c * x.abs();
    // cosh overflows long before the profile stops being representable.
    let denom = if arg > 700.0 { f64::INFINITY } else { 1.0 + b * arg.cosh() };
    Ok(2.0 * (omega / denom).sqrt())
}

/// Derivative of [`soliton_1d_closed_form`] in `x`.
pub fn soliton_1d_closed_form_derivative(omega: f64, x: f64) -> Result<f64> {
    let phi = soliton_1d_closed_form(omega, x)?;
    let b = (1.0 - 16.0 * omega / 3.0).max(0.0).sqrt();
    let c = 2.0 * (2.0 * omega).sqrt();
    let arg = c * x;
    if arg.abs() > 700.0 {
        return Ok(0.0);
    }
    let denom = 1.0 + b * arg.cosh();
    Ok(-0.5 * phi * b * c * arg.sinh() / denom)
}

/// Sup-norm bound `√((1 + √(1 - 4ω))/2)` on real bounded solutions.
pub fn linf_bound(omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega <= 0.25) {
        return Err(Error::OmegaOutOfRange { omega, range: "(0, 1/4]" });
    }
    Ok(((1.0 + (1.0 - 4.0 * omega).sqrt()) / 2.0).sqrt())
}

/// Height below which `ωφ - φ³ + φ⁵ > 0`, i.e. the profile would rise.
pub(crate) fn lower_turning_height(omega: f64) -> f64 {
    ((1.0 - (1.0 - 4.0 * omega).max(0.0).sqrt()) / 2.0).sqrt()
}

pub(crate) fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("dimension checked by callers"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-12 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn omega_star_is_three_sixteenths() {
        assert!((omega_star() - 0.1875).abs() < 1e-12);
        let h = |m: f64| m / 2.0 - m * m / 3.0;
        let m = golden_max(h, 0.0, 2.0);
        // The argmax of a smooth maximum is only located to about √ε.
        assert!((m - 0.75).abs() < 1e-6);
        assert!((m.sqrt() - 3f64.sqrt() / 2.0).abs() < 1e-6);
        assert!((h(0.75) - omega_star()).abs() < 1e-15);
    }

    #[test]
    fn omega_star_matches_brute_force_supremum() {
        // ω is admissible iff ω/2 s² - F(s) < 0 for some s on a dense scan.
        let admissible = |w: f64| {
            (1..20000).any(|i| {
                let s = i as f64 * 1e-4;
                w / 2.0 * s * s - (s.powi(4) / 4.0 - s.powi(6) / 6.0) < 0.0
            })
        };
        assert!(admissible(0.1874));
        assert!(!admissible(0.1876));
    }

    #[test]
    fn closed_form_values() {
        let v = soliton_1d_closed_form(0.1875, 0.0).unwrap();
        assert!((v - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let v = soliton_1d_closed_form(0.12, 0.0).unwrap();
        assert!((v - 2.0 * (0.12f64 / 1.6).sqrt()).abs() < 1e-15);
        assert!((v - 0.5477226).abs() < 1e-7);
        assert!(soliton_1d_closed_form(0.12, 1e4).unwrap() == 0.0);
        assert!(soliton_1d_closed_form(0.12, -60.0).unwrap() < 1e-12);
        for x in [0.3, 1.7, 9.0] {
            let a = soliton_1d_closed_form(0.05, x).unwrap();
            let b = soliton_1d_closed_form(0.05, -x).unwrap();
            assert_eq!(a, b);
            assert!(a < soliton_1d_closed_form(0.05, 0.0).unwrap());
        }
    }

    #[test]
    fn closed_form_rejects_outside_window() {
        for w in [0.0, -0.1, 0.19, 0.25] {
            assert!(matches!(soliton_1d_closed_form(w, 0.0), Err(Error::OmegaOutOfRange { .. })));
        }
    }

    #[test]
    fn closed_form_derivative_matches_finite_difference() {
        let w = 0.1;
        for x in [0.2, 1.0, 3.5, -2.0] {
            let h = 1e-5;
            let fd = (soliton_1d_closed_form(w, x + h).unwrap()
                - soliton_1d_closed_form(w, x - h).unwrap())
                / (2.0 * h);
            let an = soliton_1d_closed_form_derivative(w, x).unwrap();
            assert!((fd - an).abs() < 1e-9, "{x}: {fd} vs {an}");
        }
    }

    #[test]
    fn linf_bound_values() {
        assert!((linf_bound(0.1875).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let v = linf_bound(0.1).unwrap();
        assert!((v - ((1.0 + 0.6f64.sqrt()) / 2.0).sqrt()).abs() < 1e-15);
        assert!((v - 0.9420).abs() < 1e-4);
        assert!((linf_bound(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(linf_bound(0.26).is_err());
    }
}
