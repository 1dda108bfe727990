use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::distance::OrbitDistance;
use super::functionals::{virial_unchecked, Functionals};
use crate::error::{Error, Result};
use crate::evolve::{galilean_norm, Observer};
use crate::fields::ComplexField;

/// Column order of the diagnostics CSV.
pub const SERIES_HEADER: &str = "t,mass,px,py,pz,energy,virial,l4q,l6s,ju_norm,pconf,gn_ratio,mod_dist";

/// One sample; quantities that do not apply are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub energy: f64,
    pub virial: f64,
    /// `‖u‖⁴_{L⁴}`
    pub l4q: f64,
    /// `‖u‖⁶_{L⁶}`
    pub l6s: f64,
    pub ju_norm: f64,
    pub pconf: f64,
    pub gn_ratio: f64,
    pub mod_dist: f64,
}

impl DiagnosticsRow {
    fn columns(&self) -> [f64; 13] {
        [
            self.t,
            self.mass,
            self.px,
            self.py,
            self.pz,
            self.energy,
            self.virial,
            self.l4q,
            self.l6s,
            self.ju_norm,
            self.pconf,
            self.gn_ratio,
            self.mod_dist,
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    pub fn push(&mut self, row: DiagnosticsRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::InvalidArgument(format!("sample time {} does not follow {}", row.t, last.t)));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, pick: impl Fn(&DiagnosticsRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 + self.rows.len() * 13 * 26);
        out.push_str(SERIES_HEADER);
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.columns().iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Observer that appends a [`DiagnosticsRow`] per snapshot.
#[derive(Debug, Default)]
pub struct DiagnosticsRecorder {
    pub series: DiagnosticsSeries,
    /// Enables `gn_ratio` (planar fields).
    pub q_mass: Option<f64>,
    /// Enables `mod_dist`.
    pub orbit: Option<OrbitDistance>,
    /// Largest mass fraction seen outside the central half-box.
    pub max_edge_fraction: f64,
}

impl DiagnosticsRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_q_mass(mut self, q_mass: f64) -> Self {
        self.q_mass = Some(q_mass);
        self
    }

    pub fn with_orbit(mut self, orbit: OrbitDistance) -> Self {
        self.orbit = Some(orbit);
        self
    }

    pub fn row(&self, u: &ComplexField) -> Result<DiagnosticsRow> {
        let f = Functionals::of(u);
        let dim = u.grid().dim();
        let t = u.time();
        let ju = galilean_norm(u, t);
        let planar = dim == 2;
        let p = |a: usize| if a < dim { f.momentum[a] } else { f64::NAN };
        let gn = match self.q_mass {
            Some(q) if planar && f.mass > 0.0 && f.grad_sq > 0.0 => f.l4 * q / (f.mass * f.grad_sq),
            _ => f64::NAN,
        };
        let mod_dist = match &self.orbit {
            Some(o) => o.measure(u)?.distance,
            None => f64::NAN,
        };
        Ok(DiagnosticsRow {
            t,
            mass: f.mass,
            px: p(0),
            py: p(1),
            pz: p(2),
            energy: f.energy(),
            virial: virial_unchecked(u),
            l4q: f.l4,
            l6s: f.l6,
            ju_norm: ju,
            pconf: if planar { 0.5 * ju * ju - 0.5 * t * t * f.l4 + t * t / 3.0 * f.l6 } else { f64::NAN },
            gn_ratio: gn,
            mod_dist,
        })
    }
}

impl Observer for DiagnosticsRecorder {
    fn observe(&mut self, field: &ComplexField) -> Result<()> {
        let row = self.row(field)?;
        self.max_edge_fraction = self.max_edge_fraction.max(field.edge_mass_fraction());
        self.series.push(row)
    }
}
