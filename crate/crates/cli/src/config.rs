//! Resolution of INI files plus command-line overrides into a [`RunConfig`].

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use cqnls::evolve::EvolveConfig;
use cqnls::experiments::{InitialSpec, PerturbationSpec};
use cqnls::fields::UniformGrid;
use cqnls::groundstate::{ShootingParams, OMEGA_MAX};
use serde::{Deserialize, Serialize};

use crate::ini::{self, IniDoc};
use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Groundstate,
    Masscurve,
    Evolve,
    Stability,
    Scatter,
    Spectrum,
    Rho0,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Groundstate => "groundstate",
            Self::Masscurve => "masscurve",
            Self::Evolve => "evolve",
            Self::Stability => "stability",
            Self::Scatter => "scatter",
            Self::Spectrum => "spectrum",
            Self::Rho0 => "rho0",
        }
    }

    fn sections(self) -> &'static [&'static str] {
        match self {
            Self::Groundstate => &["shooting", "soliton"],
            Self::Masscurve | Self::Rho0 => &["shooting", "sweep"],
            Self::Spectrum => &["shooting", "soliton", "spectrum"],
            Self::Evolve => &["grid", "evolve", "initial"],
            Self::Stability => &["shooting", "soliton", "grid", "evolve", "perturbation"],
            Self::Scatter => &["grid", "evolve", "initial", "scatter"],
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as clap::ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonConfig {
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub extent: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveSection {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub dealias: bool,
    /// Seconds between checkpoints; 0 disables them.
    pub checkpoint_interval: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub delta: f64,
    pub k_cut: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterSection {
    pub cauchy_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSection {
    pub max_ell: usize,
    pub eigenvalues: usize,
    pub delta_r_max: f64,
    pub delta_samples: usize,
}

/// A fully resolved run. Only the sections the experiment reads are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub dim: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shooting: Option<ShootingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soliton: Option<SolitonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatter: Option<ScatterSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
}

impl RunConfig {
    pub fn uniform_grid(&self) -> Option<UniformGrid> {
        let g = self.grid?;
        UniformGrid::new(self.dim, g.extent, g.points).ok()
    }

    pub fn evolve_config(&self) -> Option<EvolveConfig> {
        let e = self.evolve?;
        Some(EvolveConfig { dt: e.dt, t_end: e.t_end, callback_stride: e.stride, dealias: e.dealias })
    }

    pub fn perturbation_spec(&self) -> Option<PerturbationSpec> {
        let p = self.perturbation?;
        Some(PerturbationSpec { delta: p.delta, seed: self.seed, k_cut: p.k_cut })
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Reads typed values and remembers which entries were consumed.
struct Reader<'a> {
    doc: &'a IniDoc,
    used: BTreeSet<(String, String)>,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, section: &str, key: &str) -> Option<(&'a str, usize)> {
        let slot = (section.to_string(), key.to_string());
        let entry = self.doc.entries.get(&slot)?;
        self.used.insert(slot);
        Some((entry.value.as_str(), entry.line))
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                ConfigError::parse(line, Some(&qualified(section, key)), format!("cannot parse `{v}`"))
            }),
        }
    }
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn require(ok: bool, key: &str, precondition: &str, value: impl std::fmt::Display) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Validation { key: key.into(), precondition: precondition.into(), value: value.to_string() })
    }
}

fn check_omega(key: &str, omega: f64) -> Result<(), ConfigError> {
    require(omega > 0.0 && omega < OMEGA_MAX, key, "0<ω<3/16", omega)
}

/// Per-dimension grid and time-step defaults for field experiments.
fn field_defaults(experiment: Experiment, dim: usize) -> (GridConfig, EvolveSection) {
    let evolve = |dt, t_end, stride| EvolveSection { dt, t_end, stride, dealias: false, checkpoint_interval: 0.0 };
    match (experiment, dim) {
        (Experiment::Scatter, _) => (GridConfig { extent: 100.0, points: 512 }, evolve(0.01, 16.0, 10)),
        (Experiment::Stability, 1) => (GridConfig { extent: 80.0, points: 512 }, evolve(0.01, 50.0, 100)),
        (Experiment::Stability, 2) => (GridConfig { extent: 64.0, points: 256 }, evolve(0.02, 30.0, 50)),
        (Experiment::Stability, _) => (GridConfig { extent: 96.0, points: 96 }, evolve(0.05, 30.0, 20)),
        (_, 1) => (GridConfig { extent: 80.0, points: 512 }, evolve(0.01, 10.0, 100)),
        (_, 2) => (GridConfig { extent: 64.0, points: 256 }, evolve(0.02, 10.0, 50)),
        _ => (GridConfig { extent: 64.0, points: 64 }, evolve(0.05, 10.0, 20)),
    }
}

/// Parses `text` (may be empty) for `experiment` and applies `overrides`.
pub fn resolve(experiment: Experiment, text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let doc = ini::parse(text)?;
    let mut rd = Reader { doc: &doc, used: BTreeSet::new() };

    if let Some((named, line)) = rd.raw("", "experiment") {
        let parsed: Experiment = named
            .parse()
            .map_err(|_| ConfigError::parse(line, Some("experiment"), format!("unknown experiment `{named}`")))?;
        require(parsed == experiment, "experiment", &format!("experiment = {}", experiment.name()), named)?;
    }
    let default_dim = match experiment {
        Experiment::Rho0 => 3,
        _ => 2,
    };
    let dim: usize = rd.get("", "dim", default_dim)?;
    require((1..=3).contains(&dim), "dim", "1 ≤ dim ≤ 3", dim)?;
    match experiment {
        Experiment::Scatter => require(dim == 2, "dim", "d = 2", dim)?,
        Experiment::Rho0 => require(dim == 3, "dim", "d = 3", dim)?,
        _ => {}
    }
    let seed: u64 = rd.get("", "seed", 0)?;
    let seed = overrides.seed.unwrap_or(seed);
    let file_dir: Option<String> = rd.raw("", "output_dir").map(|(v, _)| v.to_string());
    let output_dir = overrides
        .output_dir
        .clone()
        .or(file_dir.map(PathBuf::from))
        .ok_or_else(|| ConfigError::Validation {
            key: "output_dir".into(),
            precondition: "an output directory (config key or --out)".into(),
            value: "unset".into(),
        })?;

    let uses = |s: &str| experiment.sections().contains(&s);
    let mut config = RunConfig {
        experiment,
        dim,
        seed,
        output_dir,
        shooting: None,
        sweep: None,
        soliton: None,
        grid: None,
        evolve: None,
        perturbation: None,
        initial: None,
        scatter: None,
        spectrum: None,
    };

    if uses("shooting") {
        let d = ShootingParams::default();
        let s = ShootingParams {
            r_max: rd.get("shooting", "r_max", d.r_max)?,
            n: rd.get("shooting", "n", d.n)?,
            bisection_tol: rd.get("shooting", "bisection_tol", d.bisection_tol)?,
            max_bisections: rd.get("shooting", "max_bisections", d.max_bisections)?,
            blowup_factor: rd.get("shooting", "blowup_factor", d.blowup_factor)?,
            decay_threshold: rd.get("shooting", "decay_threshold", d.decay_threshold)?,
            substeps: rd.get("shooting", "substeps", d.substeps)?,
        };
        if let Err(e) = s.validate() {
            return Err(ConfigError::Validation {
                key: "shooting".into(),
                precondition: "positive extent, n ≥ 3, positive tolerances, blowup_factor > 1".into(),
                value: e.to_string(),
            });
        }
        config.shooting = Some(s);
    }
    if uses("sweep") {
        let s = SweepConfig {
            omega_min: rd.get("sweep", "omega_min", 0.005)?,
            omega_max: rd.get("sweep", "omega_max", 0.18)?,
            points: rd.get("sweep", "points", 24)?,
        };
        check_omega("sweep.omega_min", s.omega_min)?;
        check_omega("sweep.omega_max", s.omega_max)?;
        require(s.omega_max > s.omega_min, "sweep.omega_max", "omega_min < omega_max", s.omega_max)?;
        require(s.points >= 3, "sweep.points", "points ≥ 3", s.points)?;
        config.sweep = Some(s);
    }
    if uses("soliton") {
        let default = match experiment {
            Experiment::Stability if dim == 3 => 0.01,
            Experiment::Spectrum => 0.08,
            _ => 0.12,
        };
        let omega = rd.get("soliton", "omega", default)?;
        check_omega("soliton.omega", omega)?;
        config.soliton = Some(SolitonConfig { omega });
    }
    if uses("grid") {
        let (g, e) = field_defaults(experiment, dim);
        let grid = GridConfig { extent: rd.get("grid", "extent", g.extent)?, points: rd.get("grid", "points", g.points)? };
        if let Err(err) = UniformGrid::new(dim, grid.extent, grid.points) {
            return Err(ConfigError::Validation {
                key: "grid".into(),
                precondition: "extent > 0 and an even point count ≥ 4".into(),
                value: err.to_string(),
            });
        }
        config.grid = Some(grid);
        let ev = EvolveSection {
            dt: rd.get("evolve", "dt", e.dt)?,
            t_end: rd.get("evolve", "t_end", e.t_end)?,
            stride: rd.get("evolve", "stride", e.stride)?,
            dealias: rd.get("evolve", "dealias", e.dealias)?,
            checkpoint_interval: rd.get("evolve", "checkpoint_interval", e.checkpoint_interval)?,
        };
        require(ev.dt > 0.0 && ev.dt.is_finite(), "evolve.dt", "dt > 0", ev.dt)?;
        require(ev.t_end > 0.0 && ev.t_end.is_finite(), "evolve.t_end", "t_end > 0", ev.t_end)?;
        require(ev.stride >= 1, "evolve.stride", "stride ≥ 1", ev.stride)?;
        require(ev.checkpoint_interval >= 0.0, "evolve.checkpoint_interval", "interval ≥ 0", ev.checkpoint_interval)?;
        config.evolve = Some(ev);
        if let Err(err) = config.evolve_config().expect("just set").steps_from(0.0) {
            return Err(ConfigError::Validation {
                key: "evolve.t_end".into(),
                precondition: "t_end/dt an integer within rounding".into(),
                value: err.to_string(),
            });
        }
    }
    if uses("perturbation") {
        let p = PerturbationConfig {
            delta: rd.get("perturbation", "delta", 0.01)?,
            k_cut: rd.get("perturbation", "k_cut", 2.0)?,
        };
        require(p.delta >= 0.0 && p.delta.is_finite(), "perturbation.delta", "delta ≥ 0", p.delta)?;
        require(p.k_cut > 0.0, "perturbation.k_cut", "k_cut > 0", p.k_cut)?;
        config.perturbation = Some(p);
    }
    if uses("initial") {
        let kind: String = rd.get("initial", "kind", match experiment {
            Experiment::Scatter => "gaussian".to_string(),
            _ => "soliton".to_string(),
        })?;
        let initial = match kind.as_str() {
            "gaussian" => {
                let width = rd.get("initial", "width", 2.0)?;
                let mass_ratio = rd.get("initial", "mass_ratio", 1.0)?;
                require(width > 0.0, "initial.width", "width > 0", width)?;
                require(mass_ratio > 0.0, "initial.mass_ratio", "mass_ratio > 0", mass_ratio)?;
                InitialSpec::Gaussian { width, mass_ratio }
            }
            "soliton" => {
                let omega = rd.get("initial", "omega", 0.12)?;
                check_omega("initial.omega", omega)?;
                InitialSpec::Soliton { omega }
            }
            other => {
                return Err(ConfigError::Validation {
                    key: "initial.kind".into(),
                    precondition: "kind = gaussian | soliton".into(),
                    value: other.into(),
                })
            }
        };
        config.initial = Some(initial);
    }
    if uses("scatter") {
        let s = ScatterSection { cauchy_samples: rd.get("scatter", "cauchy_samples", 6)? };
        require(s.cauchy_samples >= 2, "scatter.cauchy_samples", "cauchy_samples ≥ 2", s.cauchy_samples)?;
        config.scatter = Some(s);
    }
    if uses("spectrum") {
        let s = SpectrumSection {
            max_ell: rd.get("spectrum", "max_ell", if dim == 1 { 1 } else { 2 })?,
            eigenvalues: rd.get("spectrum", "eigenvalues", 4)?,
            delta_r_max: rd.get("spectrum", "delta_r_max", 40.0)?,
            delta_samples: rd.get("spectrum", "delta_samples", 401)?,
        };
        require(dim > 1 || s.max_ell <= 1, "spectrum.max_ell", "max_ell ≤ 1 when d = 1", s.max_ell)?;
        require(s.eigenvalues >= 1, "spectrum.eigenvalues", "eigenvalues ≥ 1", s.eigenvalues)?;
        require(s.delta_r_max > 0.0, "spectrum.delta_r_max", "delta_r_max > 0", s.delta_r_max)?;
        require(s.delta_samples >= 8, "spectrum.delta_samples", "delta_samples ≥ 8", s.delta_samples)?;
        config.spectrum = Some(s);
    }

    if let Some(((section, key), entry)) = doc.entries.iter().find(|(slot, _)| !rd.used.contains(*slot)) {
        let message = if section.is_empty() || uses(section) {
            "unknown key".to_string()
        } else {
            format!("section [{section}] is not used by `{}`", experiment.name())
        };
        return Err(ConfigError::parse(entry.line, Some(&qualified(section, key)), message));
    }
    if let Some((section, line)) = doc.sections.iter().find(|(s, _)| !uses(s)) {
        return Err(ConfigError::parse(*line, None, format!("section [{section}] is not used by `{}`", experiment.name())));
    }
    Ok(config)
}
