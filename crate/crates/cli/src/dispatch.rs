//! Runs a resolved config and writes its run directory.

use std::fs;
use std::path::Path;
use std::time::Duration;

use cqnls::diagnostics::DiagnosticsRecorder;
use cqnls::evolve::{evolve, CheckpointObserver, Observer};
use cqnls::experiments::svg::{Axis, LineChart};
use cqnls::experiments::{
    asymptotic_slope_check, config_hash, initial_field, log_omega_grid, mass_curve, rho0_estimate, scattering_run,
    stability_run, write_run_dir, InitialSpec, MassCurve, RunReport, ScatteringConfig, ENERGY_DRIFT_TOL,
    MASS_DRIFT_TOL,
};
use cqnls::fields::io::write_field;
use cqnls::groundstate::{
    cubic_ground_state, linf_bound, pohozaev_residuals, shoot_radial, write_profile, ShootingParams, OMEGA_MAX,
};
use cqnls::spectral::{check_assumption, delta_ode, gss_verdict, spectral_report, DeltaConvention};
use cqnls::Error;

use crate::config::{Experiment, RunConfig};
use crate::CliError;

/// Profiles whose Pohozaev residuals exceed this are not trusted.
const POHOZAEV_TOL: f64 = 1e-6;
/// Relative error allowed in the small-frequency slope of the planar curve.
const SLOPE_CHECK_TOL: f64 = 0.05;
/// Half-width, relative to `ω`, of the local sweep behind a single verdict.
const LOCAL_SWEEP: f64 = 0.04;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Outputs were written but these flags are false.
    FlagsFailed(Vec<String>),
}

/// Creates the output directory (not its parents).
fn prepare_output(dir: &Path) -> Result<(), CliError> {
    if dir.is_dir() {
        return Ok(());
    }
    fs::create_dir(dir).map_err(|e| CliError::io(format!("cannot create output directory {}", dir.display()), e))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

pub fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let dir = config.output_dir.as_path();
    prepare_output(dir)?;
    let hash = config_hash(config)?;
    let mut report = match config.experiment {
        Experiment::Groundstate => groundstate(config, dir, &hash)?,
        Experiment::Masscurve => masscurve(config, dir, &hash)?,
        Experiment::Rho0 => rho0(config, dir, &hash)?,
        Experiment::Spectrum => spectrum(config, dir, &hash)?,
        Experiment::Evolve => evolve_run(config, dir, &hash)?,
        Experiment::Stability => stability(config, dir)?,
        Experiment::Scatter => scatter(config, dir)?,
    };
    report.labels.insert("run_config_hash".into(), hash);
    report.labels.insert("seed".into(), config.seed.to_string());
    write_run_dir(dir, config, &report)?;
    let failed: Vec<String> = report.flags.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.clone()).collect();
    Ok(if failed.is_empty() { Outcome::Success } else { Outcome::FlagsFailed(failed) })
}

fn shooting(config: &RunConfig) -> ShootingParams {
    config.shooting.unwrap_or_default()
}

fn soliton_omega(config: &RunConfig) -> f64 {
    config.soliton.expect("soliton section resolved").omega
}

fn groundstate(config: &RunConfig, dir: &Path, hash: &str) -> Result<RunReport, CliError> {
    let omega = soliton_omega(config);
    let profile = shoot_radial(omega, config.dim, &shooting(config))?;
    write_profile(&profile, dir, "profile")?;
    let mut r = RunReport::new("groundstate", hash.into());
    let (p1, p2) = pohozaev_residuals(&profile);
    r.fit("mass", profile.mass);
    r.fit("energy", profile.energy);
    r.fit("action", profile.action);
    r.fit("sup_norm", profile.sup_norm);
    r.fit("decay_rate", profile.decay_rate);
    r.fit("pohozaev_1", p1);
    r.fit("pohozaev_2", p2);
    r.flag("pohozaev", p1.abs() < POHOZAEV_TOL && p2.abs() < POHOZAEV_TOL);
    r.flag("linf_bound", profile.sup_norm <= linf_bound(omega)?);
    Ok(r)
}

fn sweep(config: &RunConfig) -> Result<MassCurve, CliError> {
    let s = config.sweep.expect("sweep section resolved");
    Ok(mass_curve(config.dim, &log_omega_grid(s.omega_min, s.omega_max, s.points), &shooting(config))?)
}

fn mass_chart(curve: &MassCurve) -> String {
    LineChart {
        title: format!("M(φ_ω), d = {}", curve.dim),
        x_label: "ω".into(),
        y_label: "mass".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series: vec![("M".into(), curve.omegas.iter().copied().zip(curve.masses.iter().copied()).collect())],
    }
    .to_svg()
}

fn masscurve(config: &RunConfig, dir: &Path, hash: &str) -> Result<RunReport, CliError> {
    let curve = sweep(config)?;
    write(dir, "masses.csv", &curve.to_csv())?;
    write(dir, "mass_curve.svg", &mass_chart(&curve))?;
    let mut r = RunReport::new("masscurve", hash.into());
    let solved = curve.masses.iter().filter(|m| m.is_finite()).count();
    r.fit("points", curve.omegas.len() as f64);
    r.fit("solved_points", solved as f64);
    r.flag("all_points_solved", solved == curve.omegas.len());
    for (w, note) in curve.omegas.iter().zip(&curve.notes) {
        if let Some(n) = note {
            r.notes.push(format!("ω = {w}: {n}"));
        }
    }
    match config.dim {
        2 => {
            let q = cubic_ground_state(2, &shooting(config))?;
            r.fit("q_mass", q.mass);
            r.flag("masses_exceed_q", curve.masses.iter().all(|m| *m > q.mass));
            match asymptotic_slope_check(&curve, &q) {
                Ok(err) => {
                    r.fit("slope_relative_error", err);
                    r.flag("asymptotic_slope", err < SLOPE_CHECK_TOL);
                }
                Err(Error::NotEnoughData(msg)) => r.notes.push(format!("slope check skipped: {msg}")),
                Err(e) => return Err(e.into()),
            }
            let ends = [curve.verdicts.first(), curve.verdicts.last()];
            r.flag("endpoint_verdicts_stable", ends.iter().all(|v| matches!(v, Some(Some(cqnls::spectral::Verdict::Stable)))));
        }
        3 => {
            let q = cubic_ground_state(3, &shooting(config))?;
            r.fit("q_mass", q.mass);
            if let (Some(w), Some(m)) = (curve.omegas.first(), curve.masses.first()) {
                r.fit("sqrt_omega_mass_over_q", w.sqrt() * m / q.mass);
            }
            add_rho0(&mut r, &curve)?;
        }
        _ => {}
    }
    Ok(r)
}

fn add_rho0(r: &mut RunReport, curve: &MassCurve) -> Result<(), CliError> {
    match rho0_estimate(curve) {
        Ok(est) => {
            r.fit("rho0", est.rho0);
            r.fit("omega_min", est.omega_min);
            r.fit("sampled_min", est.sampled_min);
            r.fit("weinstein_omega_min", est.weinstein_omega_min);
            r.flag("interior_minimum", true);
        }
        Err(Error::BoundaryMinimum { omega }) => {
            r.flag("interior_minimum", false);
            r.notes.push(format!("mass minimum on the sweep boundary at ω = {omega}; widen the sweep"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn rho0(config: &RunConfig, dir: &Path, hash: &str) -> Result<RunReport, CliError> {
    let curve = sweep(config)?;
    write(dir, "masses.csv", &curve.to_csv())?;
    write(dir, "mass_curve.svg", &mass_chart(&curve))?;
    let mut r = RunReport::new("rho0", hash.into());
    add_rho0(&mut r, &curve)?;
    Ok(r)
}

fn spectrum(config: &RunConfig, dir: &Path, hash: &str) -> Result<RunReport, CliError> {
    let params = shooting(config);
    let sp = config.spectrum.expect("spectrum section resolved");
    let omega = soliton_omega(config);
    let profile = shoot_radial(omega, config.dim, &params)?;
    let report = spectral_report(&profile, sp.max_ell, sp.eigenvalues)?;

    let mut csv = String::from("kind,ell,index,eigenvalue\n");
    for s in &report.sectors {
        for (i, e) in s.eigenvalues.iter().enumerate() {
            csv.push_str(&format!("{:?},{},{i},{e:.16e}\n", s.kind, s.ell));
        }
    }
    write(dir, "spectrum.csv", &csv)?;

    let mut r = RunReport::new("spectrum", hash.into());
    let mut delta_csv = String::from("convention,r,delta\n");
    for conv in DeltaConvention::ALL {
        let traj = delta_ode(&profile, conv, sp.delta_r_max, sp.delta_samples)?;
        let name = match conv {
            DeltaConvention::Cited => "cited",
            DeltaConvention::RadialLaplacian => "radial_laplacian",
        };
        for (x, d) in traj.r.iter().zip(&traj.delta) {
            delta_csv.push_str(&format!("{name},{x:.16e},{d:.16e}\n"));
        }
        r.labels.insert(format!("delta_{name}_diverges_negative"), traj.diverges_negative.to_string());
        r.fit(&format!("delta_{name}_sign_change"), traj.sign_change.unwrap_or(f64::NAN));
    }
    write(dir, "delta.csv", &delta_csv)?;

    for s in &report.sectors {
        let key = format!("{:?}_l{}", s.kind, s.ell);
        r.fit(&format!("{key}_lowest"), s.eigenvalues.first().copied().unwrap_or(f64::NAN));
        r.fit(&format!("{key}_negative_count"), s.negative_count as f64);
        if let Some(res) = s.kernel_residual {
            r.fit(&format!("{key}_kernel_residual"), res);
        }
    }
    let check = check_assumption(&report);
    r.flag("assumption", check.passed);
    r.notes.extend(check.failures);

    // Slope from a local sweep; its spectral checks are the report above.
    let lo = omega * (1.0 - LOCAL_SWEEP);
    let hi = (omega * (1.0 + LOCAL_SWEEP)).min(0.5 * (omega + OMEGA_MAX));
    let omegas = vec![lo, omega, hi];
    let masses = omegas
        .iter()
        .map(|&w| if w == omega { Ok(profile.mass) } else { shoot_radial(w, config.dim, &params).map(|p| p.mass) })
        .collect::<cqnls::Result<Vec<f64>>>()?;
    let n = omegas.len();
    let curve = MassCurve {
        dim: config.dim,
        omegas,
        masses,
        slopes: vec![f64::NAN; n],
        verdicts: vec![None; n],
        weinstein: vec![f64::NAN; n],
        notes: vec![None; n],
    };
    match gss_verdict(&curve, omega, &report) {
        Ok(v) => {
            r.labels.insert("verdict".into(), v.as_str().into());
        }
        Err(e @ Error::AssumptionViolated { .. }) => r.notes.push(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    r.fit("slope", cqnls::spectral::slope_at(&curve, omega)?);
    Ok(r)
}

fn evolve_run(config: &RunConfig, dir: &Path, hash: &str) -> Result<RunReport, CliError> {
    let grid = config.uniform_grid().expect("grid section resolved");
    let ev = config.evolve_config().expect("evolve section resolved");
    let spec = config.initial.expect("initial section resolved");
    let q_mass = match (spec, config.dim) {
        (InitialSpec::Gaussian { .. }, _) | (_, 2) => Some(cubic_ground_state(config.dim, &ShootingParams::default())?.mass),
        _ => None,
    };
    let u0 = initial_field(&spec, grid, q_mass.unwrap_or(f64::NAN))?;
    let mut recorder = DiagnosticsRecorder::new();
    if let (Some(q), 2) = (q_mass, config.dim) {
        recorder = recorder.with_q_mass(q);
    }
    let interval = config.evolve.map_or(0.0, |e| e.checkpoint_interval);
    let mut checkpoints = if interval > 0.0 {
        let cdir = dir.join("checkpoints");
        prepare_output(&cdir)?;
        Some(CheckpointObserver::new(&cdir, ev, Duration::from_secs_f64(interval)))
    } else {
        None
    };
    let traj = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut recorder];
        if let Some(c) = checkpoints.as_mut() {
            observers.push(c);
        }
        evolve(&u0, &ev, &mut observers)?
    };
    write_field(&traj.final_field, &dir.join("final.bin"))?;

    let mut r = RunReport::new("evolve", hash.into());
    let series = recorder.series;
    let m = series.column(|row| row.mass);
    let e = series.column(|row| row.energy);
    let kinetic = 0.5 * cqnls::diagnostics::Functionals::of(&u0).grad_sq;
    let drift = |v: &[f64], scale: f64| v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max) / scale;
    let (dm, de) = (drift(&m, m[0]), drift(&e, kinetic));
    r.fit("mass_drift", dm);
    r.fit("energy_drift", de);
    r.fit("max_edge_fraction", recorder.max_edge_fraction);
    r.flag("mass_conserved", dm < MASS_DRIFT_TOL);
    r.flag("energy_conserved", de < ENERGY_DRIFT_TOL);
    if let Some(c) = checkpoints {
        r.fit("checkpoints", c.written.len() as f64);
    }
    r.series = series;
    Ok(r)
}

fn stability(config: &RunConfig, dir: &Path) -> Result<RunReport, CliError> {
    let profile = shoot_radial(soliton_omega(config), config.dim, &shooting(config))?;
    let grid = config.uniform_grid().expect("grid section resolved");
    let spec = config.perturbation_spec().expect("perturbation section resolved");
    let report = stability_run(&profile, &spec, grid, &config.evolve_config().expect("evolve section resolved"))?;
    let chart = LineChart {
        title: format!("modulated distance, d = {}, ω = {}", config.dim, profile.omega),
        x_label: "t".into(),
        y_label: "distance".into(),
        series: vec![("mod_dist".into(), report.series.rows.iter().map(|row| (row.t, row.mod_dist)).collect())],
        ..LineChart::default()
    };
    write(dir, "mod_dist.svg", &chart.to_svg())?;
    Ok(report)
}

fn scatter(config: &RunConfig, dir: &Path) -> Result<RunReport, CliError> {
    let q = cubic_ground_state(2, &ShootingParams::default())?;
    let sc = ScatteringConfig {
        initial: config.initial.expect("initial section resolved"),
        grid: config.uniform_grid().expect("grid section resolved"),
        evolve: config.evolve_config().expect("evolve section resolved"),
        cauchy_samples: config.scatter.expect("scatter section resolved").cauchy_samples,
        q_mass: q.mass,
    };
    let report = scattering_run(&sc)?;
    let chart = LineChart {
        title: "L⁶ decay".into(),
        x_label: "t".into(),
        y_label: "‖u‖⁶_{L⁶}".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series: vec![("l6s".into(), report.series.rows.iter().map(|row| (row.t, row.l6s)).collect())],
    };
    write(dir, "l6_decay.svg", &chart.to_svg())?;
    Ok(report)
}
