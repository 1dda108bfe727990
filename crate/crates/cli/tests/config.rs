use std::path::PathBuf;

use cqnls_cli::{resolve, ConfigError, Experiment, Overrides};

fn out() -> Overrides {
    Overrides { output_dir: Some(PathBuf::from("/tmp/unused")), seed: None }
}

#[test]
fn minimal_masscurve_gets_defaults() {
    let c = resolve(Experiment::Masscurve, "dim = 2\n", &out()).unwrap();
    let sweep = c.sweep.unwrap();
    assert_eq!(sweep.points, 24);
    assert_eq!((sweep.omega_min, sweep.omega_max), (0.005, 0.18));
    let s = c.shooting.unwrap();
    assert_eq!((s.r_max, s.n), (40.0, 4001));
    assert!(c.grid.is_none() && c.evolve.is_none());
    // The echoed form round-trips.
    let json = serde_json::to_string(&c).unwrap();
    assert_eq!(serde_json::from_str::<cqnls_cli::RunConfig>(&json).unwrap(), c);
}

#[test]
fn omega_outside_window_names_the_precondition() {
    let err = resolve(Experiment::Groundstate, "[soliton]\nomega = 0.2\n", &out()).unwrap_err();
    match &err {
        ConfigError::Validation { key, precondition, .. } => {
            assert_eq!(key, "soliton.omega");
            assert_eq!(precondition, "0<ω<3/16");
        }
        other => panic!("{other:?}"),
    }
    assert!(err.to_string().contains("0<ω<3/16"));
}

#[test]
fn parse_errors_carry_line_and_key() {
    let err = resolve(Experiment::Groundstate, "dim = 2\n[soliton]\nomega = 0.1\nomega = 0.1\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 4, ref key, .. } if key.as_deref() == Some("omega")));

    let err = resolve(Experiment::Groundstate, "[soliton]\nomgea = 0.1\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 2, ref key, .. } if key.as_deref() == Some("soliton.omgea")));

    let err = resolve(Experiment::Groundstate, "[grid]\npoints = 64\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");

    let err = resolve(Experiment::Groundstate, "[soliton]\nomega = fast\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
}

#[test]
fn experiment_specific_constraints() {
    let err = resolve(Experiment::Scatter, "dim = 3\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { ref precondition, .. } if precondition == "d = 2"));
    let err = resolve(Experiment::Rho0, "dim = 2\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { .. }));
    let err = resolve(Experiment::Masscurve, "experiment = rho0\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { ref key, .. } if key == "experiment"));
    let err = resolve(Experiment::Stability, "dim = 1\n[evolve]\ndt = 0.03\nt_end = 1\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { ref key, .. } if key == "evolve.t_end"), "{err}");
    let err = resolve(Experiment::Masscurve, "[sweep]\nomega_min = 0.1\nomega_max = 0.05\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { .. }));
    let err = resolve(Experiment::Evolve, "[initial]\nkind = sech\n", &out()).unwrap_err();
    assert!(matches!(err, ConfigError::Validation { ref key, .. } if key == "initial.kind"));
}

#[test]
fn overrides_win_and_output_dir_is_required() {
    let text = "seed = 5\noutput_dir = from_file\n";
    let c = resolve(Experiment::Stability, text, &Overrides::default()).unwrap();
    assert_eq!((c.seed, c.output_dir.to_str().unwrap()), (5, "from_file"));
    let o = Overrides { output_dir: Some("flag".into()), seed: Some(9) };
    let c = resolve(Experiment::Stability, text, &o).unwrap();
    assert_eq!((c.seed, c.output_dir.to_str().unwrap()), (9, "flag"));
    assert_eq!(c.perturbation_spec().unwrap().seed, 9);
    assert!(matches!(
        resolve(Experiment::Stability, "", &Overrides::default()),
        Err(ConfigError::Validation { ref key, .. }) if key == "output_dir"
    ));
}

#[test]
fn field_defaults_follow_dimension() {
    let c = resolve(Experiment::Stability, "dim = 3\n", &out()).unwrap();
    let g = c.grid.unwrap();
    assert_eq!((g.extent, g.points), (96.0, 96));
    assert_eq!(c.soliton.unwrap().omega, 0.01);
    assert_eq!(c.evolve.unwrap().t_end, 30.0);
    let c = resolve(Experiment::Stability, "dim = 1\n", &out()).unwrap();
    assert_eq!(c.evolve.unwrap().t_end, 50.0);
    assert_eq!(c.soliton.unwrap().omega, 0.12);
}
