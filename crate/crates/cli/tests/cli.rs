use std::fs;
use std::process::{Command, Output};

fn djcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_djcm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const CONFIG: &str = r#"{
  "model": "one-atom",
  "params": {"omega0": 0, "omega_c": 0, "coupling": 1, "damping": DAMPING},
  "initial": {"c1": "sqrt(4/7)", "c2": "sqrt(3/7)", "theta": "0.5pi",
              "product": {"b1": "sqrt(3/7)", "b2": "sqrt(4/7)", "b1_phase": "0.5pi"}},
  "grid": {"t_end": 10, "n_points": 101},
  "observables": ["p_corr", "p_prod", "distance"]
}"#;

fn write_config(dir: &tempfile::TempDir, name: &str, damping: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, CONFIG.replace("DAMPING", damping)).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn list_shows_catalog() {
    let o = djcm(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn fig3b_csv_header() {
    let o = djcm(&["run", "fig3b", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_t,concurrence_theta1_0,concurrence_theta1_0.5pi,concurrence_theta1_pi,concurrence_theta1_1.5pi"
    );
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 15.0);
    assert!((last[3] - 0.523607).abs() < 1e-3);
    assert_eq!(text.lines().count(), 1502);
}

#[test]
fn unknown_scenario_is_a_validation_error() {
    let o = djcm(&["run", "nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nosuch"));
}

#[test]
fn bad_flags_are_validation_errors() {
    for args in [
        &["run", "fig1a", "--tol", "-1"][..],
        &["run", "fig1a", "--format", "xml"],
        &["run", "fig1a", "--grid-points", "1"],
        &["sweep", "--phase", "theta9", "--values", "0"],
        &["sweep", "--phase", "theta", "--values", "0,bogus"],
        &["run", "fig1a", "--no-such-flag"],
    ] {
        let o = djcm(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_run_to_file_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "custom.json", "1");
    let out = dir.path().join("out.json");
    let o = djcm(&["run", &cfg, "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let names: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "omega_t",
            "p_corr_run",
            "p_prod_run",
            "distance_run",
            "distance_gain_run",
            "bound_i_run",
            "bound_d0_plus_i_run",
            "backflow_run"
        ]
    );
    let bound = v["columns"][5]["values"][0].as_f64().unwrap();
    assert!((bound - 30.0 / 49.0).abs() < 1e-12);
}

#[test]
fn invalid_config_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "bad.json", "-1");
    let o = djcm(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.damping"), "{}", stderr(&o));
}

#[test]
fn numerical_failure_names_scenario_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stiff.json");
    fs::write(
        &path,
        r#"{"model": "two-atom",
            "params": {"omega0": 0, "omega_c": 0, "coupling": 1, "damping": 1e300},
            "initial": {"c1": "sqrt(1/2)", "c2": "sqrt(1/10)", "c3": "sqrt(4/10)"},
            "grid": {"t_end": 1, "n_points": 11},
            "observables": ["concurrence"]}"#,
    )
    .unwrap();
    let o = djcm(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("stiff") && err.contains("t = "), "{err}");
}

#[test]
fn sweep_columns_follow_values() {
    let o = djcm(&["sweep", "--phase", "theta1", "--values", "0,pi", "--grid-points", "51"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next().unwrap(), "omega_t,concurrence_theta1_0,concurrence_theta1_pi");

    let o = djcm(&["sweep", "--phase", "theta", "--values", "0.5pi,1.5pi", "--t-end", "5", "--grid-points", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("omega_t,pe_corr_theta_0.5pi,interference_theta_0.5pi,pe_corr_theta_1.5pi"));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn output_identical_across_execution_modes() {
    let a = djcm(&["run", "fig1c"]);
    let b = djcm(&["run", "fig1c", "--sequential"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selfcheck_passes() {
    let o = djcm(&["selfcheck"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9);
    assert!(text.contains("printed-sector-equations-leak-trace"));
}
