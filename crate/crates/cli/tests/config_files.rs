mod common;

use std::process::Command;

use common::{bundled, config_path};
use driftless::Error;
use driftless_cli::config::ScheduleKindConfig;
use driftless_cli::{parse_config, EXIT_CONFIG};

fn write_config(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn bundled_admire() {
    let cfg = bundled("admire.json");
    let spec = cfg.problem_spec().unwrap();
    assert_eq!(spec.model.name(), "admire");
    assert_eq!(spec.t_star(), 10.0);
    assert_eq!(spec.x0.as_slice(), &[4.86, 1.23, 3.07]);
    assert_eq!(spec.xtg.as_slice(), &[0.0; 3]);
    assert_eq!(cfg.schedule.kind, ScheduleKindConfig::Harmonic);
}

#[test]
fn bundled_vdp() {
    let cfg = bundled("vdp.json");
    assert_eq!(cfg.model.params["mu"], 0.2);
    let spec = cfg.problem_spec().unwrap();
    assert_eq!(spec.t_star(), 7.0);
    assert_eq!(spec.x0.as_slice(), &[2.90, 0.17]);
}

#[test]
fn every_bundled_config_builds() {
    for name in ["admire.json", "admire_compare.json", "vdp.json", "wing_rock.json", "two_link.json"] {
        bundled(name).problem_spec().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let tl = bundled("two_link.json");
    for (k, v) in [("m1", 0.3), ("m2", 0.4), ("l1", 0.2), ("l2", 0.5)] {
        assert_eq!(tl.model.params[k], v);
    }
    assert_eq!(tl.t_star, Some(12.0));
}

#[test]
fn missing_x0_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, "{\n  \"model\": {\"name\": \"admire\"},\n  \"xtg\": [0, 0, 0],\n  \"t_star\": 10\n}\n");
    let err = parse_config(&p).unwrap_err();
    assert_eq!(err.field.as_deref(), Some("x0"));
    assert!(err.to_string().contains("x0"));
    assert!(err.line.is_some());
}

#[test]
fn dimension_mismatch_is_invalid_problem() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, r#"{"model": {"name": "vdp"}, "x0": [1, 2, 3], "xtg": [0, 0], "t_star": 7}"#);
    let cfg = parse_config(&p).unwrap();
    assert!(matches!(cfg.problem_spec(), Err(Error::InvalidProblem(_))));
}

#[test]
fn unknown_model_parameter_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        r#"{"model": {"name": "vdp", "params": {"nu": 1}}, "x0": [1, 2], "xtg": [0, 0], "t_star": 7}"#,
    );
    assert!(parse_config(&p).unwrap().problem_spec().is_err());
}

#[test]
fn binary_exit_codes_for_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_driftless");
    for body in [
        r#"{"model": {"name": "admire"}, "xtg": [0, 0, 0], "t_star": 10}"#,
        r#"{"model": {"name": "admire"}, "x0": [1], "xtg": [0, 0, 0], "t_star": 10}"#,
        r#"{"model": {"name": "glider"}, "x0": [1], "xtg": [0], "t_star": 10}"#,
        "{ not json",
    ] {
        let p = write_config(&dir, body);
        let out = Command::new(bin).arg("run").arg(&p).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(EXIT_CONFIG), "{body}");
    }
    let out = Command::new(bin).args(["feasibility", "/nonexistent/cfg.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn feasibility_verb_writes_only_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_driftless"))
        .arg("feasibility")
        .arg(config_path("admire.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, vec!["feasibility.txt"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("verdict = lower_only"));
}
