use std::path::PathBuf;
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn mechcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mechcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    scenarios().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_prints_outcome_and_wtp() {
    let o = mechcheck(&["run", &scenario("worked.json")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("chosen:    b"), "{s}");
    assert!(s.contains("wtp"));
}

#[test]
fn run_machine_format_reports_payments() {
    let o = mechcheck(&["run", &scenario("worked.json"), "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"]["chosen"], 1);
    assert_eq!(v["outcome"]["payments"][1], "0x1p+1 (2)");
}

#[test]
fn check_exit_codes() {
    assert_eq!(mechcheck(&["check", &scenario("parallel_suite.json")]).status.code(), Some(0));
    assert_eq!(mechcheck(&["check", &scenario("pareto.json")]).status.code(), Some(1));
    assert_eq!(mechcheck(&["check", &scenario("onto_unhit.json")]).status.code(), Some(2));
    assert_eq!(mechcheck(&["check", &scenario("manifest.json")]).status.code(), Some(0));
}

#[test]
fn pareto_counterexample_names_the_dominating_pair() {
    let o = mechcheck(&["check", &scenario("pareto.json"), "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cx = &v["checks"][0]["counterexample"];
    assert_eq!(cx["dominating"], 0);
    assert_eq!(cx["payments"][0], "0x1p+3 (8)");
}

#[test]
fn machine_reports_are_byte_identical() {
    let args = ["check", &scenario("parallel_suite.json"), "--format", "machine", "--seed", "9"];
    let a = mechcheck(&args);
    let b = mechcheck(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = mechcheck(&["check", &scenario("parallel_suite.json"), "--format", "machine", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn malformed_file_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"profile\": [\n}").unwrap();
    let o = mechcheck(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn missing_seed_for_sampled_check_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let text = std::fs::read_to_string(scenarios().join("worked.json"))
        .unwrap()
        .replace("\"checks\": []", "\"checks\": [{\"property\": \"onto\"}]");
    std::fs::write(&p, text).unwrap();
    assert_eq!(mechcheck(&["check", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn witness_default_sweep() {
    let o = mechcheck(&["witness", &scenario("witness_default.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("refuted: 100%, survivors: 0"), "{}", stdout(&o));
}

#[test]
fn witness_control() {
    let o = mechcheck(&["witness", &scenario("witness_control.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "dictatorship control: all checks pass\n");
}

#[test]
fn witness_empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.json");
    std::fs::write(&p, "").unwrap();
    assert_eq!(mechcheck(&["witness", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(mechcheck(&["witness"]).status.code(), Some(2));
}

#[test]
fn witness_emits_replayable_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("w.json");
    std::fs::write(&cfg, r#"{"grid": {"lo": 1, "hi": 1.25, "step": 0.25}, "slope_pairs": []}"#).unwrap();
    let out = dir.path().join("out");
    let o = mechcheck(&["witness", cfg.to_str().unwrap(), "--emit-profile", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(out.join("refutation-000.json")).unwrap();
    let r: mechcheck::witness::RefutationReport = serde_json::from_str(&report).unwrap();
    assert!(r.refuted());
    assert!(r.replay().unwrap().unwrap() >= r.slack - 1e-9);
    let profile = std::fs::read_to_string(out.join("refutation-001-profile-0.json")).unwrap();
    let p: mechcheck::TypeProfile = serde_json::from_str(&profile).unwrap();
    assert_eq!(p.num_agents(), 2);
}

#[test]
fn sample_is_seeded() {
    let a = mechcheck(&["sample", "--seed", "4", "--agents", "3"]);
    let b = mechcheck(&["sample", "--seed", "4", "--agents", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let p: mechcheck::TypeProfile = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(p.num_agents(), 3);
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.json");
    let o = mechcheck(&["sample", "--seed", "4", "--agents", "3", "--emit-profile", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&f).unwrap(), a.stdout);
}
