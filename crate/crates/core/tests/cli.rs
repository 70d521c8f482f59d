use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_levy-invariance");

const PRESET: &str = r#"
experiment = "fclt"

[model]
jump_law = { kind = "degenerate", value = 1.0 }
rate = 1.0
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().unwrap()
}

fn without_duration(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["duration_secs"] = serde_json::Value::Null;
    v
}

#[test]
fn fclt_preset_with_default_knobs_passes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), PRESET).unwrap();
    let out = run(dir.path(), &["fclt", "--config", "c.toml", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["experiment"], "fclt");
    assert_eq!(report["passed"], true);
    assert_eq!(report["effective_config"]["knobs"]["m"], 1000);
    assert_eq!(report["effective_config"]["knobs"]["records"], 2000);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn unknown_key_exits_with_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), PRESET.replace("[model]", "[modle]")).unwrap();
    let out = run(dir.path(), &["fclt", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modle"));
}

#[test]
fn weight_misrouted_into_schedule_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
experiment = "asclt"
[model]
jump_law = { kind = "degenerate", value = 1.0 }
[schedule]
kind = "inverse_linear"
c = 1.0
"#;
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(dir.path(), &["asclt", "--config", "c.toml", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn refusal_exits_2_with_condition_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
experiment = "integral-asclt"
[model]
jump_law = { kind = "degenerate", value = 1.0 }
[weight]
kind = "inverse_linear"
c = 1.0
[knobs]
s = 100.0
"#;
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(dir.path(), &["integral-asclt", "--config", "c.toml", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    let cond: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(cond["condition"], "C");
    assert_eq!(cond["first_violation"], 1.0);
}

#[test]
fn infeasible_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fclt", "--t", "1e9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failed_checks_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "fclt",
            "--t",
            "100",
            "--records",
            "500",
            "--m",
            "50",
            "--ks-threshold",
            "0.001",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn reruns_are_identical_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
experiment = "asclt"
[model]
jump_law = { kind = "exponential", rate = 1.0 }
rate = 2.0
diffusion_sd = 0.5
[knobs]
n = 400
m = 100
[seeds]
master = 77
panel = 6
"#;
    let other = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    std::fs::write(other.path().join("c.toml"), text).unwrap();
    let a = run(
        dir.path(),
        &["asclt", "--config", "c.toml", "--out", "r.json", "--threads", "1"],
    );
    let b = run(
        other.path(),
        &["asclt", "--config", "c.toml", "--out", "r.json", "--threads", "4"],
    );
    assert!(matches!(a.status.code(), Some(0 | 4)));
    assert_eq!(a.status.code(), b.status.code());
    let ja = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let jb = std::fs::read_to_string(other.path().join("r.json")).unwrap();
    assert_eq!(without_duration(&ja), without_duration(&jb));
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("\"duration_secs\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&ja), strip(&jb));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{PRESET}\n[knobs]\nrecords = 200\nm = 20\nt = 50.0\n[seeds]\nmaster = 3\n");
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(
        dir.path(),
        &[
            "fclt",
            "--config",
            "c.toml",
            "--records",
            "150",
            "--seed",
            "9",
            "--format",
            "csv",
        ],
    );
    assert!(matches!(out.status.code(), Some(0 | 4)));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("check,statistic,threshold,verdict\n"));
    assert!(csv.contains("ks_marginal[0.25],"));

    let out = run(
        dir.path(),
        &["fclt", "--config", "c.toml", "--records", "150", "--seed", "9"],
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eff = &report["effective_config"];
    assert_eq!(eff["knobs"]["records"], 150);
    assert_eq!(eff["knobs"]["m"], 20);
    assert_eq!(eff["seeds"]["master"], 9);
    assert_eq!(report["master_seed"], 9);
}
