use std::path::Path;
use std::process::{Command, Output};

use bucrl_core::harness::{parse_curves_csv, theoretical_bound};
use bucrl_core::mdp::{diameter, make_environment, EnvParams};

fn bucrl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bucrl"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "stderr: {text}");
    serde_json::from_str(text.trim_end()).unwrap()
}

#[test]
fn run_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = bucrl(
        &["run", "--env", "bandits", "--agents", "bucrl", "--horizon", "1024", "--trials", "2", "--seed", "7", "--out", "r.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_curves_csv(&std::fs::read_to_string(dir.path().join("r.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 11);
    assert_eq!(rows.iter().map(|r| r.t).max(), Some(1024));
    assert!(dir.path().join("r.summary.csv").exists());

    let replayed = bucrl(&["replay", "r.manifest.json"], dir.path());
    assert!(replayed.status.success());
    let text = String::from_utf8(replayed.stdout).unwrap();
    assert!(text.contains("11 checkpoints identical"), "{text}");
    let other = bucrl(&["replay", "r.manifest.json", "--trial", "1"], dir.path());
    assert!(other.status.success());

    let unknown = bucrl(&["replay", "r.manifest.json", "--agent", "ucrl2"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn run_from_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        "env = \"riverswim\"\nhorizon = 64\ntrials = 1\n\n[[agents]]\nkind = \"ucrl2\"\n\n[[agents]]\nkind = \"tsde\"\n",
    )
    .unwrap();
    let out = bucrl(&["run", "--config", "exp.toml", "--trials", "2", "--out", "sub/x.csv", "--workers", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_curves_csv(&std::fs::read_to_string(dir.path().join("sub/x.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 7);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sub/x.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["trials"], 2);
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn bound_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let river = make_environment("riverswim", &EnvParams::default()).unwrap();
    let expected = theoretical_bound(6, 2, diameter(&river, 1e-9), 1 << 18, 0.05).unwrap();
    let out = bucrl(&["bound", "--env", "riverswim"], dir.path());
    assert!(out.status.success());
    let printed: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((printed - expected).abs() <= 1e-9 * expected);

    let explicit = bucrl(
        &["bound", "--states", "6", "--actions", "2", "--diameter", "14.5", "--horizon", "1000", "--delta", "0.1"],
        dir.path(),
    );
    let printed: f64 = String::from_utf8(explicit.stdout).unwrap().trim().parse().unwrap();
    let expected = theoretical_bound(6, 2, 14.5, 1000, 0.1).unwrap();
    assert!((printed - expected).abs() <= 1e-9 * expected);
}

#[test]
fn envs_lists_and_describes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bucrl(&["envs"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["bandits", "riverswim", "gameofskill-v1", "gameofskill-v2"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
    let spec = bucrl(&["envs", "riverswim", "--spec"], dir.path());
    let spec_text = String::from_utf8(spec.stdout).unwrap();
    std::fs::write(dir.path().join("river.toml"), &spec_text).unwrap();
    let custom = bucrl(&["envs", "custom", "--spec-file", "river.toml"], dir.path());
    assert!(custom.status.success());
    assert!(String::from_utf8(custom.stdout).unwrap().starts_with("custom states=6 actions=2"));
}

#[test]
fn invalid_input_exits_two_with_one_json_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 7] = [
        &["run", "--env", "riverswim", "--delta", "2"],
        &["run", "--env", "nowhere"],
        &["run", "--env", "bandits", "--agents", "bucrl,dqn"],
        &["run", "--env", "bandits", "--horizon", "0"],
        &["run", "--config", "missing.toml"],
        &["run", "--env", "bandits", "--trials", "many"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = bucrl(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr_json(&out);
        assert!(err["error"] == "config" || err["error"] == "usage", "{err}");
        assert!(!err["message"].as_str().unwrap().is_empty());
    }
    assert!(!dir.path().join("results.csv").exists());

    let missing = bucrl(&["replay", "nope.manifest.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(stderr_json(&missing)["error"], "runtime");
}
