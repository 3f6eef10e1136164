use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use string2g_cli::CHECKERS;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_string2g"));
    c.env_remove("STRING2G_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn request(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "requests", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn no_arguments_prints_usage() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["twogroup", "check", "--law", "hexagon"][..],
        &["sm", "check", "--samples", "many"],
        &["frobnicate"],
        &["sds", "verify", "--solution", "3"],
        &["cocycle", "validate", "--kind", "weak", "--in", "/nonexistent.json"],
        &["cover", "inspect", "--element", "1,1,0,0"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exit_code_reflects_checks() {
    assert_eq!(run(&["twogroup", "check", "--law", "interchange", "--samples", "50"]).status.code(), Some(0));
    let out = run(&["cocycle", "validate", "--kind", "strict", "--in", &request("perturbed.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn report_shape() {
    let out = run(&["sm", "check", "--seed", "3", "--samples", "40", "--tol", "1e-8"]);
    let v = json(&out);
    assert_eq!(v["command"], "sm check");
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["samples"], 40);
    assert_eq!(v["config"]["tol"], 1e-8);
    assert!(v["version"].is_string());
    let c = &v["checks"][0];
    for key in ["max", "mean", "p99"] {
        assert!(c["stats"][key].is_number());
    }
    assert!(c["passed"].is_boolean());
    assert!(!String::from_utf8_lossy(&out.stdout).contains("wall"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wall time"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 9\nsamples = 30\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&run(&["twogroup", "check", "--law", "groupoid", "--config", c]));
    assert_eq!(v["config"]["seed"], 9);
    let v = json(&run(&["twogroup", "check", "--law", "groupoid", "--config", c, "--seed", "2"]));
    assert_eq!((v["config"]["seed"].as_u64(), v["config"]["samples"].as_u64()), (Some(2), Some(30)));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["linfty", "check", "--config", c]).status.code(), Some(2));
}

#[test]
fn output_text_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (o, csv) = (dir.path().join("r.txt"), dir.path().join("r.csv"));
    let out = run(&[
        "linfty",
        "check",
        "--format",
        "text",
        "--output",
        o.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&o).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS string.su(2).jacobiator")));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("name,passed,tol,count,max,mean,p99\n"));
    assert!(table.lines().count() > 10);
}

#[test]
fn cocycle_flags_override_the_file() {
    let v = json(&run(&[
        "cocycle",
        "validate",
        "--kind",
        "ordinary",
        "--in",
        &request("trivial.json"),
        "--samples",
        "40",
    ]));
    assert_eq!(v["details"]["request"]["samples"], 40);
    assert_eq!(v["details"]["request"]["kind"], "ordinary");
}

#[test]
fn cover_inspect_reports_patches() {
    let v = json(&run(&["cover", "inspect", "--element", "-0.6,0,0.8,0"]));
    assert_eq!(v["details"]["minimal_patch"], 2);
    assert_eq!(v["details"]["containing_patches"], serde_json::json!([2, 3, 5, 7]));
}

#[test]
fn thread_cap_is_validated() {
    let out = bin().args(["linfty", "check"]).env("STRING2G_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["linfty", "check"]).env("STRING2G_THREADS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn every_checker_is_reachable_from_exactly_one_subcommand() {
    let req = request("coboundary.json");
    let commands: [&[&str]; 10] = [
        &["cover", "build", "--samples", "10"],
        &["cover", "inspect"],
        &["cover", "check", "--samples", "10"],
        &["sm", "check", "--samples", "20"],
        &["twogroup", "check", "--law", "pentagon", "--samples", "20"],
        &["cocycle", "validate", "--kind", "ordinary", "--in", &req, "--samples", "30"],
        &["diff", "demo", "--samples", "10"],
        &["linfty", "check"],
        &["sds", "verify", "--solution", "2", "--samples", "16"],
        &["sds", "verify", "--solution", "1", "--samples", "16"],
    ];
    let mut reached: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for args in commands {
        let v = json(&run(args));
        let cmd = v["command"].as_str().unwrap().to_string();
        for c in v["checkers"].as_array().unwrap() {
            let list = reached.entry(c.as_str().unwrap().to_string()).or_default();
            if !list.contains(&cmd) {
                list.push(cmd.clone());
            }
        }
    }
    for name in CHECKERS {
        let subs = reached.get(*name).cloned().unwrap_or_default();
        assert_eq!(subs.len(), 1, "{name} reached from {subs:?}");
    }
    assert_eq!(reached.len(), CHECKERS.len(), "{:?}", reached.keys());
}
