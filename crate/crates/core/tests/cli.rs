//! End-to-end tests of the command-line interface: exit codes, output
//! schemas, and the documented examples.

use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prunetree"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .stdin(Stdio::null())
        .output()
        .expect("binary runs")
}

#[test]
fn eval_prints_survival_probability() {
    let out = run(&["eval", "--formula", "p-length", "--lambda", "1", "--t", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.trim().parse().unwrap();
    assert!((v - 0.6736700229433489).abs() < 1e-12, "{v}");
    // the resolved config echoes on stderr
    assert!(String::from_utf8(out.stderr).unwrap().contains("lambda=1"));
}

#[test]
fn eval_csv_sweep() {
    let out = run(&[
        "eval", "--formula", "xi", "--lambda", "1", "--from", "0.1", "--to", "2.0", "--steps", "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,value\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn roundtrip_exits_zero() {
    let out = run(&["roundtrip", "--lambda", "1", "--n", "100", "--seed", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"passed\": true"));
}

#[test]
fn verify_suite_json_and_exit_code() {
    let out = run(&[
        "verify", "--suite", "equivalence", "--lambda", "1", "--n", "60", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(parsed.as_array().unwrap()[0]["passed"].as_bool().unwrap());
}

#[test]
fn unknown_flags_exit_64() {
    let out = run(&["eval", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn domain_error_exits_one() {
    let out = run(&["eval", "--formula", "ell", "--lambda=-1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sample_prune_pipeline() {
    let dir = std::env::temp_dir().join(format!("prunetree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tree_path = dir.join("tree.json");
    let out = run(&[
        "sample-gw",
        "--lambda",
        "1",
        "--n",
        "1",
        "--seed",
        "9",
        "--out",
        tree_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let cuts_path = dir.join("cuts.json");
    let pruned_path = dir.join("pruned.json");
    let out = run(&[
        "prune",
        "--phi",
        "length",
        "--t",
        "0.4",
        "--input",
        tree_path.to_str().unwrap(),
        "--cuts",
        cuts_path.to_str().unwrap(),
        "--out",
        pruned_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pruned = std::fs::read_to_string(&pruned_path).unwrap();
    assert!(pruned.contains("\"planted\":true"));
    let cuts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cuts_path).unwrap()).unwrap();
    assert!(cuts.is_array());
    // deterministic: same seed reproduces the same file
    let tree2 = dir.join("tree2.json");
    let out = run(&[
        "sample-gw",
        "--lambda",
        "1",
        "--n",
        "1",
        "--seed",
        "9",
        "--out",
        tree2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&tree_path).unwrap(),
        std::fs::read_to_string(&tree2).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn annihilate_emits_all_formats() {
    let dir = std::env::temp_dir().join(format!("prunetree-ann-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let pot = dir.join("pot.json");
    std::fs::write(
        &pot,
        r#"{"a":0.0,"b":7.4,"extrema":[0.0,-1.7,-0.7,-2.7,0.0]}"#,
    )
    .unwrap();
    let p = pot.to_str().unwrap();
    for (emit, needle) in [
        ("potential", "\"plateaus\""),
        ("masstree", "\"leaf_masses\""),
        ("trajectories", "sink_id,t,x,mass"),
        ("shocktree-svg", "<svg"),
    ] {
        let out = run(&["annihilate", "--potential", p, "--t", "1.5", "--emit", emit]);
        assert!(out.status.success(), "{emit}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(needle), "{emit} output missing {needle}");
    }
    // t beyond t_max is a domain error
    let out = run(&["annihilate", "--potential", p, "--t", "9.9"]);
    assert_eq!(out.status.code(), Some(1));
    // sampled potential
    let out = run(&[
        "annihilate",
        "--potential",
        "sample:lambda=1",
        "--seed",
        "5",
        "--emit",
        "trajectories",
    ]);
    assert!(out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn env_seed_override() {
    let out = bin()
        .args(["sample-gw", "--n", "1"])
        .env("PRUNETREE_SEED", "12345")
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed=12345"));
}

/// Minimal structural validation of CLI outputs against the shipped
/// schemas: required keys present with the right JSON types.
#[test]
fn outputs_match_shipped_schemas() {
    fn required_of(schema: &serde_json::Value) -> Vec<String> {
        schema["required"]
            .as_array()
            .map(|a| a.iter().map(|v| v.as_str().unwrap().to_string()).collect())
            .unwrap_or_default()
    }
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("schemas");
    let load = |name: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(root.join(name)).unwrap()).unwrap()
    };

    // tree output
    let out = run(&["sample-gw", "--n", "1", "--seed", "3"]);
    let tree: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().lines().next().unwrap())
            .unwrap();
    for key in required_of(&load("tree.schema.json")) {
        assert!(tree.get(&key).is_some(), "tree output missing {key}");
    }
    for node in tree["nodes"].as_array().unwrap() {
        for key in ["id", "parent", "side", "len"] {
            assert!(node.get(key).is_some(), "node missing {key}");
        }
    }

    // evolved potential output
    let dir = std::env::temp_dir().join(format!("prunetree-schema-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let pot = dir.join("pot.json");
    std::fs::write(&pot, r#"{"a":0.0,"b":7.4,"extrema":[0.0,-1.7,-0.7,-2.7,0.0]}"#).unwrap();
    let out = run(&["annihilate", "--potential", pot.to_str().unwrap(), "--t", "1.5"]);
    let ep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in required_of(&load("potential.schema.json")) {
        assert!(ep.get(&key).is_some(), "potential output missing {key}");
    }

    // verification report
    let out = run(&["verify", "--suite", "equivalence", "--n", "40", "--seed", "1"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let schema = load("report.schema.json");
    assert!(report.is_array());
    for suite in report.as_array().unwrap() {
        for key in required_of(&schema["items"]) {
            assert!(suite.get(&key).is_some(), "report missing {key}");
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}
