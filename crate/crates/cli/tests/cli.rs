use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn exchange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exchange"))
        .args(args)
        .env_remove("EXCHANGE_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = exchange(&all);
    let report = serde_json::from_slice(&out.stdout).expect("JSON report");
    (out.status.code().expect("exit code"), report)
}

fn example(dir: &Path, name: &str, file: &str) -> PathBuf {
    let out = exchange(&["examples", name, "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    dir.join(file)
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bundled_examples_hold() {
    let dir = TempDir::new().unwrap();
    for (name, file) in [
        ("ex1", "ex1.json"),
        ("ex2", "ex2.json"),
        ("roommate", "roommate.ntu.json"),
        ("konishi", "konishi.json"),
        ("shoes-gft", "shoes-gft.json"),
    ] {
        assert!(example(dir.path(), name, file).exists());
    }
    let (code, report) = json(&["examples", "ex1"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["strong_core"].as_array().unwrap().len(), 1);
    assert!(report["result"]["completion_rule"].as_str().unwrap().contains("negative"));
}

#[test]
fn validate_reports() {
    let dir = TempDir::new().unwrap();
    let ex2 = example(dir.path(), "ex2", "ex2.json");
    let (code, report) = json(&["validate", ex2.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["valid"], true);
    assert_eq!(report["status"], "ok");

    let text = fs::read_to_string(&ex2).unwrap();
    let truncated = write(dir.path(), "truncated.json", &text[..text.len() / 2]);
    let (code, report) = json(&["validate", &truncated]);
    assert_eq!(code, 2);
    assert!(report["error"]["message"].as_str().unwrap().contains("line"));

    let overlapping = write(
        dir.path(),
        "overlap.json",
        r#"{"objects": ["a", "b"], "agents": ["1", "2"],
            "endowments": {"1": ["a"], "2": ["a"]},
            "utilities": {"1": {"kind": "dichotomous", "good": ["b"]}, "2": {"kind": "dichotomous", "good": ["a"]}}}"#,
    );
    let (code, report) = json(&["validate", &overlapping]);
    assert_eq!(code, 1);
    let kinds: Vec<&str> =
        report["result"]["violations"].as_array().unwrap().iter().map(|v| v["violation"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["overlapping-endowments", "unowned-object"]);
}

#[test]
fn weak_core_of_example_two_is_empty() {
    let dir = TempDir::new().unwrap();
    let ex2 = example(dir.path(), "ex2", "ex2.json");
    let (code, report) = json(&["solve", "weak-core", ex2.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["count"], 0);
}

#[test]
fn ttc_on_three_houses() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "housing3.json",
        r#"{"objects": ["h1", "h2", "h3"], "agents": ["1", "2", "3"],
            "endowments": {"1": ["h1"], "2": ["h2"], "3": ["h3"]},
            "utilities": {
                "1": {"kind": "housing", "ranking": ["h2", "h1", "h3"]},
                "2": {"kind": "housing", "ranking": ["h1", "h3", "h2"]},
                "3": {"kind": "housing", "ranking": ["h1", "h2", "h3"]}}}"#,
    );
    let (code, report) = json(&["solve", "ttc", &path]);
    assert_eq!(code, 0);
    let r = &report["result"];
    assert_eq!(r["rounds"], serde_json::json!([[["1", "2"]], [["3"]]]));
    assert_eq!(r["assignment"], serde_json::json!({"1": "h2", "2": "h1", "3": "h3"}));
}

#[test]
fn bargaining_pipeline_is_certified() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dtu4.json");
    let p = path.to_str().unwrap();
    let out = exchange(&["gen", "--family", "additive-common", "--agents", "4", "--objects", "6", "--seed", "11", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let out = exchange(&["solve", "bargaining", p, "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("in pairwise bargaining set: true"));
    let (_, report) = json(&["check", "dtu", p]);
    assert_eq!(report["result"]["holds"], true);
}

#[test]
fn bargaining_membership_of_a_given_allocation() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "swap.json",
        r#"{"objects": ["a", "b"], "agents": ["1", "2"],
            "endowments": {"1": ["a"], "2": ["b"]},
            "utilities": {"1": {"kind": "dichotomous", "good": ["b"]}, "2": {"kind": "dichotomous", "good": ["a"]}}}"#,
    );
    let (code, report) = json(&["solve", "bargaining", &p, "--allocation", "a;b", "--structure", "1;2"]);
    assert_eq!(code, 1);
    let certificate = &report["result"]["certificate"];
    assert_eq!(certificate["in_pairwise_bargaining_set"], false);
    assert_eq!(certificate["unanswered_objection"]["pair"], serde_json::json!(["1", "2"]));
    let (code, _) = json(&["solve", "bargaining", &p, "--allocation", "b;a", "--structure", "1,2"]);
    assert_eq!(code, 0);
    let out = exchange(&["solve", "bargaining", &p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("check injective failed"));
}

#[test]
fn gains_from_trade_fails_on_example_two() {
    let dir = TempDir::new().unwrap();
    let ex2 = example(dir.path(), "ex2", "ex2.json");
    let (code, report) = json(&["check", "gft", ex2.to_str().unwrap()]);
    assert_eq!(code, 1);
    let pairs: Vec<(Value, Value)> = report["result"]["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| (v["s"].clone(), v["s_prime"].clone()))
        .collect();
    assert!(pairs.contains(&(serde_json::json!(["1", "2"]), serde_json::json!(["2", "3"]))));
}

#[test]
fn roommate_game_is_unbalanced() {
    let dir = TempDir::new().unwrap();
    let game = example(dir.path(), "roommate", "roommate.ntu.json");
    let (code, report) = json(&["check", "balanced", game.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["result"]["violation"]["u"], serde_json::json!(["1", "1", "1"]));
    let (code, _) = json(&["check", "convex", game.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let args = ["gen", "--family", "dichotomous", "--agents", "3", "--objects", "5", "--seed", "7", "--out"];
        let mut args = args.to_vec();
        args.push(p.to_str().unwrap());
        assert_eq!(exchange(&args).status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let first = exchange(&["--json", "check", "injective", a.to_str().unwrap()]);
    let second = exchange(&["--json", "check", "injective", a.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    let (_, report) = json(&["gen", "--family", "dichotomous", "--agents", "3", "--objects", "5", "--seed", "7"]);
    assert_eq!(report["seed"], 7);
}

#[test]
fn generated_families_validate() {
    let dir = TempDir::new().unwrap();
    let housing = dir.path().join("h5.json");
    let h = housing.to_str().unwrap();
    assert_eq!(exchange(&["gen", "--family", "housing", "--agents", "5", "--seed", "2", "--out", h]).status.code(), Some(0));
    assert_eq!(exchange(&["validate", h]).status.code(), Some(0));
    assert_eq!(exchange(&["check", "injective", h]).status.code(), Some(0));
    assert_eq!(exchange(&["solve", "ttc", h]).status.code(), Some(0));

    let cat = dir.path().join("cat.json");
    let c = cat.to_str().unwrap();
    let args = ["gen", "--family", "categorical", "--agents", "3", "--categories", "2", "--per-category", "2", "--out", c];
    assert_eq!(exchange(&args).status.code(), Some(0));
    assert_eq!(exchange(&["validate", c]).status.code(), Some(0));
    let (code, report) = json(&["solve", "weak-core", c]);
    assert_eq!(code, 0);
    assert!(report["result"]["count"].as_u64().unwrap() > 0);
}

#[test]
fn size_refusal_and_budget() {
    let dir = TempDir::new().unwrap();
    let ex2 = example(dir.path(), "ex2", "ex2.json");
    let p = ex2.to_str().unwrap();
    let (code, report) = json(&["--budget", "100", "solve", "weak-core", p]);
    assert_eq!(code, 3);
    assert!(report["error"]["message"].as_str().unwrap().contains("4096"));
    let out = Command::new(env!("CARGO_BIN_EXE_exchange"))
        .args(["solve", "weak-core", p])
        .env("EXCHANGE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rounds_a_matrix_file() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "m.json",
        r#"{"mode": "dichotomous", "rows": ["1", "2"], "columns": ["a", "b"], "targets": [1, 1],
            "entries": [["1/2", "1/2"], ["1/2", "1/2"]]}"#,
    );
    let (code, report) = json(&["round", &path]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["passes"].as_array().unwrap().len(), 1);
    assert_eq!(report["result"]["assignment"], serde_json::json!({"1": ["a"], "2": ["b"]}));

    let path = write(
        dir.path(),
        "c.json",
        r#"{"mode": "categorical", "rows": ["1", "2"], "columns": ["l1", "l2", "r1", "r2"], "targets": [2, 2],
            "entries": [["1/2", "1/2", "1/2", "1/2"], ["1/2", "1/2", "1/2", "1/2"]],
            "categories": {"l": ["l1", "l2"], "r": ["r1", "r2"]}}"#,
    );
    let (code, report) = json(&["round", &path]);
    assert_eq!(code, 0);
    let assignment = report["result"]["assignment"].as_object().unwrap();
    assert_eq!(assignment["1"].as_array().unwrap().len(), 2);
}
