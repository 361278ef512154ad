use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn qrank(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qrank"))
        .args(args)
        .env_remove("QRANK_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(input) = stdin {
        child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn construct_proposed_then_distance() {
    let out = qrank(&["construct", "--method", "proposed", "-m", "2", "-k", "1"], None);
    assert!(out.status.success());
    let bundle = json(&out);
    assert_eq!((bundle["params"]["N"].as_u64(), bundle["params"]["K"].as_u64()), (Some(8), Some(4)));
    let d = qrank(&["distance"], Some(&stdout(&out)));
    assert!(d.status.success());
    let cert = json(&d);
    assert_eq!(cert["D_R"], 2);
    assert_eq!(cert["certified"], true);
    assert!(cert["witness"].is_string());
    // Same answer when run again with other thread counts.
    let again = qrank(&["--threads", "3", "distance"], Some(&stdout(&out)));
    assert_eq!(again.stdout, d.stdout);
}

#[test]
fn construct_css_then_distance() {
    let out = qrank(&["construct", "--method", "css", "-n", "3", "-r", "1", "-s", "1"], None);
    assert!(out.status.success());
    assert_eq!((json(&out)["params"]["N"].as_u64(), json(&out)["params"]["K"].as_u64()), (Some(9), Some(3)));
    let d = qrank(&["distance"], Some(&stdout(&out)));
    assert_eq!(json(&d)["D_R"], 2);
}

#[test]
fn explicit_overrides_reproduce_worked_inputs() {
    let out = qrank(&["construct", "-m", "2", "-k", "1", "--modulus", "13", "--alpha", "8,b,f,d", "--theta", "8"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle = json(&out);
    assert_eq!(bundle["provenance"]["T"]["data"], serde_json::json!(["0100", "1001", "0001", "0110"]));
    assert_eq!(bundle["provenance"]["D"]["data"], serde_json::json!(["1000", "0010", "0100", "1001"]));
    let bad = qrank(&["construct", "-m", "2", "-k", "1", "--alpha", "1,2,4,8"], None);
    assert_eq!(bad.status.code(), Some(3));
    let unparsable = qrank(&["construct", "-m", "2", "-k", "1", "--theta", "zz"], None);
    assert_eq!(unparsable.status.code(), Some(2));
}

#[test]
fn parameter_errors_exit_2() {
    for args in [
        &["construct", "--method", "proposed", "-m", "1", "-k", "1"][..],
        &["construct", "--method", "css", "-n", "4", "-r", "1", "-s", "1"],
        &["construct", "--method", "css", "-n", "3", "-r", "1", "-s", "2"],
        &["compare", "-n", "2", "-k", "2"],
    ] {
        let out = qrank(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn budget_exceeded_exits_4_and_sampling_recovers() {
    let bundle = stdout(&qrank(&["construct", "-m", "3", "-k", "1"], None));
    let out = qrank(&["distance"], Some(&bundle));
    assert_eq!(out.status.code(), Some(4));
    let sampled = qrank(&["distance", "--sample", "2000", "--seed", "5"], Some(&bundle));
    assert!(sampled.status.success());
    let cert = json(&sampled);
    assert_eq!(cert["certified"], false);
    assert!(cert["D_R"].as_u64().unwrap() >= 2);
}

#[test]
fn degenerate_bundle_reports_undefined() {
    let bundle = serde_json::json!({
        "m": 1, "n": 1,
        "generators": {"rows": 1, "cols": 2, "data": ["01"]},
        "params": {"N": 1, "K": 0, "D_R": null, "certified": false},
        "provenance": {"construction": "css", "field": {"degree": 1, "modulus": "2"}, "alpha": ["1"], "theta": "1", "T": null, "D": null}
    });
    let out = qrank(&["distance"], Some(&bundle.to_string()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["D_R"], "undefined");
    assert!(v["note"].is_string());
}

#[test]
fn example_is_deterministic() {
    let a = qrank(&["--format", "table", "example"], None);
    let b = qrank(&["--format", "table", "--threads", "4", "example"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("    0100\n    1001\n    0001\n    0110\n"));
    assert!(text.trim_end().ends_with("parameters: [[8, 4, 2]]"));
    let j = qrank(&["example"], None);
    assert_eq!(json(&j)["params"], serde_json::json!({"N": 8, "K": 4, "D_R": 2, "certified": true}));
}

#[test]
fn compare_outputs() {
    let out = qrank(&["compare", "-n", "2", "-k", "1"], None);
    let v = json(&out);
    let proposed = &v["columns"][2];
    assert_eq!((proposed["N"].as_u64(), proposed["K"].as_u64()), (Some(8), Some(4)));
    assert_eq!(proposed["R"], "1/2");
    assert_eq!(proposed["delta"], "1/4");
    assert_eq!(v["columns"][0]["delta"], "2/9");
    let table = stdout(&qrank(&["--format", "table", "compare", "-n", "50", "-k", "1"], None));
    assert!(table.contains("9801/5000 (~1.9602)"));
}

#[test]
fn simulate_reports() {
    let out = qrank(&["simulate", "-m", "8", "-n", "8", "--gates", "20", "--faults", "3", "--trials", "200", "--seed", "7"], None);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 201);
    assert!(lines[..200].iter().all(|l| l["bound_ok"] == true));
    assert_eq!(lines[200]["summary"]["violations"], 0);
    let none = stdout(&qrank(&["simulate", "--faults", "0", "--trials", "20", "--seed", "1"], None));
    assert!(none.lines().take(20).all(|l| serde_json::from_str::<Value>(l).unwrap()["rank_q"] == 0));
}

#[test]
fn threads_env_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_qrank"))
        .args(["--threads", "2", "compare", "-n", "2", "-k", "1"])
        .env("QRANK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_bundles() {
    for args in [&["construct", "-m", "2", "-k", "1"][..], &["construct", "--method", "css", "-n", "5", "-r", "1", "-s", "2"]] {
        let bundle = stdout(&qrank(args, None));
        let out = qrank(&["verify"], Some(&bundle));
        assert!(out.status.success(), "{}", stdout(&out));
        assert_eq!(json(&out)["ok"], true);
    }
    let mut bundle: Value = serde_json::from_str(&stdout(&qrank(&["construct", "-m", "2", "-k", "1"], None))).unwrap();
    bundle["params"]["K"] = serde_json::json!(5);
    let out = qrank(&["verify"], Some(&bundle.to_string()));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qrank-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bundle.json");
    let out = qrank(&["construct", "-m", "2", "-k", "1", "--out", path.to_str().unwrap()], None);
    assert!(out.status.success() && out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["params"]["N"], 8);
    std::fs::remove_dir_all(dir).unwrap();
}
