use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trop-dissim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SEVEN: &str = "(((1:1,2:1):1,(3:1,4:1):1):1,(5:1,6:1):1,7:1);";

#[test]
fn weighted_vector_of_unit_star() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "star.nwk", "(1:1,2:1,3:1,4:1);");
    let out = run(&["dissim", &t, "--kind", "weighted", "-r", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["n"], 4);
    let entries = v["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 4);
    assert!(entries.values().all(|x| x == "6"));
}

#[test]
fn classic_vector_of_resolution_split_metric() {
    // length 1 on the edge 1234|567, zero elsewhere: every 4-set except {1,2,3,4} straddles it
    let dir = TempDir::new().unwrap();
    let t = write(
        dir.path(),
        "e1.nwk",
        "(((1:0,2:0):0,(3:0,4:0):0):1,((5:0,6:0):0,7:0):0);",
    );
    let out = run(&["dissim", &t, "--kind", "classic", "-r", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let entries = v["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 35);
    for (k, x) in entries {
        assert_eq!(x, if k == "1,2,3,4" { "0" } else { "1" }, "{k}");
    }
}

#[test]
fn dissim_input_errors() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "q.nwk", "(1:1,2:1,(3:1,4:1):1);");
    assert_eq!(code(&run(&["dissim", &t, "-r", "5"])), 2);
    assert_eq!(code(&run(&["dissim", &t])), 2);
    let bad = write(dir.path(), "bad.nwk", "(1:1,2:1");
    assert_eq!(code(&run(&["dissim", &bad, "-r", "2"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    let d2 = run(&["dissim", &t, "--kind", "d2"]);
    assert_eq!(json(&d2)["entries"]["1,3"], "3");
}

#[test]
fn output_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.nwk", SEVEN);
    let a = run(&["dissim", &t, "-r", "4"]);
    let b = run(&["dissim", &t, "-r", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let x = run(&[
        "algebra", "--trials", "2", "--seed", "11", "-n", "6", "-r", "3",
    ]);
    let y = run(&[
        "algebra", "--trials", "2", "--seed", "11", "-n", "6", "-r", "3",
    ]);
    assert_eq!(code(&x), 0);
    assert_eq!(x.stdout, y.stdout);
    assert_eq!(json(&x)["seed"], 11);
}

#[test]
fn check_and_recover() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.nwk", SEVEN);
    let vec_path = dir.path().join("w.json");
    let out = run(&["dissim", &t, "-r", "4", "-o", vec_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let w = vec_path.to_str().unwrap();

    let ok = run(&["check", w, "--mode", "all-a"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["verdict"], "pass");

    let tree_path = dir.path().join("back.nwk");
    let rec = run(&["recover", w, "--out-tree", tree_path.to_str().unwrap()]);
    assert_eq!(code(&rec), 0);
    let back = fs::read_to_string(&tree_path).unwrap();
    assert_eq!(back.trim(), json(&rec)["witness_tree"]);
    assert_eq!(
        back.trim(),
        "(1:1,2:1,((3:1,4:1):1,((5:1,6:1):1,7:1):1):1);"
    );

    let mut v: Value = serde_json::from_str(&fs::read_to_string(w).unwrap()).unwrap();
    v["entries"]["2,4,6,7"] = Value::String("100/3".into());
    let bumped = write(dir.path(), "bumped.json", &v.to_string());
    let fail = run(&["check", &bumped]);
    assert_eq!(code(&fail), 1);
    let cert = json(&fail);
    assert_eq!(cert["verdict"], "fail");
    assert!(!cert["cube_violations"].as_array().unwrap().is_empty());
    let missing_tree = dir.path().join("none.nwk");
    assert_eq!(
        code(&run(&[
            "recover",
            &bumped,
            "--out-tree",
            missing_tree.to_str().unwrap()
        ])),
        1
    );
    assert!(!missing_tree.exists());
}

#[test]
fn decimals_need_the_flag() {
    let dir = TempDir::new().unwrap();
    // d2 of a quartet with half-unit pendant on leaf 1
    let text = r#"{"n":4,"r":2,"entries":{"1,2":"1.5","1,3":"2.5","1,4":"2.5","2,3":"3","2,4":"3","3,4":"2"}}"#;
    let p = write(dir.path(), "d.json", text);
    assert_eq!(code(&run(&["check", &p])), 2);
    let out = run(&["check", &p, "--exact-decimal"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn reference_check_bundled_and_tampered() {
    let out = run(&["paper-verify", "--json"]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    let checks = rep["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    assert!(checks.iter().all(|c| c["status"] == "ok"));

    let text = run(&["paper-verify"]);
    assert_eq!(code(&text), 0);
    assert!(String::from_utf8_lossy(&text.stdout).contains("all 6 checks ok"));

    let dir = TempDir::new().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    let classic = fs::read_to_string(golden.join("cone7_classic.txt")).unwrap();
    let weighted = fs::read_to_string(golden.join("cone7_weighted.txt")).unwrap();
    write(
        dir.path(),
        "cone7_classic.txt",
        &classic.replacen('1', "0", 1),
    );
    write(dir.path(), "cone7_weighted.txt", &weighted);
    let bad = run(&["paper-verify", "--golden-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("failing checks: star_matrices"));
    assert_eq!(
        code(&run(&["paper-verify", "--golden-dir", "/nonexistent"])),
        2
    );
}

#[test]
fn audit_exit_codes() {
    let classic = run(&[
        "audit",
        "-n",
        "6",
        "-r",
        "4",
        "--kind",
        "classic",
        "--expect-balanced",
    ]);
    assert_eq!(code(&classic), 1);
    assert_eq!(json(&classic)["not_balanced"], 60);
    let weighted = run(&[
        "audit",
        "-n",
        "6",
        "-r",
        "4",
        "--kind",
        "weighted",
        "--expect-balanced",
    ]);
    assert_eq!(code(&weighted), 0);
    assert_eq!(json(&weighted)["cones"], 105);
    assert_eq!(
        code(&run(&["audit", "-n", "9", "-r", "4", "--kind", "weighted"])),
        2
    );
}

#[test]
fn cubes_listing() {
    let out = run(&["cubes"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 15);
    assert!(text.contains("black 123 145 246 356  white 124 135 236 456"));
    let js = json(&run(&["cubes", "--json"]));
    assert_eq!(js.as_array().unwrap().len(), 15);
}
