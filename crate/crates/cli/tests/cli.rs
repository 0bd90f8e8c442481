use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("vecstruct-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vecstruct"))
        .args(args)
        .env("VECSTRUCT_CACHE_DIR", scratch("cache"))
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("runtime_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn unknown_names_are_usage_errors_with_catalog() {
    for args in [
        vec!["--suite", "nope"],
        vec!["--suite", "groups", "--group", "E8"],
        vec!["--suite", "manifold", "--model", "torus"],
        vec!["--suite", "manifold", "--model", "flat", "--params", "zz=1"],
        vec!["--suite", "manifold", "--params", "a=1"],
        vec!["--suite", "manifold", "--model", "flat", "--params", "n"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("models:") && err.contains("conformal_g2"), "{err}");
    }
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["--format", "xml"]).status.code(), Some(2));
}

#[test]
fn obstruction_counts_as_pass() {
    let out = run(&["--suite", "torsion", "--group", "SO3_IRRED5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let case = r["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "torsion/SO3_IRRED5_n5/obstruction")
        .unwrap();
    assert_eq!(case["status"], "pass");
    assert_eq!(case["details"]["solver"]["status"], "no_solution");
}

#[test]
fn flat_model_is_exact() {
    let out = run(&["--suite", "manifold", "--model", "flat"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let cases = r["cases"].as_array().unwrap();
    assert!(!cases.is_empty());
    for c in cases {
        assert_eq!(c["status"], "pass", "{c}");
        assert_eq!(c["max_abs_error"].as_f64(), Some(0.0), "{c}");
    }
}

#[test]
fn failing_case_sets_exit_code() {
    let out = run(&["--suite", "manifold", "--model", "conformal_su2", "--tolerance", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["summary"]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn same_seed_gives_same_report() {
    let args = ["--suite", "algebra", "--seed", "17"];
    let (mut a, mut b) = (json(&run(&args)), json(&run(&args)));
    assert_eq!(a["header"]["seed"], 17);
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    let mut c = json(&run(&["--suite", "algebra", "--seed", "18"]));
    strip_timing(&mut c);
    assert_ne!(a, c);
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "suite = \"manifold\"\nmodel = \"conformal_su2\"\nseed = 5\ngrid-points = 3\n[params]\na = 0.1\n",
    )
    .unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["header"]["seed"], 9);
    assert_eq!(r["header"]["grid_points"], 3);
    assert_eq!(r["header"]["params"]["a"], 0.1);
    assert_eq!(r["header"]["suite"], "manifold");

    std::fs::write(&cfg, "sute = \"groups\"\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_file_and_text_format() {
    let dir = scratch("output");
    let path = dir.join("report.json");
    let out = run(&["--suite", "torsion", "--group", "G2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["header"]["group"], "G2");

    let out = run(&["--suite", "torsion", "--group", "G2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS  torsion/G2_n7/closed_form"), "{text}");
}

#[test]
fn cache_directory_from_environment() {
    let dir = scratch("envcache");
    let out = Command::new(env!("CARGO_BIN_EXE_vecstruct"))
        .args(["--suite", "groups", "--format", "text"])
        .env("VECSTRUCT_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(files.iter().any(|f| f.starts_with("G2_n7_v")), "{files:?}");
}

#[test]
fn list_prints_catalog() {
    let out = run(&["--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["algebra", "SPIN9", "hopf6", "foliation_sine"] {
        assert!(text.contains(name));
    }
}
