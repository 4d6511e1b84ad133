//! Runs the binary on the fixtures and compares reports with the golden
//! files in `fixtures/golden`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("structured error on stderr")
}

const CASES: &[(&str, &[&str], i32)] = &[
    ("analyze_ex22", &["analyze", "ex22.sub"], 0),
    ("analyze_ex23", &["analyze", "ex23.sub"], 0),
    ("analyze_ex217_tame", &["analyze", "ex217_tame.sub"], 0),
    ("analyze_ex217_nontame", &["analyze", "ex217_nontame.sub"], 0),
    ("analyze_thue_morse", &["analyze", "thue_morse.sub"], 0),
    ("analyze_period_doubling", &["analyze", "period_doubling.sub"], 0),
    ("analyze_height2", &["analyze", "height2.json"], 0),
    ("gtheta_ex22", &["gtheta", "ex22.sub"], 0),
    ("thickness_ex22", &["thickness", "ex22.sub"], 0),
    ("thickness_ex23", &["thickness", "ex23.sub"], 0),
    ("thickness_explicit", &["thickness", "explicit_diagram.json"], 0),
    ("independence_ex22", &["independence", "ex22.sub", "--n", "2"], 0),
    ("independence_none", &["independence", "ex217_nontame.sub", "--max-power", "1"], 2),
    ("dset_stage3", &["semicocycle", "d-set", "--stage", "3"], 0),
    ("window_default", &["semicocycle", "window", "--range", "0:64"], 0),
    ("realize_full_ab", &["semicocycle", "realize", "--lang", "full", "--word", "ab"], 0),
    ("realize_sturmian_aba", &["semicocycle", "realize", "--lang", "sturmian", "--word", "aba"], 0),
    (
        "disjointness_stage3",
        &["semicocycle", "disjointness", "--stage", "3", "--samples", "2000", "--seed", "5"],
        0,
    ),
    ("odometer_carry", &["odometer", "--scale", "constant:2", "--head", "1,1,1", "--translate", "1"], 0),
];

#[test]
fn golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = fixtures().join("golden");
    let mut mismatched = Vec::new();
    for &(name, args, code) in CASES {
        let out = run(args);
        assert_eq!(out.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let got = json_of(&out);
        let path = dir.join(format!("{name}.json"));
        if update {
            std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
            continue;
        }
        let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("golden file")).unwrap();
        if got != want {
            mismatched.push(name);
        }
    }
    assert!(mismatched.is_empty(), "reports differ from golden: {mismatched:?}");
}

#[test]
fn verdicts_and_shared_vertex() {
    let v = json_of(&run(&["analyze", "ex22.sub"]));
    assert_eq!(v["verdict"], "non-tame");
    assert_eq!(v["shared_vertex"], serde_json::json!(["a", "b"]));
    assert_eq!(v["schema"], 1);
    let v = json_of(&run(&["analyze", "--inline", "a -> ab; b -> ba"]));
    assert_eq!(v["verdict"], "not-almost-automorphic");
}

#[test]
fn independence_report() {
    let v = json_of(&run(&["independence", "ex22.sub", "--n", "2"]));
    assert_eq!(v["times"], serde_json::json!(["0", "-76", "-19532"]));
    assert_eq!(v["patterns"].as_array().unwrap().len(), 8);
    assert_eq!(v["all_realized"], true);
    let s = &v["scheme"];
    assert_eq!((s["j0"].as_u64(), s["j1"].as_u64(), s["j2"].as_u64(), s["i"].as_u64()), (Some(1), Some(5), Some(9), Some(10)));
}

#[test]
fn dot_export() {
    let out = run(&["gtheta", "ex23.sub", "--dot"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    let vertices = text.lines().filter(|l| l.trim_end().ends_with("\";")).count();
    assert_eq!(vertices, 2);
    assert_eq!(text.matches("->").count(), 3);
}

#[test]
fn errors_are_module_qualified() {
    let cases: &[(&[&str], &str)] = &[
        (&["analyze", "--inline", "a -> ab; b -> ab"], "substitution.periodic"),
        (&["analyze", "--inline", "a -> aa; b -> bb"], "substitution.not_primitive"),
        (&["analyze", "--inline", "a -> ab; b -> a"], "substitution.unequal_lengths"),
        (&["analyze", "missing.sub"], "cli.io"),
        (&["independence", "ex23.sub"], "independence.precondition_violated"),
        (&["semicocycle", "realize", "--lang", "sturmian", "--word", "bb"], "semicocycle.not_in_language"),
        (&["semicocycle", "window", "--zhat", "1,3", "--range", "0:0"], "semicocycle.insufficient_depth"),
        (&["odometer", "--scale", "constant:2", "--head", "2"], "odometer.digit_out_of_range"),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(error_of(&out)["error"]["code"], *code, "{args:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["analyze", "ex22.sub"][..],
        &["independence", "ex22.sub", "--n", "2", "--jobs", "3"],
        &["semicocycle", "disjointness", "--samples", "500", "--seed", "9"],
        &["thickness", "ex22.sub"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
