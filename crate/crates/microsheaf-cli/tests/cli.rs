use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microsheaf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = run(&full);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

fn write(dir: &tempfile::TempDir, name: &str, v: &impl serde::Serialize) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

#[test]
fn presets_validate() {
    for p in ["interval", "circle", "disc", "s2", "p1", "c-origin"] {
        let o = run(&["validate", p]);
        assert_eq!(o.status.code(), Some(0), "{p}: {}", stdout(&o));
    }
}

#[test]
fn broken_incidence_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let mut j = microsheaf::stratspace::preset("disc").unwrap().to_json();
    let k = j.incidences.iter().position(|i| i.0 == "f0" && i.1 == "b0").unwrap();
    j.incidences[k].2 *= -1;
    let path = write(&dir, "broken.json", &j);
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("∂∂(f0)"), "{}", stdout(&o));
    let (code, v) = json_of(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], Value::Bool(false));
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn pushforward_from_c_star_on_p1() {
    let sheaf = r#"{"space":"p1","standard":["e0","e1","f+","f-"],"shift":1}"#;
    let o = run(&["sheaf-report", sheaf, "--perversity", "--cc"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("perverse: yes; CC = (p0:1, pinf:1, C*:1)"), "{}", stdout(&o));
    let (code, v) = json_of(&["sheaf-report", sheaf]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "microsheaf.report/1");
    assert_eq!(v["command"], "sheaf-report");
    for key in ["perversity", "cc", "morse_groups", "ss", "dual_check"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn non_perverse_sheaf_still_passes_its_checks() {
    // ℚ_X unshifted is not perverse; the report says so and the checks themselves agree.
    let o = run(&["sheaf-report", r#"{"space":"p1","constant":true}"#, "--perversity"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("perverse: no"), "{}", stdout(&o));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn inline_space_needs_data() {
    let space = serde_json::to_string(&microsheaf::stratspace::preset("p1").unwrap().to_json()).unwrap();
    let sheaf = format!(r#"{{"space":{space},"constant":true}}"#);
    assert_eq!(run(&["sheaf-report", &sheaf]).status.code(), Some(2));
}

#[test]
fn decompose_corpus_entry() {
    let o = run(&["decompose", "p1:cone[X→X-cl(p0)]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("quasi-isomorphism"));
    let (_, v) = json_of(&["decompose", "s2:random-4"]);
    assert!(v["sections"].as_array().unwrap().iter().all(|l| l["ok"] == Value::Bool(true)));
}

#[test]
fn ainfty_preset_then_file() {
    let o = run(&["ainfty", "--preset", "circle", "--max-arity", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("arity 6: pass"));
    let (code, v) = json_of(&["ainfty", "--preset", "random-17", "--max-arity", "5"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "min.json", &v["structure"]);
    let o = run(&["ainfty", path.to_str().unwrap(), "--max-arity", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut broken = v["structure"].clone();
    let ops = broken["ops"].as_array_mut().unwrap();
    let m2 = ops.iter_mut().find(|e| e["inputs"].as_array().map(|a| a.len()) == Some(2)).unwrap();
    m2["output"][0][1] = Value::String("7".into());
    let path = write(&dir, "broken.json", &broken);
    let (code, v) = json_of(&["ainfty", path.to_str().unwrap(), "--max-arity", "3"]);
    assert_eq!(code, 1);
    let rel = v["relations"].as_array().unwrap();
    assert!(rel.iter().any(|r| r["ok"] == Value::Bool(false) && !r["witness"].is_null()));
}

#[test]
fn morse_family_with_trees() {
    let o = run(&["morse", "--family", "interval-nested", "--arity", "3", "--trees"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatches: 0"));
    assert!(stdout(&o).contains("(0 1)"));
}

#[test]
fn morse_sequence_file_round_trip() {
    let (s, objects) = microsheaf::morse::family("brane-left").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let inline = microsheaf::morse::SequenceJson::from_objects(
        &s,
        microsheaf::sheafcat::SpaceRef::Inline(s.to_json()),
        &objects,
    );
    let path = write(&dir, "inline.json", &inline);
    let (code, v) = json_of(&["morse", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["ok"], Value::Bool(true));
}

#[test]
fn degree_file_and_random() {
    let dir = tempfile::tempdir().unwrap();
    let l0 = microsheaf::laggr::LagrangianPlane::zero_section(2).unwrap().to_json();
    let l1 = microsheaf::laggr::LagrangianPlane::fiber(2).unwrap().to_json();
    let path = write(&dir, "pairs.json", &serde_json::json!({"pairs": [{"l0": l0, "l1": l1}]}));
    let (code, v) = json_of(&["degree", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let d = v["pairs"][0]["report"]["degree"].as_f64().unwrap();
    assert!((d - 2.0).abs() < 1e-12);
    let o = run(&["degree", "--random", "200", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failing"));
    let o = run(&["degree", "--random", "20", "--degree-tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_reports_are_deterministic() {
    for args in [
        &["degree", "--random", "40", "--seed", "5"][..],
        &["sheaf-report", "c-origin:random-9"][..],
        &["morse", "--family", "circle-endo", "--arity", "3"][..],
    ] {
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        assert_eq!(run(&full).stdout, run(&full).stdout, "{args:?}");
    }
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["validate", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "p1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["sheaf-report", "p1:nope"]).status.code(), Some(2));
    assert_eq!(run(&["ainfty"]).status.code(), Some(2));
    let o = run(&["degree", r#"{"pairs":[{"l0":{"n":1,"rows":[[1,0],[0,1]]}}]}"#]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("l1") && err.contains("line 1"), "{err}");
}
