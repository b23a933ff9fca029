//! End-to-end runs of the `m24` binary.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn m24(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_m24"));
    c.args(args).env_remove("M24_CACHE_DIR").env_remove("M24_DATA_DIR");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    for f in ["classes.toml", "ttilde.toml", "appendix_a.toml", "appendix_b.toml"] {
        std::fs::copy(src.join(f), dir.path().join(f)).unwrap();
    }
    dir
}

#[test]
fn classes_lists_all_shapes() {
    let out = m24(&["classes", "--json"], &[]);
    assert!(out.status.success());
    let j = json(&out);
    assert_eq!(j.as_array().unwrap().len(), 21);
    assert_eq!(j[0]["weight"], "10");
}

#[test]
fn borcherds_modes_agree_and_json_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for mode in ["product", "fj", "exp"] {
        let path = dir.path().join(format!("{mode}.json"));
        let out = m24(&["borcherds", "3A", "--mode", mode, "--qmax", "2", "--smax", "2", "--json", path.to_str().unwrap()], &[]);
        assert!(out.status.success(), "{}", stderr(&out));
        docs.push(std::fs::read_to_string(path).unwrap());
    }
    assert!(docs.iter().all(|d| *d == docs[0]));
    let j: Value = serde_json::from_str(&docs[0]).unwrap();
    assert_eq!(j["weyl_vector"], serde_json::json!(["1", "1", "1"]));
    assert_eq!(j["weight"], "4");
}

#[test]
fn jmap_is_cached_and_deterministic() {
    let cache = tempfile::tempdir().unwrap();
    let env = [("M24_CACHE_DIR", cache.path())];
    let first = m24(&["jmap", "4B", "--json"], &env);
    let second = m24(&["jmap", "4B", "--json"], &env);
    assert!(first.status.success() && second.status.success());
    assert!(!stderr(&first).contains("served from cache"));
    assert!(stderr(&second).contains("served from cache"));
    assert_eq!(first.stdout, second.stdout);
    let uncached = m24(&["jmap", "4B", "--json"], &[]);
    assert_eq!(first.stdout, uncached.stdout);
    assert_eq!(json(&first)["integral"], true);
}

#[test]
fn editing_the_data_misses_the_cache() {
    let cache = tempfile::tempdir().unwrap();
    let data = data_copy();
    let env = [("M24_CACHE_DIR", cache.path())];
    assert!(m24(&["jmap", "2A"], &env).status.success());
    let path = data.path().join("classes.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text + "\n# edited\n").unwrap();
    let data_arg = data.path().to_str().unwrap();
    let out = m24(&["--data-dir", data_arg, "jmap", "2A"], &env);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!stderr(&out).contains("served from cache"));
}

#[test]
fn tampered_table_row_is_rejected_by_name() {
    let data = data_copy();
    let path = data.path().join("appendix_a.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("rows = [[2, -4], [-4, 8, -8], [2, -8, 20, -28]]", "rows = [[2, -4], [-4, 8, -8], [2, -8, 21, -28]]", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    let out = m24(&["--data-dir", data.path().to_str().unwrap(), "classes"], &[]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("12B") && err.contains("q^2"), "{err}");
}

#[test]
fn malformed_toml_reports_a_line() {
    let data = data_copy();
    std::fs::write(data.path().join("ttilde.toml"), "[[class]]\nname = \n").unwrap();
    let out = m24(&["--data-dir", data.path().to_str().unwrap(), "classes"], &[]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn verify_exit_codes() {
    let pass = m24(&["verify", "weyl", "weights", "--class", "2B", "--class", "23AB", "--json"], &[]);
    assert!(pass.status.success());
    let j = json(&pass);
    assert_eq!(j["status"], "pass");
    assert_eq!(j["checks"].as_array().unwrap().len(), 4);
    // 12B has an even principal part, which the published square-root list does not include
    let fail = m24(&["verify", "classification", "--class", "12B"], &[]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));
}

#[test]
fn correction_table_and_corrected_lift_for_4c() {
    let out = m24(&["verify", "appendix-b", "thm14", "--class", "4C"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn divisors_and_errors() {
    let out = m24(&["divisors", "1A", "--dmax", "1", "--json"], &[]);
    let j = json(&out);
    assert_eq!(j["divisors"].as_array().unwrap().len(), 1);
    assert_eq!(j["divisors"][0]["multiplicity"], "2");
    let bad = m24(&["genus", "13Z"], &[]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("unknown class"));
}
