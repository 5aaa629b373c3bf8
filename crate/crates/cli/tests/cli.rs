use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lamtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamtree"))
        .args(args)
        .arg("--jobs")
        .arg("1")
        .output()
        .expect("run lamtree")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

#[test]
fn length_of_a_word() {
    let out = lamtree(&["length", "builtin:gamma-b", "b a c b'"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["conjugator"], "b");
    assert_eq!(v["result"]["core"], "a c");
    assert_eq!(v["result"]["translation_length"]["value"], "2");
    assert_eq!(v["result"]["translation_length"]["kind"], "exact");
    // the table goes to stderr when the report takes stdout
    assert!(String::from_utf8_lossy(&out.stderr).contains("translation length"));
}

#[test]
fn free_simplicial_models_have_no_short_elements() {
    let out = lamtree(&["omega", "builtin:unit-rose", "--eps", "0.5", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["size"], 0);
    assert_eq!(v["notes"][0], "free simplicial");
}

#[test]
fn exit_codes() {
    // undercount: the cap is below twice the depth
    let out = lamtree(&[
        "lang",
        "builtin:collapsed-rose",
        "--depth",
        "4",
        "--cap",
        "6",
        "--eps",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["flags"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "undercount"));

    for args in [
        &["length", "builtin:nowhere", "a"][..],
        &["length", "builtin:gamma-b", "a q"],
        &["length", "builtin:gamma-b", "a a'"],
        &["lang", "builtin:gamma-b", "--eps", "0.5,1"],
        &["length", "/no/such/model.json", "a"],
    ] {
        let out = lamtree(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn compare_agrees_with_itself_and_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let lang = |eps: &str, path: &Path| {
        let out = lamtree(&["lang", "builtin:gamma-b", "--depth", "3", "--eps", eps]);
        fs::write(path, serde_json::to_string(&json(&out)["result"]["language"]).unwrap()).unwrap();
    };
    lang("1", &a);
    lang("2.5", &b);
    let same = lamtree(&["compare", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(json(&same)["result"]["verdict"], "equal");
    let diff = json(&lamtree(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]));
    assert_eq!(diff["result"]["verdict"], "different");
    assert!(diff["result"]["left_minus_right"].as_array().unwrap().is_empty());
    assert!(!diff["result"]["right_minus_left"].as_array().unwrap().is_empty());
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = lamtree(&[
        "length",
        "builtin:collapsed-rose",
        "a c",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("translation length"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["translation_length"]["value"], "1");
}

#[test]
fn cache_directory_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_arg = cache.to_str().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["length", "builtin:tribonacci", "a b' c a'"];
        args.extend_from_slice(extra);
        lamtree(&args)
    };
    let plain = run(&[]);
    let cold = run(&["--cache-dir", cache_arg]);
    let warm = run(&["--cache-dir", cache_arg]);
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(cold.stdout, warm.stdout);
    assert!(String::from_utf8_lossy(&warm.stderr).find("warning").is_none());

    let entries: Vec<PathBuf> = walk(&cache);
    assert!(!entries.is_empty());
    for e in &entries {
        fs::write(e, "{not json").unwrap();
    }
    let rebuilt = run(&["--cache-dir", cache_arg]);
    assert_eq!(rebuilt.status.code(), Some(0));
    assert_eq!(rebuilt.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&rebuilt.stderr).contains("warning: corrupt cache entry"));
    // the entries were rewritten
    let again = run(&["--cache-dir", cache_arg]);
    assert!(!String::from_utf8_lossy(&again.stderr).contains("corrupt"));
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn job_files() {
    let jobs = models_dir().join("jobs.json");
    let out = lamtree(&["report", jobs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert_eq!(reports[0]["result"]["size"], 12);
    assert_eq!(reports[1]["result"]["size"], 8);
    assert_eq!(reports[3]["result"]["certified"]["value"], 1);
    // a flag on the command line overrides the file
    let out = lamtree(&["report", jobs.to_str().unwrap(), "--depth", "5", "--cap", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "flagged");
}

#[test]
fn shipped_model_files_load() {
    let dir = models_dir();
    for (model, word, value) in [
        ("unit_rose.json", "a b", "2"),
        ("collapsed_rose.json", "a c", "1"),
        ("gamma_b.json", "a c", "2"),
        ("two_vertex.json", "a c", "2"),
        ("twisted_collapsed_rose.json", "a", "1"),
    ] {
        let path = dir.join(model);
        let out = lamtree(&["length", path.to_str().unwrap(), word]);
        assert_eq!(out.status.code(), Some(0), "{model}");
        assert_eq!(json(&out)["result"]["translation_length"]["value"], value, "{model}");
    }
    let out = lamtree(&[
        "l1",
        "builtin:collapsed-rose",
        "--rays",
        dir.join("rays.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["verdicts"][0]["member"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "qpair",
        "builtin:collapsed-rose",
        "--depth",
        "3",
        "--prefix-cap",
        "2",
        "--period-cap",
        "2",
    ];
    let first = lamtree(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_lamtree"))
        .args(args)
        .args(["--jobs", "4"])
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}
