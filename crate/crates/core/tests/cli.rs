use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trikernel"))
        .args(args)
        .current_dir(root())
        .env_remove("TTT_PRELUDE")
        .output()
        .expect("run trikernel")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(root().join("docs/diagnostic.schema.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&json).expect("schema compiles")
}

#[test]
fn mode_queries() {
    let o = run(&["mode", "normalize", "g.a"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "g");
    assert_eq!(stdout(&run(&["mode", "normalize", "o.o.s.g"])), "s");
    assert_eq!(stdout(&run(&["mode", "cell", "g", "1"])), "eps0");
    let o = run(&["mode", "cell", "s", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "none (depth 8)");
}

#[test]
fn lattice_queries() {
    assert_eq!(stdout(&run(&["lattice", "count", "3"])), "20");
    assert_eq!(stdout(&run(&["lattice", "phoa", "y \\/ (x /\\ z)", "x"])), "(y, y\\/z)");
    let eq = run(&["lattice", "eq", "x /\\ (y \\/ z)", "(x /\\ y) \\/ (x /\\ z)"]);
    assert_eq!(stdout(&eq), "true");
    assert_eq!(stdout(&run(&["lattice", "eq", "x", "y"])), "false");
    assert_eq!(stdout(&run(&["lattice", "leq", "x /\\ y", "x"])), "true");
    assert_eq!(stdout(&run(&["lattice", "nf", "x \\/ (x /\\ y)"])), "x");
}

#[test]
fn oversized_enumeration_is_refused() {
    let o = run(&["lattice", "count", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E-LATTICE-SIZE"));
}

#[test]
fn check_exit_codes() {
    let ok = run(&["check", "stdlib/hom.ttt"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).is_empty());
    assert_eq!(run(&["check", "missing.ttt"]).status.code(), Some(2));
    assert_eq!(run(&["check", "stdlib/neg/int-bool.ttt"]).status.code(), Some(1));
}

#[test]
fn json_diagnostics_are_line_delimited_and_valid() {
    let schema = schema();
    let o = run(&["check", "stdlib/neg/escape-s.ttt", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 1);
    let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert!(schema.is_valid(&v));
    assert_eq!(v["code"], "E-MODALITY");

    for f in std::fs::read_dir(root().join("stdlib/neg")).unwrap().flatten() {
        let rel = format!("stdlib/neg/{}", f.file_name().to_string_lossy());
        let o = run(&["check", &rel, "--json"]);
        assert_eq!(o.status.code(), Some(1), "{rel}");
        for line in stdout(&o).lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(schema.is_valid(&v), "{rel}: {line}");
        }
    }
}

#[test]
fn schema_rejects_malformed_diagnostics() {
    let schema = schema();
    let good = serde_json::json!({
        "file": "a.ttt", "start": 0, "end": 1, "line": 1, "column": 1,
        "code": "E-CONV", "message": "m"
    });
    assert!(schema.is_valid(&good));
    let mut bad_code = good.clone();
    bad_code["code"] = "E-NOPE".into();
    assert!(!schema.is_valid(&bad_code));
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("line");
    assert!(!schema.is_valid(&missing));
}

#[test]
fn prelude_flag_and_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.ttt");
    std::fs::write(&empty, "").unwrap();
    let empty = empty.to_str().unwrap();
    let o = run(&["check", "--prelude", empty, "stdlib/hom.ttt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("E-UNBOUND"));
    let o = Command::new(env!("CARGO_BIN_EXE_trikernel"))
        .args(["check", "stdlib/hom.ttt"])
        .current_dir(root())
        .env("TTT_PRELUDE", empty)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corpus_and_prelude_commands() {
    let o = run(&["corpus", "run"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("17/17"));
    let o = run(&["prelude", "verify"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("paper-axiom: 10"));
}
