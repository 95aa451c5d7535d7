use std::path::PathBuf;

use trikernel::diagnostic::Code;
use trikernel::prelude::{self, PreludeSource};
use trikernel::stdlib::{self, find_marker, Expect, Manifest, REQUIRED_ANCHORS};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn manifest() -> Manifest {
    Manifest::load(&root().join(stdlib::DEFAULT_MANIFEST)).expect("manifest loads")
}

fn base() -> trikernel::kernel::Session {
    let (s, r) = prelude::load_prelude(&PreludeSource::embedded(), 8);
    assert!(r.is_clean());
    s
}

#[test]
fn corpus_meets_every_expectation() {
    let report = stdlib::run_corpus(&manifest(), &base());
    for f in &report.files {
        assert!(f.passed, "{}: {:?}\n{:#?}", f.file, f.reason, f.diagnostics);
    }
    assert!(report.missing_anchors.is_empty());
}

#[test]
fn corpus_has_required_shape() {
    let m = manifest();
    let pass = m.entries.iter().filter(|e| e.expect == Expect::Pass).count();
    let fail = m.entries.len() - pass;
    assert!(pass >= 10 && fail >= 6);
    for code in [
        Code::Modality,
        Code::TwoCellBoundary,
        Code::Universe,
        Code::Conv,
        Code::Unbound,
        Code::Parse,
    ] {
        assert!(m.entries.iter().any(|e| e.expect == Expect::Fail(code)), "{code}");
    }
    assert_eq!(m.missing_anchors(), Vec::<&str>::new());
    assert!(REQUIRED_ANCHORS.iter().all(|a| m.anchors().contains(a)));
    assert!(!m.notes.is_empty());
}

#[test]
fn no_dead_prelude_entries() {
    let report = stdlib::run_corpus(&manifest(), &base());
    let src = PreludeSource::embedded();
    let entries = prelude::entries(&src.text).unwrap();
    let (_, pre) = prelude::load_prelude(&src, 8);
    let mut roots = report.uses();
    // The axioms are roots in their own right.
    for e in &entries {
        if e.axiom.is_some() {
            roots.insert(e.name.clone());
        }
    }
    let dead = prelude::dead_entries(&entries, &pre, &roots);
    assert!(dead.is_empty(), "unused prelude entries: {dead:?}");
}

#[test]
fn flipping_delta2_operators_is_detected() {
    let dir = root().join("stdlib");
    let text = std::fs::read_to_string(dir.join("simplices.ttt")).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("def Delta2"))
        .expect("Delta2 definition");
    let ops: Vec<usize> = line
        .match_indices("/\\")
        .chain(line.match_indices("\\/"))
        .map(|(i, _)| i)
        .collect();
    assert!(!ops.is_empty());
    for i in ops {
        let flipped_op = if &line[i..i + 2] == "/\\" { "\\/" } else { "/\\" };
        let mutated_line = format!("{}{}{}", &line[..i], flipped_op, &line[i + 2..]);
        let mutated = text.replacen(line, &mutated_line, 1);
        let mut s = base();
        let r = s.check_source("simplices.ttt", &mutated, Some(&dir));
        assert!(
            r.diagnostics.iter().any(|d| d.code == Code::Conv),
            "mutation at {i} went unnoticed"
        );
    }
}

#[test]
fn empty_manifest_passes() {
    let m = Manifest::parse("version 1\n", root()).unwrap();
    let r = stdlib::run_corpus(&m, &base());
    assert!(r.files.is_empty() && r.is_ok());
}

#[test]
fn manifest_errors() {
    assert!(Manifest::parse("a.ttt | pass | - | -\n", root()).is_err());
    assert!(Manifest::parse("version 2\n", root()).is_err());
    assert!(Manifest::parse("version 1\na.ttt | pass\n", root()).is_err());
    assert!(Manifest::parse("version 1\na.ttt | E-NOPE | - | -\n", root()).is_err());
    assert!(Manifest::parse("version 1\na.ttt | pass | - | b\nb.ttt | pass | - | -\n", root()).is_err());
}

#[test]
fn markers() {
    let src = "--@ E-CONV := [[0]]\ndef b : Bool := 0\n";
    let m = find_marker(src).unwrap();
    assert_eq!(m.code, Code::Conv);
    assert_eq!(&src[m.start..m.end], "0");
    assert_eq!(m.start, src.rfind('0').unwrap());
    let m = find_marker("--@ E-PARSE :=\ndef x : := y\n").unwrap();
    assert_eq!((m.start, m.end), (23, 25));
    assert!(find_marker("def x : Nat := 0").is_none());
}
