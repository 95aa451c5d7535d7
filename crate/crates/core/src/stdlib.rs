//! The checked corpus: a manifest of `.ttt` files, each expected either to
//! check cleanly or to fail with one designated code at a marked span.

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::diagnostic::{Code, Diagnostic};
use crate::kernel::Session;

/// Version accepted in the manifest's `version` line.
pub const MANIFEST_VERSION: u32 = 1;

/// Default manifest location, relative to the repository root.
pub const DEFAULT_MANIFEST: &str = "corpus.manifest";

/// Marker introducing the expected diagnostic of a negative file.
pub const MARKER: &str = "--@";

/// Anchors the positive corpus must cover between them.
pub const REQUIRED_ANCHORS: &[&str] = &[
    "simplex",
    "horn",
    "boundary",
    "hom",
    "dependent-hom",
    "segal",
    "composition",
    "iso",
    "id-to-iso",
    "rezk",
    "groupoid",
    "is-simp",
    "u-simp",
    "covariant-family",
    "total-type",
    "transport",
    "acov",
    "u-acov",
    "space",
    "mor-to-fun",
    "glue",
    "directed-univalence",
    "full-subcategory",
    "truncated-spaces",
    "finset",
    "monoid",
    "monoid-naturality",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "code", rename_all = "kebab-case")]
pub enum Expect {
    Pass,
    Fail(Code),
}

impl std::fmt::Display for Expect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expect::Pass => f.write_str("pass"),
            Expect::Fail(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub expect: Expect,
    pub anchors: Vec<String>,
    pub deps: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Manifest {
    /// Directory the file paths are relative to.
    pub root: PathBuf,
    pub notes: Vec<String>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("manifest: `{file}` depends on `{dep}`, which is not listed before it")]
    Order { file: String, dep: String },
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Manifest::parse(&text, root)
    }

    /// Reads the table. Lines are `file | expect | anchors | deps`, with
    /// comma-separated lists and `-` for an empty one.
    pub fn parse(text: &str, root: PathBuf) -> Result<Manifest, ManifestError> {
        let mut m = Manifest {
            root,
            ..Manifest::default()
        };
        let mut versioned = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| ManifestError::Syntax { line, msg };
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some(v) = t.strip_prefix("version") {
                let v: u32 = v
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad version `{}`", v.trim())))?;
                if v != MANIFEST_VERSION {
                    return Err(err(format!("unsupported version {v}")));
                }
                versioned = true;
                continue;
            }
            if !versioned {
                return Err(err("expected a `version` line first".into()));
            }
            if let Some(n) = t.strip_prefix("note:") {
                m.notes.push(n.trim().to_string());
                continue;
            }
            let cols: Vec<&str> = t.split('|').map(str::trim).collect();
            let [file, expect, anchors, deps] = cols[..] else {
                return Err(err(format!("expected 4 columns, found {}", cols.len())));
            };
            let expect = match expect {
                "pass" => Expect::Pass,
                c => Expect::Fail(
                    Code::parse(c).ok_or_else(|| err(format!("unknown expectation `{c}`")))?,
                ),
            };
            let list = |s: &str| -> Vec<String> {
                if s == "-" {
                    Vec::new()
                } else {
                    s.split(',').map(|x| x.trim().to_string()).collect()
                }
            };
            m.entries.push(ManifestEntry {
                file: PathBuf::from(file),
                expect,
                anchors: list(anchors),
                deps: list(deps),
            });
        }
        m.check_order()?;
        Ok(m)
    }

    fn check_order(&self) -> Result<(), ManifestError> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            for d in &e.deps {
                if !seen.contains(d.as_str()) {
                    return Err(ManifestError::Order {
                        file: e.file.display().to_string(),
                        dep: d.clone(),
                    });
                }
            }
            seen.insert(stem(&e.file));
        }
        Ok(())
    }

    pub fn anchors(&self) -> BTreeSet<&str> {
        self.entries
            .iter()
            .filter(|e| e.expect == Expect::Pass)
            .flat_map(|e| e.anchors.iter().map(String::as_str))
            .collect()
    }

    /// Required anchors no positive file claims.
    pub fn missing_anchors(&self) -> Vec<&'static str> {
        let have = self.anchors();
        REQUIRED_ANCHORS
            .iter()
            .copied()
            .filter(|a| !have.contains(a))
            .collect()
    }
}

/// The expected diagnostic of a negative file, read from its marker line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Marker {
    pub code: Code,
    pub start: usize,
    pub end: usize,
}

/// Finds `--@ CODE snippet` and locates `snippet` in the text after that line.
/// A snippet may carry context around the expected span, written
/// `before [[span]] after`.
pub fn find_marker(src: &str) -> Option<Marker> {
    let at = src.find(MARKER)?;
    let line_end = src[at..].find('\n').map(|n| at + n).unwrap_or(src.len());
    let rest = src[at + MARKER.len()..line_end].trim();
    let (code, snippet) = rest.split_once(char::is_whitespace)?;
    let code = Code::parse(code)?;
    let snippet = snippet.trim();
    let (before, span, after) = match snippet.split_once("[[") {
        Some((b, r)) => {
            let (m, a) = r.split_once("]]")?;
            (b, m, a)
        }
        None => ("", snippet, ""),
    };
    if span.is_empty() {
        return None;
    }
    let whole = format!("{before}{span}{after}");
    let start = line_end + src[line_end..].find(&whole)? + before.len();
    Some(Marker {
        code,
        start,
        end: start + span.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FileResult {
    pub file: String,
    pub expect: Expect,
    pub passed: bool,
    pub diagnostics: Vec<Diagnostic>,
    /// Why a file failed its expectation.
    pub reason: Option<String>,
    /// Globals mentioned by the file's declarations.
    pub uses: BTreeSet<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CorpusReport {
    pub files: Vec<FileResult>,
    pub missing_anchors: Vec<String>,
    pub elapsed: Duration,
}

impl CorpusReport {
    /// Every file met its expectation. Anchor coverage is reported apart.
    pub fn is_ok(&self) -> bool {
        self.files.iter().all(|f| f.passed)
    }

    /// Everything the positive files mention.
    pub fn uses(&self) -> BTreeSet<String> {
        self.files
            .iter()
            .filter(|f| f.expect == Expect::Pass)
            .flat_map(|f| f.uses.iter().cloned())
            .collect()
    }
}

/// Checks one file in a copy of `base`, so that no file sees another's
/// declarations unless it imports them.
pub fn check_entry(base: &Session, root: &Path, entry: &ManifestEntry) -> FileResult {
    let t0 = Instant::now();
    let path = root.join(&entry.file);
    let name = entry.file.display().to_string();
    let mut result = FileResult {
        file: name.clone(),
        expect: entry.expect,
        passed: false,
        diagnostics: Vec::new(),
        reason: None,
        uses: BTreeSet::new(),
        elapsed: Duration::ZERO,
    };
    let src = match std::fs::read_to_string(&path) {
        Ok(s) => s,
        Err(e) => {
            result.reason = Some(format!("cannot read {}: {e}", path.display()));
            return result;
        }
    };
    let mut session = base.clone();
    let report = session.check_source(&name, &src, path.parent());
    result.uses = report.decls.iter().flat_map(|d| d.uses.iter().cloned()).collect();
    result.diagnostics = report.diagnostics;
    result.reason = match entry.expect {
        Expect::Pass if result.diagnostics.is_empty() => None,
        Expect::Pass => Some(format!("{} unexpected diagnostic(s)", result.diagnostics.len())),
        Expect::Fail(code) => match find_marker(&src) {
            None => Some("no `--@ CODE snippet` marker".into()),
            Some(m) if m.code != code => {
                Some(format!("marker says {}, manifest says {code}", m.code))
            }
            Some(m) => match result.diagnostics.as_slice() {
                [d] if d.code == m.code && d.start == m.start && d.end == m.end => None,
                [d] => Some(format!(
                    "expected {} at {}..{}, got {} at {}..{}",
                    m.code, m.start, m.end, d.code, d.start, d.end
                )),
                ds => Some(format!("expected exactly one diagnostic, got {}", ds.len())),
            },
        },
    };
    result.passed = result.reason.is_none();
    result.elapsed = t0.elapsed();
    result
}

/// Checks every file of the manifest against its expectation.
pub fn run_corpus(manifest: &Manifest, base: &Session) -> CorpusReport {
    let t0 = Instant::now();
    let files = manifest
        .entries
        .iter()
        .map(|e| check_entry(base, &manifest.root, e))
        .collect();
    CorpusReport {
        files,
        missing_anchors: manifest
            .missing_anchors()
            .into_iter()
            .map(String::from)
            .collect(),
        elapsed: t0.elapsed(),
    }
}
