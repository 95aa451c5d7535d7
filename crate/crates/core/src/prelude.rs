//! The axiom base: loading, provenance metadata and coverage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostic::Diagnostic;
use crate::kernel::{ModuleReport, Session};
use crate::syntax::ast::DeclKind;
use crate::syntax::parse_module;

/// The prelude shipped with the crate.
pub const PRELUDE_SRC: &str = include_str!("../../../prelude/prelude.ttt");

/// Display name used in diagnostics for the embedded prelude.
pub const EMBEDDED_NAME: &str = "<prelude>";

/// Environment variable naming a replacement prelude.
pub const PRELUDE_ENV: &str = "TTT_PRELUDE";

/// Labels of the axioms every prelude must state, in order.
pub const PAPER_AXIOMS: [&str; 10] = [
    "interval",
    "p-is-interval",
    "op-of-int",
    "univalence",
    "crisp-induction",
    "int-detects-discreteness",
    "global-points",
    "cubes-separate",
    "simplicial-stability",
    "duality",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    PaperAxiom,
    PaperLemma,
    Infrastructure,
    Definition,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::PaperAxiom => "paper-axiom",
            Tier::PaperLemma => "paper-lemma",
            Tier::Infrastructure => "infrastructure",
            Tier::Definition => "definition",
        }
    }

    fn parse(s: &str) -> Option<Tier> {
        [
            Tier::PaperAxiom,
            Tier::PaperLemma,
            Tier::Infrastructure,
            Tier::Definition,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One prelude declaration with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomEntry {
    pub name: String,
    /// Whether the entry is postulated rather than defined.
    pub postulate: bool,
    /// Binders and declared type as written.
    pub ty: String,
    pub tier: Tier,
    pub axiom: Option<String>,
    pub statement_only: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum MetaError {
    #[error("line {line}: unknown tier `{word}`")]
    UnknownTier { line: usize, word: String },
    #[error("line {line}: unknown axiom label `{word}`")]
    UnknownAxiom { line: usize, word: String },
    #[error("line {line}: metadata line is not followed by a declaration")]
    Dangling { line: usize },
    #[error("prelude does not parse: {0}")]
    Parse(String),
}

#[derive(Default)]
struct Meta {
    tier: Option<Tier>,
    axiom: Option<String>,
    statement_only: bool,
    line: usize,
}

fn parse_meta(line: usize, text: &str) -> Result<Meta, MetaError> {
    let mut meta = Meta {
        line,
        ..Meta::default()
    };
    let mut words = text.split_whitespace();
    let first = words.next().unwrap_or("");
    meta.tier = Some(Tier::parse(first).ok_or_else(|| MetaError::UnknownTier {
        line,
        word: first.to_string(),
    })?);
    for w in words {
        if w == "statement-only" {
            meta.statement_only = true;
        } else if PAPER_AXIOMS.contains(&w) {
            meta.axiom = Some(w.to_string());
        } else {
            return Err(MetaError::UnknownAxiom {
                line,
                word: w.to_string(),
            });
        }
    }
    Ok(meta)
}

/// Reads the declarations of a prelude source together with their metadata.
pub fn entries(src: &str) -> Result<Vec<AxiomEntry>, MetaError> {
    let module = parse_module(src).map_err(|r| MetaError::Parse(r.message))?;
    // Metadata lines keyed by the byte offset of the line that follows them.
    let mut pending: BTreeMap<usize, Meta> = BTreeMap::new();
    let mut offset = 0;
    let mut waiting: Option<Meta> = None;
    for (i, line) in src.split_inclusive('\n').enumerate() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("--|") {
            if let Some(prev) = waiting.take() {
                return Err(MetaError::Dangling { line: prev.line });
            }
            waiting = Some(parse_meta(i + 1, rest)?);
        } else if let Some(m) = waiting.take() {
            if trimmed.is_empty() || trimmed.starts_with("--") {
                return Err(MetaError::Dangling { line: m.line });
            }
            pending.insert(offset, m);
        }
        offset += line.len();
    }
    if let Some(m) = waiting {
        return Err(MetaError::Dangling { line: m.line });
    }
    let mut out = Vec::new();
    for decl in &module.decls {
        let meta = pending.remove(&decl.span.start).unwrap_or_default();
        let ty_text = src[decl.name.span.end..decl.ty.span.end].split_whitespace();
        out.push(AxiomEntry {
            name: decl.name.name.clone(),
            postulate: matches!(decl.kind, DeclKind::Axiom),
            ty: ty_text.collect::<Vec<_>>().join(" "),
            tier: meta.tier.unwrap_or(Tier::Definition),
            axiom: meta.axiom,
            statement_only: meta.statement_only,
        });
    }
    if let Some((_, m)) = pending.into_iter().next() {
        return Err(MetaError::Dangling { line: m.line });
    }
    Ok(out)
}

/// Where the prelude came from.
#[derive(Clone, Debug)]
pub struct PreludeSource {
    pub name: String,
    pub text: String,
}

impl PreludeSource {
    pub fn embedded() -> Self {
        PreludeSource {
            name: EMBEDDED_NAME.to_string(),
            text: PRELUDE_SRC.to_string(),
        }
    }

    pub fn from_path(path: &Path) -> std::io::Result<Self> {
        Ok(PreludeSource {
            name: path.display().to_string(),
            text: std::fs::read_to_string(path)?,
        })
    }

    /// An explicit path wins, then the environment variable, then the
    /// embedded copy.
    pub fn resolve(flag: Option<&Path>) -> std::io::Result<Self> {
        if let Some(p) = flag {
            return Self::from_path(p);
        }
        match std::env::var_os(PRELUDE_ENV) {
            Some(p) if !p.is_empty() => Self::from_path(&PathBuf::from(p)),
            _ => Ok(Self::embedded()),
        }
    }
}

/// Checks the prelude into a fresh session.
pub fn load_prelude(source: &PreludeSource, depth: usize) -> (Session, ModuleReport) {
    let mut session = Session::new(depth);
    let report = session.check_source(&source.name, &source.text, None);
    (session, report)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryResult {
    pub entry: AxiomEntry,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreludeReport {
    pub entries: Vec<EntryResult>,
    pub diagnostics: Vec<Diagnostic>,
    /// Each required axiom label with the entries claiming it.
    pub coverage: Vec<(String, Vec<String>)>,
    pub tier_counts: BTreeMap<Tier, usize>,
}

impl PreludeReport {
    pub fn missing_axioms(&self) -> Vec<&str> {
        self.coverage
            .iter()
            .filter(|(_, names)| names.is_empty())
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// Labels claimed by more than one paper-axiom entry.
    pub fn duplicated_axioms(&self) -> Vec<&str> {
        self.coverage
            .iter()
            .filter(|(_, names)| names.len() > 1)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
            && self.entries.iter().all(|e| e.ok)
            && self.missing_axioms().is_empty()
            && self.duplicated_axioms().is_empty()
    }
}

/// Checks every entry and tabulates axiom coverage.
pub fn verify_prelude(source: &PreludeSource, depth: usize) -> Result<PreludeReport, MetaError> {
    let metas = entries(&source.text)?;
    let (_, report) = load_prelude(source, depth);
    let ok: BTreeMap<&str, bool> = report
        .decls
        .iter()
        .map(|d| (d.name.as_str(), d.ok))
        .collect();
    let mut tier_counts = BTreeMap::new();
    for e in &metas {
        *tier_counts.entry(e.tier).or_insert(0) += 1;
    }
    let coverage = PAPER_AXIOMS
        .iter()
        .map(|label| {
            let names = metas
                .iter()
                .filter(|e| e.tier == Tier::PaperAxiom && e.axiom.as_deref() == Some(label))
                .map(|e| e.name.clone())
                .collect();
            (label.to_string(), names)
        })
        .collect();
    let entries = metas
        .into_iter()
        .map(|entry| {
            let ok = ok.get(entry.name.as_str()).copied().unwrap_or(false);
            EntryResult { entry, ok }
        })
        .collect();
    Ok(PreludeReport {
        entries,
        diagnostics: report.diagnostics,
        coverage,
        tier_counts,
    })
}

/// Prelude entries reached from none of `roots` through the globals each
/// declaration mentions, minus those marked statement-only.
pub fn dead_entries(
    entries: &[AxiomEntry],
    prelude: &ModuleReport,
    roots: &BTreeSet<String>,
) -> Vec<String> {
    let uses: BTreeMap<&str, &BTreeSet<String>> = prelude
        .decls
        .iter()
        .map(|d| (d.name.as_str(), &d.uses))
        .collect();
    let mut live: BTreeSet<String> = BTreeSet::new();
    let mut stack: Vec<String> = roots.iter().cloned().collect();
    while let Some(n) = stack.pop() {
        if !live.insert(n.clone()) {
            continue;
        }
        if let Some(next) = uses.get(n.as_str()) {
            stack.extend(next.iter().filter(|m| !live.contains(*m)).cloned());
        }
    }
    entries
        .iter()
        .filter(|e| !e.statement_only && !live.contains(&e.name))
        .map(|e| e.name.clone())
        .collect()
}
