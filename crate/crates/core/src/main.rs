use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trikernel::diagnostic::{sort_diagnostics, Diagnostic};
use trikernel::kernel::Session;
use trikernel::lattice::{self, AtomTable, LatticeError};
use trikernel::modality::{cell_search, normalize, ModalityWord, DEFAULT_SEARCH_DEPTH};
use trikernel::prelude::{self, PreludeSource};
use trikernel::stdlib::{self, Manifest};

#[derive(Parser)]
#[command(name = "trikernel", version, about = "Checker for triangulated type theory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct KernelOpts {
    /// Prelude to load instead of the built-in one (default: $TTT_PRELUDE).
    #[arg(long, value_name = "PATH")]
    prelude: Option<PathBuf>,
    /// Start from an empty environment.
    #[arg(long, conflicts_with = "prelude")]
    no_prelude: bool,
    /// Emit one JSON object per diagnostic.
    #[arg(long)]
    json: bool,
    /// Bound on 2-cell search.
    #[arg(long, default_value_t = DEFAULT_SEARCH_DEPTH)]
    depth: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check source files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: KernelOpts,
    },
    /// Query the mode theory.
    #[command(subcommand)]
    Mode(ModeCmd),
    /// Query the interval lattice.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Run the checked corpus.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Inspect the prelude.
    #[command(subcommand)]
    Prelude(PreludeCmd),
}

#[derive(Subcommand)]
enum ModeCmd {
    /// Print the normal form of a word such as `g.a`.
    Normalize { word: String },
    /// Search for a 2-cell SRC => DST.
    Cell {
        src: String,
        dst: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_DEPTH)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Canonical antichain form.
    Nf { expr: String },
    /// Equality in the free bounded distributive lattice.
    Eq { lhs: String, rhs: String },
    /// Order in the free bounded distributive lattice.
    Leq { lhs: String, rhs: String },
    /// Endpoints p(0), p(1) of EXPR as a function of ATOM.
    Phoa { expr: String, atom: String },
    /// Size of the free bounded distributive lattice on N generators.
    Count { n: usize },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Check every file of a manifest against its expectation.
    Run {
        #[arg(default_value = stdlib::DEFAULT_MANIFEST)]
        manifest: PathBuf,
        #[command(flatten)]
        opts: KernelOpts,
    },
}

#[derive(Subcommand)]
enum PreludeCmd {
    /// Check the prelude and print its coverage table.
    Verify {
        #[arg(long, value_name = "PATH")]
        prelude: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_DEPTH)]
        depth: usize,
    },
}

/// Diagnostics were produced.
const EXIT_DIAG: u8 = 1;
/// Bad input: unreadable files, malformed arguments.
const EXIT_USAGE: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("trikernel: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Check { files, opts } => cmd_check(&files, &opts),
        Cmd::Mode(m) => cmd_mode(m),
        Cmd::Lattice(l) => cmd_lattice(l),
        Cmd::Corpus(CorpusCmd::Run { manifest, opts }) => cmd_corpus(&manifest, &opts),
        Cmd::Prelude(PreludeCmd::Verify {
            prelude,
            json,
            depth,
        }) => cmd_prelude(prelude, json, depth),
    }
}

/// A session with the prelude loaded, or the exit code to stop with.
fn base_session(opts: &KernelOpts) -> Result<Session, ExitCode> {
    if opts.no_prelude {
        return Ok(Session::new(opts.depth));
    }
    let source = PreludeSource::resolve(opts.prelude.as_deref())
        .map_err(|e| fail(format!("cannot read prelude: {e}")))?;
    let (session, report) = prelude::load_prelude(&source, opts.depth);
    if !report.is_clean() {
        emit(&report.diagnostics, opts.json);
        return Err(ExitCode::from(EXIT_DIAG));
    }
    Ok(session)
}

fn emit(diags: &[Diagnostic], json: bool) {
    let mut out = std::io::stdout().lock();
    for d in diags {
        let _ = if json {
            writeln!(out, "{}", d.to_json())
        } else {
            writeln!(out, "{d}")
        };
    }
}

fn cmd_check(files: &[PathBuf], opts: &KernelOpts) -> ExitCode {
    let base = match base_session(opts) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let mut sources = Vec::new();
    for f in files {
        match std::fs::read_to_string(f) {
            Ok(s) => sources.push((f, s)),
            Err(e) => return fail(format!("{}: {e}", f.display())),
        }
    }
    let mut all = Vec::new();
    for (path, src) in &sources {
        let mut session = base.clone();
        let report = session.check_source(&path.display().to_string(), src, path.parent());
        all.extend(report.diagnostics);
    }
    sort_diagnostics(&mut all);
    emit(&all, opts.json);
    if all.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DIAG)
    }
}

fn parse_word(s: &str) -> Result<ModalityWord, ExitCode> {
    s.parse::<ModalityWord>()
        .map_err(|e| fail(format!("bad modality word `{s}`: {}", e.0)))
}

fn cmd_mode(cmd: ModeCmd) -> ExitCode {
    match cmd {
        ModeCmd::Normalize { word } => match parse_word(&word) {
            Ok(w) => {
                println!("{}", normalize(&w));
                ExitCode::SUCCESS
            }
            Err(c) => c,
        },
        ModeCmd::Cell { src, dst, depth } => {
            let (s, d) = match (parse_word(&src), parse_word(&dst)) {
                (Ok(s), Ok(d)) => (s, d),
                (Err(c), _) | (_, Err(c)) => return c,
            };
            match cell_search(&s, &d, depth) {
                Some(cell) => println!("{cell}"),
                None => println!("none (depth {depth})"),
            }
            ExitCode::SUCCESS
        }
    }
}

fn lattice_fail(e: LatticeError) -> ExitCode {
    let code = if e.code() == trikernel::diagnostic::Code::LatticeSize {
        EXIT_DIAG
    } else {
        EXIT_USAGE
    };
    eprintln!("trikernel: {}: {e}", e.code());
    ExitCode::from(code)
}

fn cmd_lattice(cmd: LatticeCmd) -> ExitCode {
    let mut atoms = AtomTable::new();
    let poly = |s: &str, atoms: &mut AtomTable| {
        lattice::parse_expr(s, atoms).map(|e| lattice::canon(&e))
    };
    let result = match &cmd {
        LatticeCmd::Nf { expr } => poly(expr, &mut atoms).map(|p| atoms.render(&p)),
        LatticeCmd::Eq { lhs, rhs } | LatticeCmd::Leq { lhs, rhs } => {
            poly(lhs, &mut atoms).and_then(|p| {
                let q = poly(rhs, &mut atoms)?;
                Ok(match cmd {
                    LatticeCmd::Eq { .. } => lattice::eq(&p, &q),
                    _ => lattice::leq(&p, &q),
                }
                .to_string())
            })
        }
        LatticeCmd::Phoa { expr, atom } => poly(expr, &mut atoms).map(|p| {
            let x = atoms.intern(atom);
            let (p0, p1) = lattice::phoa_endpoints(&p, x);
            format!("({}, {})", atoms.render(&p0), atoms.render(&p1))
        }),
        LatticeCmd::Count { n } => lattice::count_free(*n).map(|c| c.to_string()),
    };
    match result {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => lattice_fail(e),
    }
}

fn cmd_corpus(path: &std::path::Path, opts: &KernelOpts) -> ExitCode {
    let manifest = match Manifest::load(path) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let base = match base_session(opts) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let report = stdlib::run_corpus(&manifest, &base);
    if opts.json {
        println!(
            "{}",
            serde_json::to_string(&report).expect("reports always serialize")
        );
    } else {
        for f in &report.files {
            let status = if f.passed { "ok  " } else { "FAIL" };
            println!(
                "{status} {:<32} {:<18} {:>7.1} ms",
                f.file,
                f.expect.to_string(),
                f.elapsed.as_secs_f64() * 1e3
            );
            if let Some(r) = &f.reason {
                println!("       {r}");
                for d in &f.diagnostics {
                    println!("       {d}");
                }
            }
        }
        for a in &report.missing_anchors {
            println!("missing anchor: {a}");
        }
        let passed = report.files.iter().filter(|f| f.passed).count();
        println!(
            "{passed}/{} files as expected in {:.1} ms",
            report.files.len(),
            report.elapsed.as_secs_f64() * 1e3
        );
    }
    if report.is_ok() && report.missing_anchors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DIAG)
    }
}

fn cmd_prelude(path: Option<PathBuf>, json: bool, depth: usize) -> ExitCode {
    let source = match PreludeSource::resolve(path.as_deref()) {
        Ok(s) => s,
        Err(e) => return fail(format!("cannot read prelude: {e}")),
    };
    let report = match prelude::verify_prelude(&source, depth) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if json {
        println!(
            "{}",
            serde_json::to_string(&report).expect("reports always serialize")
        );
    } else {
        emit(&report.diagnostics, false);
        for (label, names) in &report.coverage {
            let names = if names.is_empty() {
                "MISSING".to_string()
            } else {
                names.join(", ")
            };
            println!("{label:<26} {names}");
        }
        for (tier, n) in &report.tier_counts {
            println!("{tier}: {n}");
        }
    }
    if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DIAG)
    }
}
