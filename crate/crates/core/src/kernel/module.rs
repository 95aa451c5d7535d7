//! Checking whole files: imports, declarations and the global environment.

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic, Report};
use crate::modality::DEFAULT_SEARCH_DEPTH;
use crate::syntax::ast::{Decl, DeclKind, Expr, ExprKind, LamParam};
use crate::syntax::parse_module;

use super::check::Checker;
use super::ctx::Ctx;
use super::eval::Env;

/// Outcome of one declaration.
#[derive(Clone, Debug)]
pub struct DeclOutcome {
    pub name: String,
    pub ok: bool,
    /// Globals mentioned by the elaborated type and body.
    pub uses: BTreeSet<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ModuleReport {
    pub diagnostics: Vec<Diagnostic>,
    pub decls: Vec<DeclOutcome>,
}

impl ModuleReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// A checking session: one global environment shared by every file loaded.
#[derive(Clone)]
pub struct Session {
    pub env: Env,
    pub depth: usize,
    loaded: HashSet<PathBuf>,
    /// Extra directories searched by `import`.
    pub search: Vec<PathBuf>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(DEFAULT_SEARCH_DEPTH)
    }
}

impl Session {
    pub fn new(depth: usize) -> Self {
        Session {
            env: Env::new(),
            depth,
            loaded: HashSet::new(),
            search: Vec::new(),
        }
    }

    /// Checks a file once; later calls with the same path are no-ops.
    pub fn load_file(&mut self, path: &Path) -> std::io::Result<ModuleReport> {
        let key = path.canonicalize()?;
        if !self.loaded.insert(key) {
            return Ok(ModuleReport::default());
        }
        let src = std::fs::read_to_string(path)?;
        Ok(self.check_source(&path.display().to_string(), &src, path.parent()))
    }

    fn resolve_import(&self, name: &str, dir: Option<&Path>) -> Option<PathBuf> {
        let file = format!("{name}.ttt");
        dir.into_iter()
            .chain(self.search.iter().map(PathBuf::as_path))
            .map(|d| d.join(&file))
            .find(|p| p.is_file())
    }

    pub fn check_source(&mut self, file: &str, src: &str, dir: Option<&Path>) -> ModuleReport {
        let mut report = ModuleReport::default();
        let module = match parse_module(src) {
            Ok(m) => m,
            Err(r) => {
                report.diagnostics.push(r.into_diagnostic(file, src));
                return report;
            }
        };
        for imp in &module.imports {
            match self.resolve_import(&imp.name, dir) {
                Some(path) => match self.load_file(&path) {
                    Ok(sub) => {
                        report.diagnostics.extend(sub.diagnostics);
                    }
                    Err(e) => report.diagnostics.push(
                        Report::new(
                            Code::Unbound,
                            imp.span,
                            format!("cannot read module `{}`: {e}", imp.name),
                        )
                        .into_diagnostic(file, src),
                    ),
                },
                None => report.diagnostics.push(
                    Report::new(
                        Code::Unbound,
                        imp.span,
                        format!("no module named `{}`", imp.name),
                    )
                    .into_diagnostic(file, src),
                ),
            }
        }
        for decl in &module.decls {
            let result = self.check_decl(decl);
            let (ok, uses) = match result {
                Ok(uses) => (true, uses),
                Err(r) => {
                    report.diagnostics.push(r.into_diagnostic(file, src));
                    (false, BTreeSet::new())
                }
            };
            report.decls.push(DeclOutcome {
                name: decl.name.name.clone(),
                ok,
                uses,
            });
        }
        sort_diagnostics(&mut report.diagnostics);
        report
    }

    /// Checks one declaration, extending the environment on success.
    /// Returns the globals the declaration mentions.
    pub fn check_decl(&mut self, decl: &Decl) -> Result<BTreeSet<String>, Report> {
        let name = &decl.name.name;
        let adds = matches!(decl.kind, DeclKind::Def | DeclKind::Axiom);
        if adds && self.env.contains(name) {
            return Err(Report::new(
                Code::Parse,
                decl.name.span,
                format!("`{name}` is already defined"),
            ));
        }
        let outcome = self.elaborate(decl);
        match (&decl.kind, outcome) {
            (DeclKind::FailCheck(code), Err((_, r))) if r.code == *code => Ok(BTreeSet::new()),
            (DeclKind::FailCheck(code), Ok(_)) => Err(Report::new(
                *code,
                decl.name.span,
                format!("expected `{name}` to fail with {code}, but checking succeeded"),
            )),
            (_, Err((ty, r))) => {
                // Keep later declarations checkable against the stated type.
                if let (Some(ty), true) = (ty, adds) {
                    self.env.insert(name, ty, None);
                }
                Err(r)
            }
            (DeclKind::Check, Ok((ty, def))) => Ok(mentions(&ty, def.as_ref())),
            (_, Ok((ty, def))) => {
                let uses = mentions(&ty, def.as_ref());
                self.env.insert(name, ty, def);
                Ok(uses)
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn elaborate(
        &self,
        decl: &Decl,
    ) -> Result<(super::term::Tm, Option<super::term::Tm>), (Option<super::term::Tm>, Report)> {
        let checker = Checker::with_depth(&self.env, self.depth);
        let ctx = Ctx::empty();
        let ty_expr = if decl.binders.is_empty() {
            decl.ty.clone()
        } else {
            Expr {
                span: decl.ty.span,
                kind: ExprKind::Pi {
                    binders: decl.binders.clone(),
                    cod: Box::new(decl.ty.clone()),
                },
            }
        };
        let (ty, _) = checker.check_type(&ctx, &ty_expr).map_err(|r| (None, r))?;
        let def = match &decl.body {
            None => None,
            Some(body) => {
                let body_expr = if decl.binders.is_empty() {
                    body.clone()
                } else {
                    Expr {
                        span: body.span,
                        kind: ExprKind::Lam {
                            params: decl.binders.iter().cloned().map(LamParam::Typed).collect(),
                            body: Box::new(body.clone()),
                        },
                    }
                };
                Some(
                    checker
                        .check(&ctx, &body_expr, &ty)
                        .map_err(|r| (Some(ty.clone()), r))?,
                )
            }
        };
        if def.is_none() && matches!(decl.kind, DeclKind::Def) {
            return Err((
                Some(ty),
                Report::new(Code::Parse, decl.span, "definition without a body"),
            ));
        }
        Ok((ty, def))
    }
}

fn mentions(ty: &super::term::Tm, def: Option<&super::term::Tm>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    ty.constants(&mut out);
    if let Some(d) = def {
        d.constants(&mut out);
    }
    out
}
