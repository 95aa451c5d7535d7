use crate::diagnostic::{Code, Report, Span};
use crate::modality::{CellGen, Gen, ModalityWord};

use super::ast::*;
use super::lexer::{lex, Tok, Token};

/// Words that cannot be used as variable names.
pub const KEYWORDS: &[&str] = &[
    "def",
    "axiom",
    "check",
    "fail-check",
    "import",
    "fun",
    "let",
    "in",
    "return",
    "mod",
    "coe",
    "U",
    "Int",
    "Nat",
    "Bool",
    "Unit",
    "Empty",
    "tt",
    "true",
    "false",
    "zero",
    "suc",
    "natrec",
    "if",
    "J",
    "refl",
    "Id",
    "Lift",
    "lift",
    "lower",
    "absurd",
];

const MAX_DEPTH: usize = 768;

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

const STACK_BYTES: usize = 256 << 20;

/// Runs `f` on a thread whose stack fits `MAX_DEPTH` nested expressions.
fn with_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("spawn parser thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

pub fn parse_module(src: &str) -> Result<SurfaceModule, Report> {
    with_stack(|| Parser::new(src)?.module())
}

pub fn parse_expr(src: &str) -> Result<Expr, Report> {
    with_stack(|| {
        let mut p = Parser::new(src)?;
        let e = p.expr()?;
        p.expect_eof()?;
        Ok(e)
    })
}

/// Parses a standalone 2-cell such as `g <| eps_gs |> s ; eps0`.
pub fn parse_cell(src: &str) -> Result<CellExpr, Report> {
    let mut p = Parser::new(src)?;
    let c = p.cell()?;
    p.expect_eof()?;
    Ok(c)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, Report>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(Report::new(
            Code::Parse,
            self.span(),
            format!("expected {what}, found {}", Self::describe(self.peek())),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<Span> {
        if self.is_kw(s) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{s}`"))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            Tok::Sym("_") => {
                let span = self.bump().span;
                Ok(Ident {
                    name: "_".to_string(),
                    span,
                })
            }
            _ => self.error("an identifier"),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Report::new(Code::Parse, self.span(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // ---- module level ----

    fn module(&mut self) -> PResult<SurfaceModule> {
        let mut m = SurfaceModule::default();
        while self.is_kw("import") {
            self.bump();
            m.imports.push(self.ident()?);
        }
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "import" => {
                    return Err(Report::new(
                        Code::Parse,
                        self.span(),
                        "imports must precede all declarations",
                    ))
                }
                _ => m.decls.push(self.decl()?),
            }
        }
        Ok(m)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let start = self.span();
        let kind = if self.eat_kw("def") {
            DeclKind::Def
        } else if self.eat_kw("axiom") {
            DeclKind::Axiom
        } else if self.eat_kw("check") {
            DeclKind::Check
        } else if self.eat_kw("fail-check") {
            let code = match self.peek().clone() {
                Tok::Ident(s) => match Code::parse(&s) {
                    Some(c) => {
                        self.bump();
                        c
                    }
                    None => return self.error("a diagnostic code such as E-CONV"),
                },
                _ => return self.error("a diagnostic code such as E-CONV"),
            };
            DeclKind::FailCheck(code)
        } else {
            return self.error("a declaration (`def`, `axiom`, `check` or `fail-check`)");
        };
        let name = self.ident()?;
        let mut binders = Vec::new();
        while self.is_sym("(") {
            binders.push(self.binder_group()?);
        }
        self.expect_sym(":")?;
        let ty = self.expr()?;
        let body = if matches!(kind, DeclKind::Axiom) {
            None
        } else {
            self.expect_sym(":=")?;
            Some(self.expr()?)
        };
        let end = self.prev_span();
        Ok(Decl {
            kind,
            name,
            binders,
            ty,
            body,
            span: start.join(end),
        })
    }

    // ---- modality words, locks and cells ----

    fn word(&mut self) -> PResult<(ModalityWord, Span)> {
        let start = self.span();
        let mut gens = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Num(1) => {
                    self.bump();
                }
                Tok::Ident(s) if s == "id" => {
                    self.bump();
                }
                Tok::Ident(s) if s.chars().count() == 1 => match Gen::from_letter(s.chars().next().unwrap()) {
                    Some(g) => {
                        self.bump();
                        gens.push(g);
                    }
                    None => return self.error("a modality (`g`, `s`, `o`, `p`, `a` or `1`)"),
                },
                _ => return self.error("a modality (`g`, `s`, `o`, `p`, `a` or `1`)"),
            }
            if !self.eat_sym(".") {
                break;
            }
        }
        Ok((ModalityWord::from_gens(gens), start.join(self.prev_span())))
    }

    fn lock_ann(&mut self) -> PResult<LockAnn> {
        let (word, span) = self.word()?;
        let mut names = Vec::new();
        if self.eat_sym(";") {
            while matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) {
                names.push(self.ident()?);
            }
            if names.is_empty() {
                return self.error("an interval variable name");
            }
        }
        if names.len() > word.p_count() {
            return Err(Report::new(
                Code::Parse,
                names[word.p_count()].span,
                format!("`{word}` binds only {} interval variable(s)", word.p_count()),
            ));
        }
        let end = self.prev_span();
        Ok(LockAnn {
            word,
            names,
            span: span.join(end),
        })
    }

    fn cell(&mut self) -> PResult<CellExpr> {
        if self.is_kw("id") && matches!(self.peek_at(1), Tok::Sym("{")) {
            let start = self.bump().span;
            self.expect_sym("{")?;
            let (w, _) = self.word()?;
            let end = self.expect_sym("}")?;
            return Ok(CellExpr::Identity(w, start.join(end)));
        }
        let mut steps = vec![self.cell_step()?];
        while self.eat_sym(";") {
            steps.push(self.cell_step()?);
        }
        Ok(CellExpr::Steps(steps))
    }

    fn cell_gen(&mut self) -> Option<CellGen> {
        if let Tok::Ident(s) = self.peek() {
            if let Some(g) = CellGen::from_name(s) {
                self.bump();
                return Some(g);
            }
        }
        None
    }

    fn cell_step(&mut self) -> PResult<CellStep> {
        let start = self.span();
        let (left, gen) = match self.cell_gen() {
            Some(g) => (ModalityWord::identity(), g),
            None => {
                let (w, _) = self.word()?;
                self.expect_sym("<|")?;
                match self.cell_gen() {
                    Some(g) => (w, g),
                    None => return self.error("a generating 2-cell (eps_gs, eta_gs, eps_pa, eta_pa, eps0, wk)"),
                }
            }
        };
        let right = if self.eat_sym("|>") {
            self.word()?.0
        } else {
            ModalityWord::identity()
        };
        Ok(CellStep {
            left,
            gen,
            right,
            span: start.join(self.prev_span()),
        })
    }

    // ---- binders ----

    /// `(x y : A @ μ; i)`.
    fn binder_group(&mut self) -> PResult<Binder> {
        self.expect_sym("(")?;
        let mut names = vec![self.ident()?];
        while !self.is_sym(":") {
            names.push(self.ident()?);
        }
        self.expect_sym(":")?;
        let ty = self.expr()?;
        let ann = if self.eat_sym("@") {
            Some(self.lock_ann()?)
        } else {
            None
        };
        self.expect_sym(")")?;
        Ok(Binder { names, ty, ann })
    }

    fn looks_like_binder_group(&self) -> bool {
        if !self.is_sym("(") {
            return false;
        }
        let mut k = 1;
        let mut saw_name = false;
        loop {
            match self.peek_at(k) {
                Tok::Ident(s) if !is_keyword(s) => saw_name = true,
                Tok::Sym("_") => saw_name = true,
                Tok::Sym(":") => return saw_name,
                _ => return false,
            }
            k += 1;
        }
    }

    /// Tries to read a telescope followed by one of `follow`; rewinds on
    /// failure.
    fn try_telescope(&mut self, follow: &[&str]) -> Option<Vec<Binder>> {
        if !self.looks_like_binder_group() {
            return None;
        }
        let save = self.pos;
        let depth = self.depth;
        let mut groups = Vec::new();
        while self.looks_like_binder_group() {
            match self.binder_group() {
                Ok(b) => groups.push(b),
                Err(_) => {
                    self.pos = save;
                    self.depth = depth;
                    return None;
                }
            }
        }
        if follow.iter().any(|s| self.is_sym(s)) {
            Some(groups)
        } else {
            self.pos = save;
            self.depth = depth;
            None
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.expr_inner();
        self.leave();
        r
    }

    fn expr_inner(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat_kw("fun") || self.eat_sym("\\") {
            let mut params = Vec::new();
            loop {
                if self.looks_like_binder_group() {
                    params.push(LamParam::Typed(self.binder_group()?));
                } else if matches!(self.peek(), Tok::Ident(s) if !is_keyword(s)) || self.is_sym("_") {
                    params.push(LamParam::Name(self.ident()?));
                } else {
                    break;
                }
            }
            if params.is_empty() {
                return self.error("a parameter");
            }
            self.expect_sym("=>")?;
            let body = self.expr()?;
            let span = start.join(body.span);
            return Ok(Expr {
                kind: ExprKind::Lam {
                    params,
                    body: Box::new(body),
                },
                span,
            });
        }
        if self.is_kw("let") {
            return self.let_expr();
        }
        self.arrow()
    }

    fn let_expr(&mut self) -> PResult<Expr> {
        let start = self.expect_kw("let")?;
        if !self.is_kw("mod") && !self.is_sym("{") {
            let var = self.ident()?;
            self.expect_sym(":")?;
            let ty = self.expr()?;
            self.expect_sym(":=")?;
            let val = self.expr()?;
            self.expect_kw("in")?;
            let body = self.expr()?;
            let span = start.join(body.span);
            return Ok(Expr {
                kind: ExprKind::Let {
                    var,
                    ty: Box::new(ty),
                    val: Box::new(val),
                    body: Box::new(body),
                },
                span,
            });
        }
        let outer = if self.eat_sym("{") {
            let l = self.lock_ann()?;
            self.expect_sym("}")?;
            Some(l)
        } else {
            None
        };
        self.expect_kw("mod")?;
        self.expect_sym("{")?;
        let (inner, _) = self.word()?;
        self.expect_sym("}")?;
        self.expect_sym("(")?;
        let var = self.ident()?;
        self.expect_sym(")")?;
        self.expect_sym("=")?;
        let scrut = self.expr()?;
        let motive = if self.eat_kw("return") {
            let y = self.ident()?;
            self.expect_sym("=>")?;
            let m = self.expr()?;
            Some((y, Box::new(m)))
        } else {
            None
        };
        self.expect_kw("in")?;
        let body = self.expr()?;
        let span = start.join(body.span);
        Ok(Expr {
            kind: ExprKind::LetMod {
                outer,
                inner,
                var,
                scrut: Box::new(scrut),
                motive,
                body: Box::new(body),
            },
            span,
        })
    }

    fn arrow(&mut self) -> PResult<Expr> {
        let start = self.span();
        if let Some(binders) = self.try_telescope(&["->", "*"]) {
            if self.eat_sym("->") {
                let cod = self.arrow_rhs()?;
                let span = start.join(cod.span);
                return Ok(Expr {
                    kind: ExprKind::Pi {
                        binders,
                        cod: Box::new(cod),
                    },
                    span,
                });
            }
            self.expect_sym("*")?;
            let snd = self.sigma()?;
            let span = start.join(snd.span);
            let lhs = Expr {
                kind: ExprKind::Sigma {
                    binders,
                    snd: Box::new(snd),
                },
                span,
            };
            return self.arrow_tail(lhs);
        }
        let lhs = self.sigma()?;
        self.arrow_tail(lhs)
    }

    fn arrow_rhs(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.arrow();
        self.leave();
        r
    }

    fn arrow_tail(&mut self, lhs: Expr) -> PResult<Expr> {
        if self.eat_sym("->") {
            let cod = self.arrow_rhs()?;
            let span = lhs.span.join(cod.span);
            return Ok(Expr {
                kind: ExprKind::Arrow {
                    dom: Box::new(lhs),
                    cod: Box::new(cod),
                },
                span,
            });
        }
        Ok(lhs)
    }

    fn sigma(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.sigma_inner();
        self.leave();
        r
    }

    fn sigma_inner(&mut self) -> PResult<Expr> {
        let start = self.span();
        if let Some(binders) = self.try_telescope(&["*"]) {
            self.expect_sym("*")?;
            let snd = self.sigma()?;
            let span = start.join(snd.span);
            return Ok(Expr {
                kind: ExprKind::Sigma {
                    binders,
                    snd: Box::new(snd),
                },
                span,
            });
        }
        let lhs = self.eq_level()?;
        if self.eat_sym("*") {
            let snd = self.sigma()?;
            let span = lhs.span.join(snd.span);
            return Ok(Expr {
                kind: ExprKind::Prod {
                    fst: Box::new(lhs),
                    snd: Box::new(snd),
                },
                span,
            });
        }
        Ok(lhs)
    }

    fn eq_level(&mut self) -> PResult<Expr> {
        let lhs = self.join_level()?;
        let is_eq = self.is_sym("=");
        if is_eq || self.is_sym("<=") {
            self.bump();
            let rhs = self.join_level()?;
            let span = lhs.span.join(rhs.span);
            let kind = if is_eq {
                ExprKind::Eq {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                }
            } else {
                ExprKind::Leq(Box::new(lhs), Box::new(rhs))
            };
            return Ok(Expr { kind, span });
        }
        Ok(lhs)
    }

    fn join_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.meet_level()?;
        while self.eat_sym("\\/") {
            let rhs = self.meet_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Join(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn meet_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.app_level()?;
        while self.eat_sym("/\\") {
            let rhs = self.app_level()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Meet(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => {
                !matches!(
                    s.as_str(),
                    "def" | "axiom" | "check" | "fail-check" | "import" | "in" | "return" | "fun" | "let"
                )
            }
            Tok::Num(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "<"),
            Tok::Eof => false,
        }
    }

    fn app_level(&mut self) -> PResult<Expr> {
        let start = self.span();
        let prefix = match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "suc" | "Lift" | "lift" | "lower" | "Id" => Some(s.clone()),
                _ => None,
            },
            _ => None,
        };
        let mut head = if let Some(kw) = prefix {
            self.bump();
            if kw == "Id" {
                let ty = self.inst_level()?;
                let lhs = self.inst_level()?;
                let rhs = self.inst_level()?;
                let span = start.join(rhs.span);
                Expr {
                    kind: ExprKind::Id {
                        ty: Box::new(ty),
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    },
                    span,
                }
            } else {
                let arg = Box::new(self.inst_level()?);
                let span = start.join(arg.span);
                let kind = match kw.as_str() {
                    "suc" => ExprKind::Suc(arg),
                    "Lift" => ExprKind::Lift(arg),
                    "lift" => ExprKind::LiftIn(arg),
                    _ => ExprKind::Lower(arg),
                };
                Expr { kind, span }
            }
        } else {
            self.inst_level()?
        };
        while self.starts_atom() {
            let arg = self.inst_level()?;
            let span = head.span.join(arg.span);
            head = Expr {
                kind: ExprKind::App {
                    fun: Box::new(head),
                    arg: Box::new(arg),
                },
                span,
            };
        }
        Ok(head)
    }

    fn inst_level(&mut self) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        while self.eat_sym("#") {
            let rhs = self.postfix()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr {
                kind: ExprKind::Inst {
                    body: Box::new(lhs),
                    arg: Box::new(rhs),
                },
                span,
            };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.is_sym(".") && matches!(self.peek_at(1), Tok::Num(1) | Tok::Num(2)) {
            self.bump();
            let n = self.bump();
            let span = e.span.join(n.span);
            let kind = if n.tok == Tok::Num(1) {
                ExprKind::Fst(Box::new(e))
            } else {
                ExprKind::Snd(Box::new(e))
            };
            e = Expr { kind, span };
        }
        Ok(e)
    }

    fn simple(&mut self, kind: ExprKind) -> PResult<Expr> {
        let span = self.bump().span;
        Ok(Expr { kind, span })
    }

    /// `kw(a, b, ...)` with exactly `n` arguments.
    fn call_args(&mut self, n: usize) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut args = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                self.expect_sym(",")?;
            }
            args.push(self.expr()?);
        }
        self.expect_sym(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.atom_inner();
        self.leave();
        r
    }

    fn atom_inner(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Num(n) => self.simple(ExprKind::Num(n)),
            Tok::Sym("(") => self.paren(),
            Tok::Sym("<") => {
                self.bump();
                let lock = self.lock_ann()?;
                self.expect_sym("|")?;
                let ty = self.expr()?;
                let end = self.expect_sym(">")?;
                Ok(Expr {
                    kind: ExprKind::Modal {
                        lock,
                        ty: Box::new(ty),
                    },
                    span: start.join(end),
                })
            }
            Tok::Ident(s) => match s.as_str() {
                "U" => {
                    self.bump();
                    match self.peek() {
                        Tok::Num(n) if *n <= u32::MAX as u64 => {
                            let n = *n as u32;
                            let end = self.bump().span;
                            Ok(Expr {
                                kind: ExprKind::Univ(n),
                                span: start.join(end),
                            })
                        }
                        _ => self.error("a universe level"),
                    }
                }
                "Int" => self.simple(ExprKind::Int),
                "Nat" => self.simple(ExprKind::Nat),
                "Bool" => self.simple(ExprKind::Bool),
                "Unit" => self.simple(ExprKind::Unit),
                "Empty" => self.simple(ExprKind::Empty),
                "tt" => self.simple(ExprKind::Tt),
                "true" => self.simple(ExprKind::True),
                "false" => self.simple(ExprKind::False),
                "zero" => self.simple(ExprKind::Num(0)),
                "refl" => self.simple(ExprKind::Refl),
                "mod" => {
                    self.bump();
                    self.expect_sym("{")?;
                    let lock = self.lock_ann()?;
                    self.expect_sym("}")?;
                    self.expect_sym("(")?;
                    let body = self.expr()?;
                    let end = self.expect_sym(")")?;
                    Ok(Expr {
                        kind: ExprKind::ModIntro {
                            lock,
                            body: Box::new(body),
                        },
                        span: start.join(end),
                    })
                }
                "coe" => {
                    self.bump();
                    self.expect_sym("{")?;
                    let cell = self.cell()?;
                    self.expect_sym("}")?;
                    self.expect_sym("(")?;
                    let term = self.expr()?;
                    let end = self.expect_sym(")")?;
                    Ok(Expr {
                        kind: ExprKind::Coe {
                            cell,
                            term: Box::new(term),
                        },
                        span: start.join(end),
                    })
                }
                "J" | "natrec" | "if" | "absurd" => {
                    self.bump();
                    let n = match s.as_str() {
                        "J" => 3,
                        "absurd" => 2,
                        _ => 4,
                    };
                    let mut args = self.call_args(n)?.into_iter();
                    let span = start.join(self.prev_span());
                    let mut next = || Box::new(args.next().unwrap());
                    let kind = match s.as_str() {
                        "J" => ExprKind::J {
                            motive: next(),
                            base: next(),
                            eq: next(),
                        },
                        "absurd" => ExprKind::Absurd {
                            motive: next(),
                            target: next(),
                        },
                        "natrec" => ExprKind::NatRec {
                            motive: next(),
                            zero: next(),
                            succ: next(),
                            target: next(),
                        },
                        _ => ExprKind::If {
                            motive: next(),
                            then_: next(),
                            else_: next(),
                            target: next(),
                        },
                    };
                    Ok(Expr { kind, span })
                }
                _ if is_keyword(&s) => self.error("an expression"),
                _ => {
                    let id = self.ident()?;
                    let mut span = id.span;
                    let cell = if self.eat_sym("^") {
                        self.expect_sym("{")?;
                        let c = self.cell()?;
                        span = span.join(self.expect_sym("}")?);
                        Some(c)
                    } else {
                        None
                    };
                    Ok(Expr {
                        kind: ExprKind::Var { name: id.name, cell },
                        span,
                    })
                }
            },
            _ => self.error("an expression"),
        }
    }

    /// `(e)`, `(a, b)` or `(e : T)`.
    fn paren(&mut self) -> PResult<Expr> {
        let start = self.expect_sym("(")?;
        let first = self.expr()?;
        if self.eat_sym(",") {
            let second = self.expr()?;
            let end = self.expect_sym(")")?;
            return Ok(Expr {
                kind: ExprKind::Pair {
                    fst: Box::new(first),
                    snd: Box::new(second),
                },
                span: start.join(end),
            });
        }
        if self.eat_sym(":") {
            let ty = self.expr()?;
            let end = self.expect_sym(")")?;
            return Ok(Expr {
                kind: ExprKind::Ann {
                    term: Box::new(first),
                    ty: Box::new(ty),
                },
                span: start.join(end),
            });
        }
        self.expect_sym(")")?;
        Ok(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idfun_parses() {
        let m = parse_module("def idfun : (A : U 0) -> A -> A := fun A a => a").unwrap();
        assert_eq!(m.decls.len(), 1);
        assert!(matches!(m.decls[0].ty.kind, ExprKind::Pi { .. }));
        assert!(matches!(m.decls[0].body.as_ref().unwrap().kind, ExprKind::Lam { .. }));
    }

    #[test]
    fn error_at_second_colon() {
        let src = "def bad : := x";
        let err = parse_module(src).unwrap_err();
        assert_eq!(err.code, Code::Parse);
        assert_eq!(err.span.start, src.find(":=").unwrap());
    }

    #[test]
    fn modal_forms() {
        let e = parse_expr("<p| Int>").unwrap();
        assert!(matches!(e.kind, ExprKind::Modal { .. }));
        let e = parse_expr("let{g} mod{s}(x) = y return z => A in x").unwrap();
        assert!(matches!(e.kind, ExprKind::LetMod { .. }));
        let e = parse_expr("A^{eta_pa} # i").unwrap();
        assert!(matches!(e.kind, ExprKind::Inst { .. }));
        let e = parse_expr("coe{g <| eps_gs |> s ; eps0}(t)").unwrap();
        assert!(matches!(e.kind, ExprKind::Coe { .. }));
    }

    #[test]
    fn telescope_versus_ascription() {
        let e = parse_expr("(x : A) -> B").unwrap();
        assert!(matches!(e.kind, ExprKind::Pi { .. }));
        let e = parse_expr("(x : A)").unwrap();
        assert!(matches!(e.kind, ExprKind::Ann { .. }));
        let e = parse_expr("(x : A) * B -> C").unwrap();
        assert!(matches!(e.kind, ExprKind::Arrow { .. }));
    }

    #[test]
    fn lock_names_are_bounded() {
        assert!(parse_expr("<p; i| A>").is_ok());
        assert_eq!(parse_expr("<g; i| A>").unwrap_err().code, Code::Parse);
    }

    #[test]
    fn deep_nesting_is_a_diagnostic() {
        let src = format!("{}x{}", "(".repeat(5000), ")".repeat(5000));
        assert_eq!(parse_expr(&src).unwrap_err().code, Code::Parse);
    }
}
