//! Bidirectional elaboration of surface expressions into core terms.

use std::rc::Rc;

use crate::diagnostic::{Code, Report, Span};
use crate::modality::{
    cell_search_with, compose, normalize, CellGen, Gen, ModalityWord, Step, TwoCell,
    DEFAULT_SEARCH_DEPTH,
};
use crate::syntax::ast::{Binder, CellExpr, Expr, ExprKind, Ident, LamParam, LockAnn};

use super::ctx::{Ctx, Entry};
use super::eval::{conv, nf, whnf, Env};
use super::print::show;
use super::subst::{
    act, instantiate, place, rename, shift, strengthen, subst_top, Local, SubstError,
};
use super::term::{app, var, var_id, Name, Term, Tm};

pub type CResult<T> = Result<T, Report>;

fn mk(t: Term) -> Tm {
    Rc::new(t)
}

fn one() -> ModalityWord {
    ModalityWord::identity()
}

fn name_of(id: &Ident) -> Name {
    id.name.as_str().into()
}

/// Normalized modality and interval names of an optional annotation.
fn lock_parts(ann: Option<&LockAnn>) -> (ModalityWord, Vec<Name>) {
    match ann {
        Some(l) => (normalize(&l.word), l.names.iter().map(name_of).collect()),
        None => (one(), Vec::new()),
    }
}

/// The type of slot `k` reached through `cell`, transported to `ctx`.
pub fn var_type(ctx: &Ctx, k: usize, cell: &TwoCell) -> Result<Tm, SubstError> {
    let info = ctx.slot(k).expect("variable in scope");
    let ty = match &info.entry {
        Entry::Decl { ty: Some(ty), .. } => ty.clone(),
        Entry::Decl { ty: None, .. } => panic!("declaration without a type"),
        Entry::Lock { .. } => return Ok(mk(Term::Int)),
    };
    let moved = act(&info.prefix, &ty, cell)?;
    let mut entries = vec![Entry::Decl {
        name: "_".into(),
        ann: one(),
        ty: None,
    }];
    entries.extend(info.after.iter().cloned());
    Ok(place(&moved, cell.dst().p_count(), &Local::from_entries(&entries)))
}

pub struct Checker<'a> {
    pub env: &'a Env,
    /// Bound on the 2-cell search for unannotated variables.
    pub depth: usize,
}

impl<'a> Checker<'a> {
    pub fn new(env: &'a Env) -> Self {
        Checker {
            env,
            depth: DEFAULT_SEARCH_DEPTH,
        }
    }

    pub fn with_depth(env: &'a Env, depth: usize) -> Self {
        Checker { env, depth }
    }

    fn whnf(&self, ctx: &Ctx, t: &Tm) -> Tm {
        whnf(self.env, ctx, t)
    }

    pub fn conv(&self, ctx: &Ctx, a: &Tm, b: &Tm) -> bool {
        conv(self.env, ctx, a, b)
    }

    fn show_nf(&self, ctx: &Ctx, t: &Tm) -> String {
        show(ctx, &nf(self.env, ctx, t))
    }

    fn mismatch(&self, ctx: &Ctx, span: Span, what: &str, expected: &Tm, actual: &Tm) -> Report {
        let (we, wa) = (self.whnf(ctx, expected), self.whnf(ctx, actual));
        if let (Term::Univ(m), Term::Univ(n)) = (&*we, &*wa) {
            return Report::new(
                Code::Universe,
                span,
                format!("universe level mismatch: expected U {m}, found U {n}"),
            );
        }
        let e = self.show_nf(ctx, expected);
        let a = self.show_nf(ctx, actual);
        Report::new(Code::Conv, span, format!("{what}: expected {e}, found {a}")).with_pair(e, a)
    }

    fn ensure_conv(&self, ctx: &Ctx, span: Span, expected: &Tm, actual: &Tm) -> CResult<()> {
        if self.conv(ctx, expected, actual) {
            Ok(())
        } else {
            Err(self.mismatch(ctx, span, "type mismatch", expected, actual))
        }
    }

    fn modality_error(span: Span, e: SubstError) -> Report {
        match e {
            SubstError::Boundary(b) => Report::new(Code::TwoCellBoundary, span, b.to_string()),
            other => Report::new(Code::Modality, span, other.to_string()),
        }
    }

    fn subst(&self, ctx: &Ctx, body: &Tm, value: &Tm, span: Span) -> CResult<Tm> {
        subst_top(ctx, body, value).map_err(|e| Self::modality_error(span, e))
    }

    pub fn cell(&self, ce: &CellExpr) -> CResult<TwoCell> {
        match ce {
            CellExpr::Identity(w, _) => Ok(TwoCell::identity(w)),
            CellExpr::Steps(steps) => {
                let built: Vec<Step> = steps
                    .iter()
                    .map(|s| Step::new(s.left.clone(), s.gen, s.right.clone()))
                    .collect();
                let src = built[0].src();
                TwoCell::from_steps(&src, built).map_err(|e| {
                    Report::new(
                        Code::TwoCellBoundary,
                        ce.span(),
                        format!("ill-formed 2-cell: {e}"),
                    )
                })
            }
        }
    }

    fn lookup(
        &self,
        ctx: &Ctx,
        name: &str,
        cell: Option<&CellExpr>,
        span: Span,
    ) -> CResult<Option<(Tm, Tm)>> {
        let Some(k) = ctx.find(name) else {
            return Ok(None);
        };
        let info = ctx.slot(k).expect("found slot");
        let ann = match &info.entry {
            Entry::Decl { ann, .. } => ann.clone(),
            Entry::Lock { .. } => one(),
        };
        let locks = normalize(&ModalityWord::from_gens(info.after.iter().filter_map(
            |e| match e {
                Entry::Lock { gen, .. } => Some(*gen),
                Entry::Decl { .. } => None,
            },
        )));
        let cell = match cell {
            Some(ce) => {
                let c = self.cell(ce)?;
                if *c.src() != ann || *c.dst() != locks {
                    return Err(Report::new(
                        Code::TwoCellBoundary,
                        ce.span(),
                        format!(
                            "`{name}` needs a 2-cell {ann} => {locks}, but the annotation has boundary {} => {}",
                            c.src(),
                            c.dst()
                        ),
                    ));
                }
                c
            }
            None => cell_search_with(&ann, &locks, self.depth, &CellGen::KERNEL).ok_or_else(
                || {
                    Report::new(
                        Code::Modality,
                        span,
                        format!(
                            "`{name}` is annotated {ann} but used under locks {locks}; no 2-cell {ann} => {locks} found (depth {})",
                            self.depth
                        ),
                    )
                },
            )?,
        };
        let ty = var_type(ctx, k, &cell).map_err(|e| Self::modality_error(span, e))?;
        Ok(Some((var(k, cell), ty)))
    }

    /// Elaborates a type, returning its universe level.
    pub fn check_type(&self, ctx: &Ctx, e: &Expr) -> CResult<(Tm, u32)> {
        let (t, ty) = self.infer(ctx, e)?;
        match &*self.whnf(ctx, &ty) {
            Term::Univ(n) => Ok((t, *n)),
            _ => Err(Report::new(
                Code::Conv,
                e.span,
                format!("expected a type, found a term of type {}", self.show_nf(ctx, &ty)),
            )
            .with_pair("U _".into(), self.show_nf(ctx, &ty))),
        }
    }

    /// Universe level of an elaborated type.
    pub fn level_of(&self, ctx: &Ctx, ty: &Tm) -> Option<u32> {
        use Term::*;
        let w = self.whnf(ctx, ty);
        Some(match &*w {
            Univ(n) => n + 1,
            Pi { ann, dom, cod, .. } => self
                .level_of(&ctx.push_locks(ann, &[]), dom)?
                .max(self.level_of(&ctx.push_decl("_".into(), ann.clone(), Some(dom.clone())), cod)?),
            Sigma { fst, snd, .. } => self.level_of(ctx, fst)?.max(
                self.level_of(&ctx.push_decl("_".into(), one(), Some(fst.clone())), snd)?,
            ),
            Id { ty, .. } => self.level_of(ctx, ty)?,
            Modal { mu, ty } => self.level_of(&ctx.push_locks(mu, &[]), ty)?,
            Int | Nat | Bool | Unit | Empty => 0,
            Lift(a) => self.level_of(ctx, a)? + 1,
            _ => match &*self.whnf(ctx, &self.type_of(ctx, &w)?) {
                Univ(n) => *n,
                _ => return None,
            },
        })
    }

    /// Type of an elaborated neutral term.
    pub fn type_of(&self, ctx: &Ctx, t: &Tm) -> Option<Tm> {
        use Term::*;
        Some(match &**t {
            Var { idx, cell } => var_type(ctx, *idx, cell).ok()?,
            Const(n) => self.env.get(n)?.ty.clone(),
            App { fun, arg, .. } => match &*self.whnf(ctx, &self.type_of(ctx, fun)?) {
                Pi { cod, .. } => subst_top(ctx, cod, arg).ok()?,
                _ => return None,
            },
            Fst(p) => match &*self.whnf(ctx, &self.type_of(ctx, p)?) {
                Sigma { fst, .. } => fst.clone(),
                _ => return None,
            },
            Snd(p) => match &*self.whnf(ctx, &self.type_of(ctx, p)?) {
                Sigma { snd, .. } => subst_top(ctx, snd, &mk(Fst(p.clone()))).ok()?,
                _ => return None,
            },
            Inst { body, arg } => {
                let ty = self.type_of(&ctx.push_lock(Gen::P, None), body)?;
                mk(Inst {
                    body: ty,
                    arg: arg.clone(),
                })
            }
            LetMod { scrut, motive, .. } => subst_top(ctx, motive, scrut).ok()?,
            NatRec { motive, target, .. } | If { motive, target, .. } => {
                app(motive.clone(), target.clone())
            }
            J { motive, eq, .. } => match &*self.whnf(ctx, &self.type_of(ctx, eq)?) {
                Id { rhs, .. } => app(app(motive.clone(), rhs.clone()), eq.clone()),
                _ => return None,
            },
            Absurd { motive, .. } => motive.clone(),
            Lower(x) => match &*self.whnf(ctx, &self.type_of(ctx, x)?) {
                Lift(a) => a.clone(),
                _ => return None,
            },
            _ => return None,
        })
    }

    fn expect_int(&self, ctx: &Ctx, e: &Expr) -> CResult<Tm> {
        self.check(ctx, e, &mk(Term::Int))
    }

    pub fn infer(&self, ctx: &Ctx, e: &Expr) -> CResult<(Tm, Tm)> {
        use ExprKind as K;
        let span = e.span;
        match &e.kind {
            K::Var { name, cell } => {
                if let Some(found) = self.lookup(ctx, name, cell.as_ref(), span)? {
                    return Ok(found);
                }
                match self.env.get(name) {
                    Some(g) => {
                        if let Some(ce) = cell {
                            if !self.cell(ce)?.is_identity() {
                                return Err(Report::new(
                                    Code::TwoCellBoundary,
                                    ce.span(),
                                    format!("global `{name}` is closed and takes no 2-cell"),
                                ));
                            }
                        }
                        Ok((mk(Term::Const(name.as_str().into())), g.ty.clone()))
                    }
                    None => Err(Report::new(
                        Code::Unbound,
                        span,
                        format!("unbound name `{name}`"),
                    )),
                }
            }
            K::Univ(n) => Ok((mk(Term::Univ(*n)), mk(Term::Univ(n + 1)))),
            K::Pi { binders, cod } => {
                let items = flatten(binders);
                let (t, l) = self.infer_pi(ctx, &items, cod)?;
                Ok((t, mk(Term::Univ(l))))
            }
            K::Arrow { dom, cod } => {
                let (d, l1) = self.check_type(ctx, dom)?;
                let inner = ctx.push_decl("_".into(), one(), Some(d.clone()));
                let (c, l2) = self.check_type(&inner, cod)?;
                Ok((
                    mk(Term::Pi {
                        ann: one(),
                        name: "_".into(),
                        dom: d,
                        cod: c,
                    }),
                    mk(Term::Univ(l1.max(l2))),
                ))
            }
            K::Sigma { binders, snd } => {
                let items = flatten(binders);
                let (t, l) = self.infer_sigma(ctx, &items, snd)?;
                Ok((t, mk(Term::Univ(l))))
            }
            K::Prod { fst, snd } => {
                let (a, l1) = self.check_type(ctx, fst)?;
                let inner = ctx.push_decl("_".into(), one(), Some(a.clone()));
                let (b, l2) = self.check_type(&inner, snd)?;
                Ok((
                    mk(Term::Sigma {
                        name: "_".into(),
                        fst: a,
                        snd: b,
                    }),
                    mk(Term::Univ(l1.max(l2))),
                ))
            }
            K::Lam { params, body } => {
                let items = flatten_params(params);
                self.infer_lam(ctx, &items, body)
            }
            K::App { fun, arg } => {
                let (f, fty) = self.infer(ctx, fun)?;
                match &*self.whnf(ctx, &fty) {
                    Term::Pi { ann, dom, cod, .. } => {
                        let a = self.check(&ctx.push_locks(ann, &[]), arg, dom)?;
                        let ty = self.subst(ctx, cod, &a, arg.span)?;
                        Ok((
                            mk(Term::App {
                                fun: f,
                                ann: ann.clone(),
                                arg: a,
                            }),
                            ty,
                        ))
                    }
                    _ => Err(Report::new(
                        Code::Conv,
                        fun.span,
                        format!(
                            "expected a function, found a term of type {}",
                            self.show_nf(ctx, &fty)
                        ),
                    )),
                }
            }
            K::Pair { fst, snd } => {
                let (a, at) = self.infer(ctx, fst)?;
                let (b, bt) = self.infer(ctx, snd)?;
                Ok((
                    mk(Term::Pair(a, b)),
                    mk(Term::Sigma {
                        name: "_".into(),
                        fst: at,
                        snd: shift(&bt, 1),
                    }),
                ))
            }
            K::Fst(p) | K::Snd(p) => {
                let (t, ty) = self.infer(ctx, p)?;
                match &*self.whnf(ctx, &ty) {
                    Term::Sigma { fst, snd, .. } => {
                        if matches!(e.kind, K::Fst(_)) {
                            Ok((mk(Term::Fst(t)), fst.clone()))
                        } else {
                            let first = mk(Term::Fst(t.clone()));
                            let ty = self.subst(ctx, snd, &first, span)?;
                            Ok((mk(Term::Snd(t)), ty))
                        }
                    }
                    _ => Err(Report::new(
                        Code::Conv,
                        p.span,
                        format!("expected a pair, found a term of type {}", self.show_nf(ctx, &ty)),
                    )),
                }
            }
            K::Ann { term, ty } => {
                let (t, _) = self.check_type(ctx, ty)?;
                let v = self.check(ctx, term, &t)?;
                Ok((v, t))
            }
            K::Eq { lhs, rhs } => {
                let (l, a) = self.infer(ctx, lhs)?;
                let r = self.check(ctx, rhs, &a)?;
                let level = self.level_of(ctx, &a).ok_or_else(|| {
                    Report::new(Code::Conv, lhs.span, "cannot determine the universe of this type")
                })?;
                Ok((
                    mk(Term::Id { ty: a, lhs: l, rhs: r }),
                    mk(Term::Univ(level)),
                ))
            }
            K::Leq(a, b) => {
                let x = self.expect_int(ctx, a)?;
                let y = self.expect_int(ctx, b)?;
                Ok((
                    mk(Term::Id {
                        ty: mk(Term::Int),
                        lhs: mk(Term::IMeet(x.clone(), y)),
                        rhs: x,
                    }),
                    mk(Term::Univ(0)),
                ))
            }
            K::Id { ty, lhs, rhs } => {
                let (a, l) = self.check_type(ctx, ty)?;
                let x = self.check(ctx, lhs, &a)?;
                let y = self.check(ctx, rhs, &a)?;
                Ok((mk(Term::Id { ty: a, lhs: x, rhs: y }), mk(Term::Univ(l))))
            }
            K::Refl => Err(Report::new(
                Code::Conv,
                span,
                "cannot infer the type of `refl`; add an annotation",
            )),
            K::J { motive, base, eq } => {
                let (p, pty) = self.infer(ctx, eq)?;
                let (a, x, y) = match &*self.whnf(ctx, &pty) {
                    Term::Id { ty, lhs, rhs } => (ty.clone(), lhs.clone(), rhs.clone()),
                    _ => {
                        return Err(Report::new(
                            Code::Conv,
                            eq.span,
                            format!(
                                "expected an identification, found a term of type {}",
                                self.show_nf(ctx, &pty)
                            ),
                        ))
                    }
                };
                let second = mk(Term::Id {
                    ty: shift(&a, 1),
                    lhs: shift(&x, 1),
                    rhs: var_id(0, &one()),
                });
                let m = self.motive(ctx, motive, &[a, second])?;
                let b = self.check(ctx, base, &app(app(m.clone(), x), mk(Term::Refl)))?;
                let ty = app(app(m.clone(), y), p.clone());
                Ok((
                    mk(Term::J {
                        motive: m,
                        base: b,
                        eq: p,
                    }),
                    ty,
                ))
            }
            K::Modal { lock, ty } => {
                let (mu, names) = lock_parts(Some(lock));
                let (a, l) = self.check_type(&ctx.push_locks(&mu, &names), ty)?;
                Ok((mk(Term::Modal { mu, ty: a }), mk(Term::Univ(l))))
            }
            K::ModIntro { lock, body } => {
                let (mu, names) = lock_parts(Some(lock));
                let (b, bt) = self.infer(&ctx.push_locks(&mu, &names), body)?;
                Ok((
                    mk(Term::ModIntro {
                        mu: mu.clone(),
                        body: b,
                    }),
                    mk(Term::Modal { mu, ty: bt }),
                ))
            }
            K::LetMod { .. } => self.let_mod(ctx, e, None),
            K::Let { var: x, ty, val, body } => {
                let (t, _) = self.check_type(ctx, ty)?;
                let v = self.check(ctx, val, &t)?;
                let inner = ctx.push_decl(name_of(x), one(), Some(t));
                let (b, bt) = self.infer(&inner, body)?;
                let ty = self.subst(ctx, &bt, &v, span)?;
                Ok((let_term(x, b, v), ty))
            }
            K::Coe { cell, term } => {
                let (t, ty) = self.infer(ctx, term)?;
                let (mu, a) = match &*self.whnf(ctx, &ty) {
                    Term::Modal { mu, ty } => (mu.clone(), ty.clone()),
                    _ if cell_src_is_identity(cell) => (one(), ty.clone()),
                    _ => {
                        return Err(Report::new(
                            Code::Conv,
                            term.span,
                            format!(
                                "coercion needs a modal type, found {}",
                                self.show_nf(ctx, &ty)
                            ),
                        ))
                    }
                };
                let alpha = self.cell(cell)?;
                if *alpha.src() != mu {
                    return Err(Report::new(
                        Code::TwoCellBoundary,
                        cell.span(),
                        format!("2-cell starts at {} but the term is under {mu}", alpha.src()),
                    ));
                }
                if alpha.is_identity() {
                    return Ok((t, ty));
                }
                let nu = alpha.dst().clone();
                let moved = act(ctx, &a, &alpha).map_err(|e| Self::modality_error(cell.span(), e))?;
                let result_ty = mk(Term::Modal {
                    mu: nu.clone(),
                    ty: moved,
                });
                let body = mk(Term::ModIntro {
                    mu: nu.clone(),
                    body: var(nu.p_count(), alpha),
                });
                Ok((
                    mk(Term::LetMod {
                        nu: one(),
                        mu,
                        name: "x".into(),
                        scrut: t,
                        motive: shift(&result_ty, 1),
                        body,
                    }),
                    result_ty,
                ))
            }
            K::Inst { body, arg } => {
                let a = self.expect_int(ctx, arg)?;
                let (b, bt) = self.infer(&ctx.push_lock(Gen::P, None), body)?;
                let ty = instantiate(ctx, &bt, &a).unwrap_or_else(|_| {
                    mk(Term::Inst {
                        body: bt,
                        arg: a.clone(),
                    })
                });
                Ok((mk(Term::Inst { body: b, arg: a }), ty))
            }
            K::Int => Ok((mk(Term::Int), mk(Term::Univ(0)))),
            K::Meet(a, b) | K::Join(a, b) => {
                let x = self.expect_int(ctx, a)?;
                let y = self.expect_int(ctx, b)?;
                let t = if matches!(e.kind, K::Meet(..)) {
                    Term::IMeet(x, y)
                } else {
                    Term::IJoin(x, y)
                };
                Ok((mk(t), mk(Term::Int)))
            }
            K::Num(0) => Ok((mk(Term::I0), mk(Term::Int))),
            K::Num(1) => Ok((mk(Term::I1), mk(Term::Int))),
            K::Num(n) => Ok((nat_literal(*n), mk(Term::Nat))),
            K::Nat => Ok((mk(Term::Nat), mk(Term::Univ(0)))),
            K::Suc(a) => {
                let x = self.check(ctx, a, &mk(Term::Nat))?;
                Ok((mk(Term::Suc(x)), mk(Term::Nat)))
            }
            K::NatRec {
                motive,
                zero,
                succ,
                target,
            } => {
                let nat = mk(Term::Nat);
                let m = self.motive(ctx, motive, std::slice::from_ref(&nat))?;
                let n = self.check(ctx, target, &nat)?;
                let z = self.check(ctx, zero, &app(m.clone(), mk(Term::Zero)))?;
                let step_ty = mk(Term::Pi {
                    ann: one(),
                    name: "n".into(),
                    dom: nat.clone(),
                    cod: mk(Term::Pi {
                        ann: one(),
                        name: "_".into(),
                        dom: app(shift(&m, 1), var_id(0, &one())),
                        cod: app(shift(&m, 2), mk(Term::Suc(var_id(1, &one())))),
                    }),
                });
                let s = self.check(ctx, succ, &step_ty)?;
                let ty = app(m.clone(), n.clone());
                Ok((
                    mk(Term::NatRec {
                        motive: m,
                        zero: z,
                        succ: s,
                        target: n,
                    }),
                    ty,
                ))
            }
            K::Bool => Ok((mk(Term::Bool), mk(Term::Univ(0)))),
            K::True => Ok((mk(Term::True), mk(Term::Bool))),
            K::False => Ok((mk(Term::False), mk(Term::Bool))),
            K::If {
                motive,
                then_,
                else_,
                target,
            } => {
                let bool_ = mk(Term::Bool);
                let m = self.motive(ctx, motive, std::slice::from_ref(&bool_))?;
                let b = self.check(ctx, target, &bool_)?;
                let t = self.check(ctx, then_, &app(m.clone(), mk(Term::True)))?;
                let f = self.check(ctx, else_, &app(m.clone(), mk(Term::False)))?;
                let ty = app(m.clone(), b.clone());
                Ok((
                    mk(Term::If {
                        motive: m,
                        then_: t,
                        else_: f,
                        target: b,
                    }),
                    ty,
                ))
            }
            K::Unit => Ok((mk(Term::Unit), mk(Term::Univ(0)))),
            K::Tt => Ok((mk(Term::Tt), mk(Term::Unit))),
            K::Empty => Ok((mk(Term::Empty), mk(Term::Univ(0)))),
            K::Absurd { motive, target } => {
                let (a, _) = self.check_type(ctx, motive)?;
                let t = self.check(ctx, target, &mk(Term::Empty))?;
                Ok((
                    mk(Term::Absurd {
                        motive: a.clone(),
                        target: t,
                    }),
                    a,
                ))
            }
            K::Lift(a) => {
                let (t, l) = self.check_type(ctx, a)?;
                Ok((mk(Term::Lift(t)), mk(Term::Univ(l + 1))))
            }
            K::LiftIn(a) => {
                let (t, ty) = self.infer(ctx, a)?;
                Ok((mk(Term::LiftIn(t)), mk(Term::Lift(ty))))
            }
            K::Lower(a) => {
                let (t, ty) = self.infer(ctx, a)?;
                match &*self.whnf(ctx, &ty) {
                    Term::Lift(inner) => Ok((mk(Term::Lower(t)), inner.clone())),
                    _ => Err(Report::new(
                        Code::Conv,
                        a.span,
                        format!("`lower` needs a lifted type, found {}", self.show_nf(ctx, &ty)),
                    )),
                }
            }
        }
    }

    fn infer_pi(&self, ctx: &Ctx, items: &[Item], cod: &Expr) -> CResult<(Tm, u32)> {
        let Some((x, ty, ann)) = items.first() else {
            return self.check_type(ctx, cod);
        };
        let (mu, names) = lock_parts(*ann);
        let (dom, l1) = self.check_type(&ctx.push_locks(&mu, &names), ty)?;
        let inner = ctx.push_decl(name_of(x), mu.clone(), Some(dom.clone()));
        let (cod, l2) = self.infer_pi(&inner, &items[1..], cod)?;
        Ok((
            mk(Term::Pi {
                ann: mu,
                name: name_of(x),
                dom,
                cod,
            }),
            l1.max(l2),
        ))
    }

    fn infer_sigma(&self, ctx: &Ctx, items: &[Item], snd: &Expr) -> CResult<(Tm, u32)> {
        let Some((x, ty, ann)) = items.first() else {
            return self.check_type(ctx, snd);
        };
        if let Some(l) = ann {
            if !normalize(&l.word).is_identity() {
                return Err(Report::new(
                    Code::Modality,
                    l.span,
                    "Σ-binders cannot carry a modality; use a modal type instead",
                ));
            }
        }
        let (fst, l1) = self.check_type(ctx, ty)?;
        let inner = ctx.push_decl(name_of(x), one(), Some(fst.clone()));
        let (snd, l2) = self.infer_sigma(&inner, &items[1..], snd)?;
        Ok((
            mk(Term::Sigma {
                name: name_of(x),
                fst,
                snd,
            }),
            l1.max(l2),
        ))
    }

    fn infer_lam(&self, ctx: &Ctx, items: &[Param], body: &Expr) -> CResult<(Tm, Tm)> {
        let Some((x, typed)) = items.first() else {
            return self.infer(ctx, body);
        };
        let Some((ty, ann)) = typed else {
            return Err(Report::new(
                Code::Conv,
                x.span,
                format!("cannot infer the type of `{}`; annotate the binder", x.name),
            ));
        };
        let (mu, names) = lock_parts(*ann);
        let (dom, _) = self.check_type(&ctx.push_locks(&mu, &names), ty)?;
        let inner = ctx.push_decl(name_of(x), mu.clone(), Some(dom.clone()));
        let (b, bt) = self.infer_lam(&inner, &items[1..], body)?;
        Ok((
            mk(Term::Lam {
                ann: mu.clone(),
                name: name_of(x),
                body: b,
            }),
            mk(Term::Pi {
                ann: mu,
                name: name_of(x),
                dom,
                cod: bt,
            }),
        ))
    }

    /// Elaborates a motive over the telescope `doms` (each entry lives in
    /// `ctx` extended by the previous ones), returning it as a function.
    fn motive(&self, ctx: &Ctx, e: &Expr, doms: &[Tm]) -> CResult<Tm> {
        if let ExprKind::Lam { params, body } = &e.kind {
            let items = flatten_params(params);
            if items.len() == doms.len() {
                let (t, _) = self.motive_lam(ctx, &items, body, doms)?;
                return Ok(t);
            }
        }
        let (m, ty) = self.infer(ctx, e)?;
        let mut cur_ctx = ctx.clone();
        let mut cur = ty;
        for dom in doms {
            match &*self.whnf(&cur_ctx, &cur) {
                Term::Pi {
                    ann,
                    dom: d,
                    cod,
                    name,
                } if ann.is_identity() => {
                    self.ensure_conv(&cur_ctx, e.span, dom, d)?;
                    cur_ctx = cur_ctx.push_decl(name.clone(), one(), Some(d.clone()));
                    cur = cod.clone();
                }
                _ => {
                    return Err(Report::new(
                        Code::Conv,
                        e.span,
                        format!("motive should take {} argument(s)", doms.len()),
                    ))
                }
            }
        }
        match &*self.whnf(&cur_ctx, &cur) {
            Term::Univ(_) => Ok(m),
            _ => Err(Report::new(Code::Conv, e.span, "motive must return a type")),
        }
    }

    fn motive_lam(&self, ctx: &Ctx, items: &[Param], body: &Expr, doms: &[Tm]) -> CResult<(Tm, u32)> {
        let Some((x, typed)) = items.first() else {
            return self.check_type(ctx, body);
        };
        let dom = &doms[0];
        if let Some((ty, ann)) = typed {
            if ann.is_some_and(|l| !normalize(&l.word).is_identity()) {
                return Err(Report::new(Code::Modality, x.span, "motive binders are unannotated"));
            }
            let (given, _) = self.check_type(ctx, ty)?;
            self.ensure_conv(ctx, ty.span, dom, &given)?;
        }
        let inner = ctx.push_decl(name_of(x), one(), Some(dom.clone()));
        let (b, l) = self.motive_lam(&inner, &items[1..], body, &doms[1..])?;
        Ok((
            mk(Term::Lam {
                ann: one(),
                name: name_of(x),
                body: b,
            }),
            l,
        ))
    }

    /// `let{ν} mod{μ}(x) = s [return y => M] in b`; `expected` supplies the
    /// motive when `return` is absent.
    fn let_mod(&self, ctx: &Ctx, e: &Expr, expected: Option<&Tm>) -> CResult<(Tm, Tm)> {
        let ExprKind::LetMod {
            outer,
            inner,
            var: x,
            scrut,
            motive,
            body,
        } = &e.kind
        else {
            unreachable!()
        };
        let (nu, names) = lock_parts(outer.as_ref());
        let mu = normalize(inner);
        let (s, sty) = self.infer(&ctx.push_locks(&nu, &names), scrut)?;
        let locked = ctx.push_locks(&nu, &[]);
        let modal = self.whnf(&locked, &sty);
        let a = match &*modal {
            Term::Modal { mu: m, ty } if *m == mu => ty.clone(),
            _ if mu.is_identity() => modal.clone(),
            Term::Modal { mu: m, .. } => {
                return Err(Report::new(
                    Code::Modality,
                    scrut.span,
                    format!("scrutinee has modality {m}, but the pattern is mod{{{mu}}}"),
                ))
            }
            _ => {
                return Err(Report::new(
                    Code::Conv,
                    scrut.span,
                    format!(
                        "expected a term of modal type <{mu}| _>, found one of type {}",
                        self.show_nf(&locked, &sty)
                    ),
                ))
            }
        };
        let numu = compose(&nu, &mu);
        let x_ctx = ctx.push_decl(name_of(x), numu.clone(), Some(a));
        let (m, b) = match (motive, expected) {
            (Some((y, mexpr)), _) => {
                let y_ctx = ctx.push_decl(name_of(y), nu.clone(), Some(modal.clone()));
                (self.check_type(&y_ctx, mexpr)?.0, None)
            }
            (None, Some(t)) => (shift(t, 1), None),
            (None, None) => {
                let (b, bt) = self.infer(&x_ctx, body)?;
                let m = strengthen(&bt).ok_or_else(|| {
                    Report::new(
                        Code::Conv,
                        e.span,
                        format!(
                            "the type of the body mentions `{}`; add `return`",
                            x.name
                        ),
                    )
                })?;
                (shift(&m, 1), Some(b))
            }
        };
        let b = match b {
            Some(b) => b,
            None => {
                // M[mod{μ}(x)/y], computed in ctx, x.
                let m_up = rename(&m, &|i| if i == 0 { 0 } else { i + 1 });
                let intro = mk(Term::ModIntro {
                    mu: mu.clone(),
                    body: var_id(numu.p_count(), &numu),
                });
                let body_ty = self.subst(&x_ctx, &m_up, &intro, body.span)?;
                self.check(&x_ctx, body, &body_ty)?
            }
        };
        let ty = self.subst(ctx, &m, &s, e.span)?;
        Ok((
            mk(Term::LetMod {
                nu,
                mu,
                name: name_of(x),
                scrut: s,
                motive: m,
                body: b,
            }),
            ty,
        ))
    }

    pub fn check(&self, ctx: &Ctx, e: &Expr, ty: &Tm) -> CResult<Tm> {
        use ExprKind as K;
        match &e.kind {
            K::Lam { params, body } => {
                let items = flatten_params(params);
                self.check_lam(ctx, &items, body, ty, e.span)
            }
            K::Pair { fst, snd } => match &*self.whnf(ctx, ty) {
                Term::Sigma { fst: a, snd: b, .. } => {
                    let x = self.check(ctx, fst, a)?;
                    let bt = self.subst(ctx, b, &x, e.span)?;
                    let y = self.check(ctx, snd, &bt)?;
                    Ok(mk(Term::Pair(x, y)))
                }
                _ => self.check_by_infer(ctx, e, ty),
            },
            K::Refl => match &*self.whnf(ctx, ty) {
                Term::Id { lhs, rhs, .. } => {
                    if self.conv(ctx, lhs, rhs) {
                        Ok(mk(Term::Refl))
                    } else {
                        Err(self.mismatch(ctx, e.span, "`refl` needs equal endpoints", lhs, rhs))
                    }
                }
                _ => Err(Report::new(
                    Code::Conv,
                    e.span,
                    format!("`refl` checked against non-identity type {}", self.show_nf(ctx, ty)),
                )),
            },
            K::Num(n) => match &*self.whnf(ctx, ty) {
                Term::Nat => Ok(nat_literal(*n)),
                _ => self.check_by_infer(ctx, e, ty),
            },
            K::ModIntro { lock, body } => match &*self.whnf(ctx, ty) {
                Term::Modal { mu, ty: a } => {
                    let (given, names) = lock_parts(Some(lock));
                    if given != *mu {
                        return Err(Report::new(
                            Code::Modality,
                            lock.span,
                            format!("mod{{{given}}} introduces <{given}| _>, but <{mu}| _> is expected"),
                        ));
                    }
                    let b = self.check(&ctx.push_locks(mu, &names), body, a)?;
                    Ok(mk(Term::ModIntro {
                        mu: mu.clone(),
                        body: b,
                    }))
                }
                _ => self.check_by_infer(ctx, e, ty),
            },
            K::LetMod { .. } => Ok(self.let_mod(ctx, e, Some(ty))?.0),
            K::Let { var: x, ty: t, val, body } => {
                let (tt, _) = self.check_type(ctx, t)?;
                let v = self.check(ctx, val, &tt)?;
                let inner = ctx.push_decl(name_of(x), one(), Some(tt));
                let b = self.check(&inner, body, &shift(ty, 1))?;
                Ok(let_term(x, b, v))
            }
            _ => self.check_by_infer(ctx, e, ty),
        }
    }

    fn check_by_infer(&self, ctx: &Ctx, e: &Expr, ty: &Tm) -> CResult<Tm> {
        let (t, actual) = self.infer(ctx, e)?;
        self.ensure_conv(ctx, e.span, ty, &actual)?;
        Ok(t)
    }

    fn check_lam(&self, ctx: &Ctx, items: &[Param], body: &Expr, ty: &Tm, span: Span) -> CResult<Tm> {
        let Some((x, typed)) = items.first() else {
            return self.check(ctx, body, ty);
        };
        let w = self.whnf(ctx, ty);
        let Term::Pi { ann, dom, cod, .. } = &*w else {
            return Err(Report::new(
                Code::Conv,
                span,
                format!("a function was given where {} is expected", self.show_nf(ctx, ty)),
            ));
        };
        if let Some((given_ty, given_ann)) = typed {
            let (mu, names) = lock_parts(*given_ann);
            if mu != *ann {
                return Err(Report::new(
                    Code::Modality,
                    given_ann.map_or(x.span, |l| l.span),
                    format!("binder `{}` is annotated {mu}, but the function type expects {ann}", x.name),
                ));
            }
            let locked = ctx.push_locks(&mu, &names);
            let (given, _) = self.check_type(&locked, given_ty)?;
            self.ensure_conv(&locked, given_ty.span, dom, &given)?;
        }
        let inner = ctx.push_decl(name_of(x), ann.clone(), Some(dom.clone()));
        let b = self.check_lam(&inner, &items[1..], body, cod, span)?;
        Ok(mk(Term::Lam {
            ann: ann.clone(),
            name: name_of(x),
            body: b,
        }))
    }
}

type Item<'e> = (&'e Ident, &'e Expr, Option<&'e LockAnn>);
type Param<'e> = (&'e Ident, Option<(&'e Expr, Option<&'e LockAnn>)>);

fn flatten(binders: &[Binder]) -> Vec<Item<'_>> {
    binders
        .iter()
        .flat_map(|b| b.names.iter().map(move |n| (n, &b.ty, b.ann.as_ref())))
        .collect()
}

fn flatten_params(params: &[LamParam]) -> Vec<Param<'_>> {
    let mut out = Vec::new();
    for p in params {
        match p {
            LamParam::Name(n) => out.push((n, None)),
            LamParam::Typed(b) => {
                for n in &b.names {
                    out.push((n, Some((&b.ty, b.ann.as_ref()))));
                }
            }
        }
    }
    out
}

fn cell_src_is_identity(c: &CellExpr) -> bool {
    match c {
        CellExpr::Identity(w, _) => normalize(w).is_identity(),
        CellExpr::Steps(steps) => steps
            .first()
            .is_some_and(|s| normalize(&Step::new(s.left.clone(), s.gen, s.right.clone()).src()).is_identity()),
    }
}

fn nat_literal(n: u64) -> Tm {
    let mut t = mk(Term::Zero);
    for _ in 0..n {
        t = mk(Term::Suc(t));
    }
    t
}

fn let_term(x: &Ident, body: Tm, val: Tm) -> Tm {
    app(
        mk(Term::Lam {
            ann: one(),
            name: name_of(x),
            body,
        }),
        val,
    )
}
