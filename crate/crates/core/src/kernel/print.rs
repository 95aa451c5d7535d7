//! Reading core terms back into surface syntax for messages.

use crate::diagnostic::Span;
use crate::modality::{compose, Gen, ModalityWord, TwoCell};
use crate::syntax::ast::{Binder, CellExpr, CellStep, Expr, ExprKind, Ident, LamParam, LockAnn};
use crate::syntax::print_expr;

use super::ctx::Ctx;
use super::term::{Name, Term, Tm};

const MAX_CHARS: usize = 400;

/// Renders `t` (living in `ctx`) in surface syntax, truncated for messages.
pub fn show(ctx: &Ctx, t: &Tm) -> String {
    let s = print_expr(&readback(ctx, t));
    if s.chars().count() > MAX_CHARS {
        let cut: String = s.chars().take(MAX_CHARS).collect();
        format!("{cut} ...")
    } else {
        s
    }
}

fn e(kind: ExprKind) -> Expr {
    Expr {
        kind,
        span: Span::default(),
    }
}

fn ident(name: &str) -> Ident {
    Ident {
        name: name.to_string(),
        span: Span::default(),
    }
}

fn lock(word: &ModalityWord) -> LockAnn {
    LockAnn::plain(word.clone(), Span::default())
}

pub fn cell_expr(cell: &TwoCell) -> CellExpr {
    if cell.is_identity() {
        return CellExpr::Identity(cell.src().clone(), Span::default());
    }
    CellExpr::Steps(
        cell.steps()
            .iter()
            .map(|s| CellStep {
                left: s.left.clone(),
                gen: s.gen,
                right: s.right.clone(),
                span: Span::default(),
            })
            .collect(),
    )
}

fn binder_name(ctx: &Ctx, name: &Name) -> Name {
    // Avoid capturing an outer name of the same spelling.
    if &**name == "_" || ctx.find(name).is_none() {
        return name.clone();
    }
    let mut k = 1;
    loop {
        let cand = format!("{name}{k}");
        if ctx.find(&cand).is_none() {
            return cand.into();
        }
        k += 1;
    }
}

pub fn readback(ctx: &Ctx, t: &Tm) -> Expr {
    use Term::*;
    let rb = |c: &Ctx, x: &Tm| Box::new(readback(c, x));
    let locked = |w: &ModalityWord| ctx.push_locks(w, &[]);
    match &**t {
        Var { idx, cell } => e(ExprKind::Var {
            name: ctx.slot_name(*idx),
            cell: (!cell.is_identity()).then(|| cell_expr(cell)),
        }),
        Const(n) => e(ExprKind::Var {
            name: n.to_string(),
            cell: None,
        }),
        Univ(n) => e(ExprKind::Univ(*n)),
        Pi {
            ann,
            name,
            dom,
            cod,
        } => {
            let n = binder_name(ctx, name);
            let inner = ctx.push_decl(n.clone(), ann.clone(), None);
            let cod = rb(&inner, cod);
            let dom = readback(&locked(ann), dom);
            if &*n == "_" && ann.is_identity() {
                e(ExprKind::Arrow {
                    dom: Box::new(dom),
                    cod,
                })
            } else {
                e(ExprKind::Pi {
                    binders: vec![Binder {
                        names: vec![ident(&n)],
                        ty: dom,
                        ann: (!ann.is_identity()).then(|| lock(ann)),
                    }],
                    cod,
                })
            }
        }
        Lam { ann, name, body } => {
            let n = binder_name(ctx, name);
            let inner = ctx.push_decl(n.clone(), ann.clone(), None);
            e(ExprKind::Lam {
                params: vec![LamParam::Name(ident(&n))],
                body: rb(&inner, body),
            })
        }
        App { fun, ann, arg } => {
            let arg = readback(&locked(ann), arg);
            let arg = if ann.is_identity() {
                arg
            } else {
                // Mark the modal argument position.
                e(ExprKind::ModIntro {
                    lock: lock(ann),
                    body: Box::new(arg),
                })
            };
            e(ExprKind::App {
                fun: rb(ctx, fun),
                arg: Box::new(arg),
            })
        }
        Sigma { name, fst, snd } => {
            let n = binder_name(ctx, name);
            let inner = ctx.push_decl(n.clone(), ModalityWord::identity(), None);
            e(ExprKind::Sigma {
                binders: vec![Binder {
                    names: vec![ident(&n)],
                    ty: readback(ctx, fst),
                    ann: None,
                }],
                snd: rb(&inner, snd),
            })
        }
        Pair(a, c) => e(ExprKind::Pair {
            fst: rb(ctx, a),
            snd: rb(ctx, c),
        }),
        Fst(a) => e(ExprKind::Fst(rb(ctx, a))),
        Snd(a) => e(ExprKind::Snd(rb(ctx, a))),
        Id { ty, lhs, rhs } => e(ExprKind::Id {
            ty: rb(ctx, ty),
            lhs: rb(ctx, lhs),
            rhs: rb(ctx, rhs),
        }),
        Refl => e(ExprKind::Refl),
        J { motive, base, eq } => e(ExprKind::J {
            motive: rb(ctx, motive),
            base: rb(ctx, base),
            eq: rb(ctx, eq),
        }),
        Modal { mu, ty } => e(ExprKind::Modal {
            lock: lock(mu),
            ty: rb(&locked(mu), ty),
        }),
        ModIntro { mu, body } => e(ExprKind::ModIntro {
            lock: lock(mu),
            body: rb(&locked(mu), body),
        }),
        LetMod {
            nu,
            mu,
            name,
            scrut,
            motive,
            body,
        } => {
            let n = binder_name(ctx, name);
            let y = binder_name(ctx, &"y".into());
            e(ExprKind::LetMod {
                outer: (!nu.is_identity()).then(|| lock(nu)),
                inner: mu.clone(),
                var: ident(&n),
                scrut: rb(&locked(nu), scrut),
                motive: Some((
                    ident(&y),
                    rb(&ctx.push_decl(y.clone(), nu.clone(), None), motive),
                )),
                body: rb(&ctx.push_decl(n.clone(), compose(nu, mu), None), body),
            })
        }
        Inst { body, arg } => e(ExprKind::Inst {
            body: rb(&ctx.push_lock(Gen::P, None), body),
            arg: rb(ctx, arg),
        }),
        Int => e(ExprKind::Int),
        I0 => e(ExprKind::Num(0)),
        I1 => e(ExprKind::Num(1)),
        IMeet(a, c) => e(ExprKind::Meet(rb(ctx, a), rb(ctx, c))),
        IJoin(a, c) => e(ExprKind::Join(rb(ctx, a), rb(ctx, c))),
        Nat => e(ExprKind::Nat),
        Zero => e(ExprKind::Num(0)),
        Suc(a) => {
            // Literals print as numerals.
            let mut n = 1;
            let mut cur = a;
            while let Suc(x) = &**cur {
                n += 1;
                cur = x;
            }
            if matches!(**cur, Zero) {
                e(ExprKind::Num(n))
            } else {
                e(ExprKind::Suc(rb(ctx, a)))
            }
        }
        NatRec {
            motive,
            zero,
            succ,
            target,
        } => e(ExprKind::NatRec {
            motive: rb(ctx, motive),
            zero: rb(ctx, zero),
            succ: rb(ctx, succ),
            target: rb(ctx, target),
        }),
        Bool => e(ExprKind::Bool),
        True => e(ExprKind::True),
        False => e(ExprKind::False),
        If {
            motive,
            then_,
            else_,
            target,
        } => e(ExprKind::If {
            motive: rb(ctx, motive),
            then_: rb(ctx, then_),
            else_: rb(ctx, else_),
            target: rb(ctx, target),
        }),
        Unit => e(ExprKind::Unit),
        Tt => e(ExprKind::Tt),
        Empty => e(ExprKind::Empty),
        Absurd { motive, target } => e(ExprKind::Absurd {
            motive: rb(ctx, motive),
            target: rb(ctx, target),
        }),
        Lift(a) => e(ExprKind::Lift(rb(ctx, a))),
        LiftIn(a) => e(ExprKind::LiftIn(rb(ctx, a))),
        Lower(a) => e(ExprKind::Lower(rb(ctx, a))),
    }
}
