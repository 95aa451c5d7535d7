//! Weak-head normalization, full normalization and conversion.

use std::collections::HashMap;
use std::rc::Rc;

use crate::lattice::{self, AtomId, LatticePoly};
use crate::modality::{compose, Gen, ModalityWord, TwoCell};

use super::ctx::Ctx;
use super::subst::{instantiate, shift, subst_top};
use super::term::{app, var_id, Name, Term, Tm};

#[derive(Clone, Debug)]
pub struct Global {
    pub ty: Tm,
    /// `None` for axioms.
    pub def: Option<Tm>,
}

/// Global definitions and axioms, all closed.
#[derive(Clone, Debug, Default)]
pub struct Env {
    globals: HashMap<String, Global>,
    order: Vec<String>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn insert(&mut self, name: &str, ty: Tm, def: Option<Tm>) {
        if !self.globals.contains_key(name) {
            self.order.push(name.to_string());
        }
        self.globals.insert(name.to_string(), Global { ty, def });
    }

    pub fn remove(&mut self, name: &str) -> Option<Global> {
        self.order.retain(|n| n != name);
        self.globals.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&Global> {
        self.globals.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.globals.contains_key(name)
    }

    /// Names in insertion order.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

fn mk(t: Term) -> Tm {
    Rc::new(t)
}

pub fn whnf(env: &Env, ctx: &Ctx, t: &Tm) -> Tm {
    use Term::*;
    match &**t {
        Const(n) => match env.get(n).and_then(|g| g.def.clone()) {
            Some(def) => whnf(env, ctx, &def),
            None => t.clone(),
        },
        App { fun, ann, arg } => {
            let f = whnf(env, ctx, fun);
            if let Lam { body, .. } = &*f {
                if let Ok(r) = subst_top(ctx, body, arg) {
                    return whnf(env, ctx, &r);
                }
            }
            if Rc::ptr_eq(&f, fun) {
                t.clone()
            } else {
                mk(App {
                    fun: f,
                    ann: ann.clone(),
                    arg: arg.clone(),
                })
            }
        }
        Fst(p) => match &*whnf(env, ctx, p) {
            Pair(a, _) => whnf(env, ctx, a),
            _ => t.clone(),
        },
        Snd(p) => match &*whnf(env, ctx, p) {
            Pair(_, b) => whnf(env, ctx, b),
            _ => t.clone(),
        },
        J { base, eq, .. } => match &*whnf(env, ctx, eq) {
            Refl => whnf(env, ctx, base),
            _ => t.clone(),
        },
        NatRec {
            motive,
            zero,
            succ,
            target,
        } => match &*whnf(env, ctx, target) {
            Zero => whnf(env, ctx, zero),
            Suc(n) => {
                let rec = mk(NatRec {
                    motive: motive.clone(),
                    zero: zero.clone(),
                    succ: succ.clone(),
                    target: n.clone(),
                });
                whnf(env, ctx, &app(app(succ.clone(), n.clone()), rec))
            }
            _ => t.clone(),
        },
        If {
            then_,
            else_,
            target,
            ..
        } => match &*whnf(env, ctx, target) {
            True => whnf(env, ctx, then_),
            False => whnf(env, ctx, else_),
            _ => t.clone(),
        },
        Lower(x) => match &*whnf(env, ctx, x) {
            LiftIn(y) => whnf(env, ctx, y),
            _ => t.clone(),
        },
        Modal { mu, ty } if mu.is_identity() => whnf(env, ctx, ty),
        ModIntro { mu, body } if mu.is_identity() => whnf(env, ctx, body),
        LetMod {
            mu, scrut, body, ..
        } if mu.is_identity() => match subst_top(ctx, body, scrut) {
            Ok(r) => whnf(env, ctx, &r),
            Err(_) => t.clone(),
        },
        LetMod {
            nu, scrut, body, ..
        } => {
            let s = whnf(env, &ctx.push_locks(nu, &[]), scrut);
            if let ModIntro { body: a, .. } = &*s {
                if let Ok(r) = subst_top(ctx, body, a) {
                    return whnf(env, ctx, &r);
                }
            }
            t.clone()
        }
        Inst { body, arg } => {
            let b = whnf(env, &ctx.push_lock(Gen::P, None), body);
            match instantiate(ctx, &b, arg) {
                Ok(r) => whnf(env, ctx, &r),
                Err(_) if Rc::ptr_eq(&b, body) => t.clone(),
                Err(_) => mk(Inst {
                    body: b,
                    arg: arg.clone(),
                }),
            }
        }
        I0 | I1 | IMeet(..) | IJoin(..) => lattice_canon(env, ctx, t),
        _ => t.clone(),
    }
}

/// Reads an `Int`-typed term as a lattice polynomial over its non-lattice
/// subterms, which `intern` numbers.
fn poly_of(
    env: &Env,
    ctx: &Ctx,
    t: &Tm,
    intern: &mut dyn FnMut(&Tm) -> AtomId,
) -> LatticePoly {
    match &**t {
        Term::I0 => LatticePoly::zero(),
        Term::I1 => LatticePoly::one(),
        Term::IMeet(a, b) => poly_of(env, ctx, a, intern).meet(&poly_of(env, ctx, b, intern)),
        Term::IJoin(a, b) => poly_of(env, ctx, a, intern).join(&poly_of(env, ctx, b, intern)),
        _ => {
            let w = whnf(env, ctx, t);
            if w.is_lattice_head() {
                poly_of(env, ctx, &w, intern)
            } else {
                LatticePoly::atom(intern(&w))
            }
        }
    }
}

fn lattice_canon(env: &Env, ctx: &Ctx, t: &Tm) -> Tm {
    let mut atoms: Vec<(String, Tm)> = Vec::new();
    let poly = poly_of(env, ctx, t, &mut |a| {
        let key = format!("{:?}", nf(env, ctx, a));
        match atoms.iter().position(|(k, _)| *k == key) {
            Some(i) => i as AtomId,
            None => {
                atoms.push((key, a.clone()));
                (atoms.len() - 1) as AtomId
            }
        }
    });
    // Order atoms by key so the rebuilt term is independent of input order.
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| atoms[a].0.cmp(&atoms[b].0));
    let mut rank = vec![0; atoms.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as AtomId;
    }
    let poly = poly.substitute(&|a| LatticePoly::atom(rank[a as usize]));
    poly_to_term(&poly, &|r| atoms[order[r as usize]].1.clone())
}

pub fn poly_to_term(p: &LatticePoly, atom: &dyn Fn(AtomId) -> Tm) -> Tm {
    let mut acc: Option<Tm> = None;
    for mono in p.monomials() {
        let mut m: Option<Tm> = None;
        for &a in mono {
            let x = atom(a);
            m = Some(match m {
                None => x,
                Some(prev) => mk(Term::IMeet(prev, x)),
            });
        }
        let m = m.unwrap_or_else(|| mk(Term::I1));
        acc = Some(match acc {
            None => m,
            Some(prev) => mk(Term::IJoin(prev, m)),
        });
    }
    acc.unwrap_or_else(|| mk(Term::I0))
}

/// Full normal form.
pub fn nf(env: &Env, ctx: &Ctx, t: &Tm) -> Tm {
    use Term::*;
    let w = whnf(env, ctx, t);
    let go = |c: &Ctx, x: &Tm| nf(env, c, x);
    let decl = |name: &Name, ann: &ModalityWord| ctx.push_decl(name.clone(), ann.clone(), None);
    let one = ModalityWord::identity();
    let under = "_".into();
    let out = match &*w {
        Var { .. } | Const(_) | Univ(_) | Refl | Int | I0 | I1 | Nat | Zero | Bool | True
        | False | Unit | Tt | Empty => return w,
        Pi {
            ann,
            name,
            dom,
            cod,
        } => Pi {
            ann: ann.clone(),
            name: name.clone(),
            dom: go(&ctx.push_locks(ann, &[]), dom),
            cod: go(&decl(name, ann), cod),
        },
        Lam { ann, name, body } => Lam {
            ann: ann.clone(),
            name: name.clone(),
            body: go(&decl(name, ann), body),
        },
        App { fun, ann, arg } => App {
            fun: go(ctx, fun),
            ann: ann.clone(),
            arg: go(&ctx.push_locks(ann, &[]), arg),
        },
        Sigma { name, fst, snd } => Sigma {
            name: name.clone(),
            fst: go(ctx, fst),
            snd: go(&decl(name, &one), snd),
        },
        Pair(a, b) => Pair(go(ctx, a), go(ctx, b)),
        Fst(a) => Fst(go(ctx, a)),
        Snd(a) => Snd(go(ctx, a)),
        Id { ty, lhs, rhs } => Id {
            ty: go(ctx, ty),
            lhs: go(ctx, lhs),
            rhs: go(ctx, rhs),
        },
        J { motive, base, eq } => J {
            motive: go(ctx, motive),
            base: go(ctx, base),
            eq: go(ctx, eq),
        },
        Modal { mu, ty } => Modal {
            mu: mu.clone(),
            ty: go(&ctx.push_locks(mu, &[]), ty),
        },
        ModIntro { mu, body } => ModIntro {
            mu: mu.clone(),
            body: go(&ctx.push_locks(mu, &[]), body),
        },
        LetMod {
            nu,
            mu,
            name,
            scrut,
            motive,
            body,
        } => LetMod {
            nu: nu.clone(),
            mu: mu.clone(),
            name: name.clone(),
            scrut: go(&ctx.push_locks(nu, &[]), scrut),
            motive: go(&decl(&under, nu), motive),
            body: go(&decl(name, &compose(nu, mu)), body),
        },
        Inst { body, arg } => Inst {
            body: go(&ctx.push_lock(Gen::P, None), body),
            arg: go(ctx, arg),
        },
        IMeet(a, b) => IMeet(go(ctx, a), go(ctx, b)),
        IJoin(a, b) => IJoin(go(ctx, a), go(ctx, b)),
        Suc(a) => Suc(go(ctx, a)),
        NatRec {
            motive,
            zero,
            succ,
            target,
        } => NatRec {
            motive: go(ctx, motive),
            zero: go(ctx, zero),
            succ: go(ctx, succ),
            target: go(ctx, target),
        },
        If {
            motive,
            then_,
            else_,
            target,
        } => If {
            motive: go(ctx, motive),
            then_: go(ctx, then_),
            else_: go(ctx, else_),
            target: go(ctx, target),
        },
        Absurd { motive, target } => Absurd {
            motive: go(ctx, motive),
            target: go(ctx, target),
        },
        Lift(a) => Lift(go(ctx, a)),
        LiftIn(a) => LiftIn(go(ctx, a)),
        Lower(a) => Lower(go(ctx, a)),
    };
    mk(out)
}

pub fn cells_equal(a: &TwoCell, b: &TwoCell) -> bool {
    a == b || a.canonical() == b.canonical()
}

/// Untyped conversion with η for functions and pairs and definitional
/// lattice equations on interval terms.
pub fn conv(env: &Env, ctx: &Ctx, a: &Tm, b: &Tm) -> bool {
    use Term::*;
    if Rc::ptr_eq(a, b) {
        return true;
    }
    let a = whnf(env, ctx, a);
    let b = whnf(env, ctx, b);
    if a.is_lattice_head() || b.is_lattice_head() {
        return lattice_conv(env, ctx, &a, &b);
    }
    let c = |x: &Tm, y: &Tm| conv(env, ctx, x, y);
    let locked = |w: &ModalityWord| ctx.push_locks(w, &[]);
    let decl = |ann: &ModalityWord| ctx.push_decl("_".into(), ann.clone(), None);
    let one = ModalityWord::identity();
    match (&*a, &*b) {
        (Var { idx: i, cell: x }, Var { idx: j, cell: y }) => i == j && cells_equal(x, y),
        (Const(x), Const(y)) => x == y,
        (Univ(m), Univ(n)) => m == n,
        (
            Pi {
                ann: a1,
                dom: d1,
                cod: c1,
                ..
            },
            Pi {
                ann: a2,
                dom: d2,
                cod: c2,
                ..
            },
        ) => a1 == a2 && conv(env, &locked(a1), d1, d2) && conv(env, &decl(a1), c1, c2),
        (
            Lam {
                ann: a1, body: b1, ..
            },
            Lam {
                ann: a2, body: b2, ..
            },
        ) => a1 == a2 && conv(env, &decl(a1), b1, b2),
        (Lam { ann, body, .. }, _) => conv(env, &decl(ann), body, &eta_app(&b, ann)),
        (_, Lam { ann, body, .. }) => conv(env, &decl(ann), &eta_app(&a, ann), body),
        (
            App {
                fun: f1,
                ann: a1,
                arg: x1,
            },
            App {
                fun: f2,
                ann: a2,
                arg: x2,
            },
        ) => a1 == a2 && c(f1, f2) && conv(env, &locked(a1), x1, x2),
        (
            Sigma {
                fst: f1, snd: s1, ..
            },
            Sigma {
                fst: f2, snd: s2, ..
            },
        ) => c(f1, f2) && conv(env, &decl(&one), s1, s2),
        (Pair(a1, a2), Pair(b1, b2)) => c(a1, b1) && c(a2, b2),
        (Pair(a1, a2), _) => c(a1, &mk(Fst(b.clone()))) && c(a2, &mk(Snd(b.clone()))),
        (_, Pair(b1, b2)) => c(&mk(Fst(a.clone())), b1) && c(&mk(Snd(a.clone())), b2),
        (Fst(x), Fst(y)) | (Snd(x), Snd(y)) => c(x, y),
        (
            Id {
                ty: t1,
                lhs: l1,
                rhs: r1,
            },
            Id {
                ty: t2,
                lhs: l2,
                rhs: r2,
            },
        ) => c(t1, t2) && c(l1, l2) && c(r1, r2),
        (
            J {
                motive: m1,
                base: b1,
                eq: e1,
            },
            J {
                motive: m2,
                base: b2,
                eq: e2,
            },
        ) => c(m1, m2) && c(b1, b2) && c(e1, e2),
        (Modal { mu: m1, ty: t1 }, Modal { mu: m2, ty: t2 }) => {
            m1 == m2 && conv(env, &locked(m1), t1, t2)
        }
        (ModIntro { mu: m1, body: b1 }, ModIntro { mu: m2, body: b2 }) => {
            m1 == m2 && conv(env, &locked(m1), b1, b2)
        }
        (
            LetMod {
                nu: n1,
                mu: m1,
                scrut: s1,
                body: b1,
                ..
            },
            LetMod {
                nu: n2,
                mu: m2,
                scrut: s2,
                body: b2,
                ..
            },
        ) => {
            n1 == n2
                && m1 == m2
                && conv(env, &locked(n1), s1, s2)
                && conv(env, &decl(&compose(n1, m1)), b1, b2)
        }
        (Inst { body: b1, arg: x1 }, Inst { body: b2, arg: x2 }) => {
            conv(env, &ctx.push_lock(Gen::P, None), b1, b2) && c(x1, x2)
        }
        (Refl, Refl)
        | (Int, Int)
        | (Nat, Nat)
        | (Zero, Zero)
        | (Bool, Bool)
        | (True, True)
        | (False, False)
        | (Unit, Unit)
        | (Tt, Tt)
        | (Empty, Empty) => true,
        (Suc(x), Suc(y)) | (Lift(x), Lift(y)) | (LiftIn(x), LiftIn(y)) | (Lower(x), Lower(y)) => {
            c(x, y)
        }
        (
            NatRec {
                motive: m1,
                zero: z1,
                succ: s1,
                target: t1,
            },
            NatRec {
                motive: m2,
                zero: z2,
                succ: s2,
                target: t2,
            },
        )
        | (
            If {
                motive: m1,
                then_: z1,
                else_: s1,
                target: t1,
            },
            If {
                motive: m2,
                then_: z2,
                else_: s2,
                target: t2,
            },
        ) => c(m1, m2) && c(z1, z2) && c(s1, s2) && c(t1, t2),
        (
            Absurd {
                motive: m1,
                target: t1,
            },
            Absurd {
                motive: m2,
                target: t2,
            },
        ) => c(m1, m2) && c(t1, t2),
        _ => false,
    }
}

/// `t x` for the η-expansion of `t` under a fresh `x : (ann | _)`.
fn eta_app(t: &Tm, ann: &ModalityWord) -> Tm {
    mk(Term::App {
        fun: shift(t, 1),
        ann: ann.clone(),
        arg: var_id(ann.p_count(), ann),
    })
}

fn lattice_conv(env: &Env, ctx: &Ctx, a: &Tm, b: &Tm) -> bool {
    let mut atoms: Vec<Tm> = Vec::new();
    let mut intern = |t: &Tm| -> AtomId {
        if let Some(i) = atoms.iter().position(|u| conv(env, ctx, u, t)) {
            return i as AtomId;
        }
        atoms.push(t.clone());
        (atoms.len() - 1) as AtomId
    };
    let pa = poly_of(env, ctx, a, &mut intern);
    let pb = poly_of(env, ctx, b, &mut intern);
    lattice::eq(&pa, &pb)
}
