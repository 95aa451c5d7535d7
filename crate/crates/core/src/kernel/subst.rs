//! Renaming, substitution and the 2-cell action on terms.

use std::rc::Rc;

use crate::modality::{normalize, remove_nth_p, BoundaryError, Gen, ModalityWord, Step, TwoCell};

use super::ctx::{Ctx, Entry};
use super::term::{Term, Tm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error("an interval variable is consumed by the 2-cell")]
    Consumed,
    #[error("the instantiated interval variable is used non-trivially")]
    Stuck,
}

#[derive(Clone, Copy, Debug)]
pub enum LocalEntry {
    Slot,
    Lock(Gen),
}

/// The binders and locks crossed while walking into a term.
#[derive(Clone, Debug, Default)]
pub struct Local(Vec<LocalEntry>);

impl Local {
    pub fn new() -> Self {
        Local(Vec::new())
    }

    /// Converts context entries (outermost first).
    pub fn from_entries(entries: &[Entry]) -> Self {
        Local(
            entries
                .iter()
                .map(|e| match e {
                    Entry::Decl { .. } => LocalEntry::Slot,
                    Entry::Lock { gen, .. } => LocalEntry::Lock(*gen),
                })
                .collect(),
        )
    }

    pub fn slots(&self) -> usize {
        self.0
            .iter()
            .filter(|e| matches!(e, LocalEntry::Slot | LocalEntry::Lock(Gen::P)))
            .count()
    }

    pub fn locks(&self) -> ModalityWord {
        normalize(&ModalityWord::from_gens(self.0.iter().filter_map(|e| match e {
            LocalEntry::Lock(g) => Some(*g),
            LocalEntry::Slot => None,
        })))
    }

    /// de Bruijn index (from the top of this local block) of its `s`-th
    /// `p`-lock.
    pub fn plock_index(&self, s: usize) -> usize {
        let mut seen = 0;
        let mut below = 0;
        for e in &self.0 {
            match e {
                LocalEntry::Lock(Gen::P) => {
                    if seen == s {
                        return self.slots() - 1 - below;
                    }
                    seen += 1;
                    below += 1;
                }
                LocalEntry::Slot => below += 1,
                LocalEntry::Lock(_) => {}
            }
        }
        panic!("local block has no p-lock number {s}")
    }

    fn push(&mut self, e: LocalEntry) {
        self.0.push(e);
    }

    fn push_word(&mut self, w: &ModalityWord) {
        for &g in w.gens() {
            self.0.push(LocalEntry::Lock(g));
        }
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn truncate(&mut self, n: usize) {
        self.0.truncate(n);
    }
}

type VarFn<'a> = dyn FnMut(usize, &TwoCell, &Local) -> Result<Tm, SubstError> + 'a;

/// Rebuilds `t`, replacing each free variable (index at least the number of
/// local slots) by `f(idx, cell, local)`.
pub fn traverse(t: &Tm, local: &mut Local, f: &mut VarFn) -> Result<Tm, SubstError> {
    use Term::*;
    macro_rules! go {
        ($e:expr) => {
            traverse($e, local, f)?
        };
    }
    macro_rules! under_decl {
        ($e:expr) => {{
            let n = local.len();
            local.push(LocalEntry::Slot);
            let r = traverse($e, local, f);
            local.truncate(n);
            r?
        }};
    }
    macro_rules! under_word {
        ($w:expr, $e:expr) => {{
            let n = local.len();
            local.push_word($w);
            let r = traverse($e, local, f);
            local.truncate(n);
            r?
        }};
    }
    let out = match &**t {
        Var { idx, cell } => {
            return if *idx < local.slots() {
                Ok(t.clone())
            } else {
                f(*idx, cell, local)
            }
        }
        Const(_) | Univ(_) | Refl | Int | I0 | I1 | Nat | Zero | Bool | True | False | Unit
        | Tt | Empty => return Ok(t.clone()),
        Pi {
            ann,
            name,
            dom,
            cod,
        } => Pi {
            ann: ann.clone(),
            name: name.clone(),
            dom: under_word!(ann, dom),
            cod: under_decl!(cod),
        },
        Lam { ann, name, body } => Lam {
            ann: ann.clone(),
            name: name.clone(),
            body: under_decl!(body),
        },
        App { fun, ann, arg } => App {
            fun: go!(fun),
            ann: ann.clone(),
            arg: under_word!(ann, arg),
        },
        Sigma { name, fst, snd } => Sigma {
            name: name.clone(),
            fst: go!(fst),
            snd: under_decl!(snd),
        },
        Pair(a, b) => Pair(go!(a), go!(b)),
        Fst(a) => Fst(go!(a)),
        Snd(a) => Snd(go!(a)),
        Id { ty, lhs, rhs } => Id {
            ty: go!(ty),
            lhs: go!(lhs),
            rhs: go!(rhs),
        },
        J { motive, base, eq } => J {
            motive: go!(motive),
            base: go!(base),
            eq: go!(eq),
        },
        Modal { mu, ty } => Modal {
            mu: mu.clone(),
            ty: under_word!(mu, ty),
        },
        ModIntro { mu, body } => ModIntro {
            mu: mu.clone(),
            body: under_word!(mu, body),
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
            scrut: under_word!(nu, scrut),
            motive: under_decl!(motive),
            body: under_decl!(body),
        },
        Inst { body, arg } => Inst {
            body: under_word!(&ModalityWord::single(Gen::P), body),
            arg: go!(arg),
        },
        IMeet(a, b) => IMeet(go!(a), go!(b)),
        IJoin(a, b) => IJoin(go!(a), go!(b)),
        Suc(a) => Suc(go!(a)),
        NatRec {
            motive,
            zero,
            succ,
            target,
        } => NatRec {
            motive: go!(motive),
            zero: go!(zero),
            succ: go!(succ),
            target: go!(target),
        },
        If {
            motive,
            then_,
            else_,
            target,
        } => If {
            motive: go!(motive),
            then_: go!(then_),
            else_: go!(else_),
            target: go!(target),
        },
        Absurd { motive, target } => Absurd {
            motive: go!(motive),
            target: go!(target),
        },
        Lift(a) => Lift(go!(a)),
        LiftIn(a) => LiftIn(go!(a)),
        Lower(a) => Lower(go!(a)),
    };
    Ok(Rc::new(out))
}

/// Applies an index map to the free variables; cells are untouched.
pub fn rename(t: &Tm, map: &dyn Fn(usize) -> usize) -> Tm {
    traverse(t, &mut Local::new(), &mut |idx, cell, local| {
        let c = local.slots();
        Ok(Rc::new(Term::Var {
            idx: map(idx - c) + c,
            cell: cell.clone(),
        }))
    })
    .expect("renaming cannot fail")
}

/// Removes the innermost declaration, if `t` does not mention it.
pub fn strengthen(t: &Tm) -> Option<Tm> {
    let hit = std::cell::Cell::new(false);
    let r = rename(t, &|i| {
        if i == 0 {
            hit.set(true);
            0
        } else {
            i - 1
        }
    });
    (!hit.get()).then_some(r)
}

/// Weakens by `k` declarations inserted below the free variables.
pub fn shift(t: &Tm, k: usize) -> Tm {
    if k == 0 {
        return t.clone();
    }
    rename(t, &|i| i + k)
}

/// The 2-cell action `t^α`. For `α : μ ⇒ ν` and `t` in `scope.{μ}`, yields
/// the corresponding term in `scope.{ν}`.
pub fn act(scope: &Ctx, t: &Tm, alpha: &TwoCell) -> Result<Tm, SubstError> {
    if alpha.is_identity() {
        return Ok(t.clone());
    }
    let mu = alpha.src().clone();
    let m = mu.p_count();
    let n = alpha.dst().p_count();
    traverse(t, &mut Local::new(), &mut |idx, cell, local| {
        let c = local.slots();
        let kappa = local.locks();
        let j = idx - c;
        if j < m {
            let r = m - 1 - j;
            let head = mu.through_nth_p(r);
            let delta = cell
                .whisker_left(&head)
                .vcomp(&alpha.whisker_right(&kappa))?
                .normalized();
            let (s, steps) = follow_p(&delta, r)?;
            let cell = TwoCell::from_steps(&ModalityWord::identity(), steps)?;
            Ok(Rc::new(Term::Var {
                idx: c + (n - 1 - s),
                cell,
            }))
        } else {
            let lambda = scope.locks_after_slot(j - m);
            let cell = cell.vcomp(&alpha.whisker(&lambda, &kappa))?;
            Ok(Rc::new(Term::Var {
                idx: idx - m + n,
                cell,
            }))
        }
    })
}

/// Tracks the `r`-th source `p` of `delta` to the target, collecting the
/// steps that act to its right (with the left whisker cut after it).
fn follow_p(delta: &TwoCell, r: usize) -> Result<(usize, Vec<Step>), SubstError> {
    let mut pos = r;
    let mut steps = Vec::new();
    for step in delta.steps() {
        let lp = step.left.p_count();
        let gp = step.gen.src().p_count();
        if pos < lp {
            steps.push(Step::new(
                step.left.after_nth_p(pos),
                step.gen,
                step.right.clone(),
            ));
        } else if pos < lp + gp {
            return Err(SubstError::Consumed);
        }
        pos = step.p_transport().0[pos].ok_or(SubstError::Consumed)?;
    }
    Ok((pos, steps))
}

/// Moves `t` from `Γ.{ν}` into `Γ, Δ`, where the locks of `Δ` compose to
/// `ν`: the `p`-slots of `ν` become the `p`-locks of `Δ`.
pub fn place(t: &Tm, nu_p: usize, delta: &Local) -> Tm {
    let c = delta.slots();
    rename(t, &|i| {
        if i < nu_p {
            delta.plock_index(nu_p - 1 - i)
        } else {
            i - nu_p + c
        }
    })
}

/// `body[value/x]` where `x : (ann | A)` is the innermost slot of the
/// context `body` lives in, `scope` is the context before `x`, and `value`
/// lives in `scope.{ann}`.
pub fn subst_top(scope: &Ctx, body: &Tm, value: &Tm) -> Result<Tm, SubstError> {
    traverse(body, &mut Local::new(), &mut |idx, cell, local| {
        let c = local.slots();
        if idx == c {
            let v = act(scope, value, cell)?;
            Ok(place(&v, cell.dst().p_count(), local))
        } else {
            Ok(Rc::new(Term::Var {
                idx: idx - 1,
                cell: cell.clone(),
            }))
        }
    })
}

/// Reduces `Inst { body, arg }` in `scope` by substituting `arg` for the
/// interval slot. Fails with [`SubstError::Stuck`] when a variable from
/// `scope` depends on the slot through more than a weakening.
pub fn instantiate(scope: &Ctx, body: &Tm, arg: &Tm) -> Result<Tm, SubstError> {
    // `arg` as an interval variable sitting directly under the slot.
    let diagonal = match &**arg {
        Term::Var { idx, cell } if cell.is_identity() && scope.is_plock(*idx) => Some(*idx),
        _ => None,
    };
    traverse(body, &mut Local::new(), &mut |idx, cell, local| {
        let c = local.slots();
        if idx == c {
            let v = act(scope, arg, cell)?;
            return Ok(place(&v, cell.dst().p_count(), local));
        }
        let k = idx - c - 1;
        let kp = scope.locks_after_slot(k).p_count();
        if let Some(reduced) = cell.remove_weakened_p(kp) {
            return Ok(Rc::new(Term::Var {
                idx: idx - 1,
                cell: reduced,
            }));
        }
        if let Some(j) = diagonal {
            if k > j && kp > 0 {
                if let Some(reduced) = cell.remove_weakened_p(kp - 1) {
                    if *reduced.dst() == remove_nth_p(cell.dst(), kp) {
                        return Ok(Rc::new(Term::Var {
                            idx: idx - 1,
                            cell: reduced,
                        }));
                    }
                }
            }
        }
        Err(SubstError::Stuck)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::term::{app, var_id};
    use crate::modality::CellGen;

    fn w(s: &str) -> ModalityWord {
        s.parse().unwrap()
    }

    #[test]
    fn identity_action_is_identity() {
        let t = app(var_id(0, &w("1")), var_id(1, &w("1")));
        let r = act(&Ctx::empty(), &t, &TwoCell::identity(&w("g"))).unwrap();
        assert!(Rc::ptr_eq(&r, &t));
    }

    #[test]
    fn action_on_outer_variable_composes() {
        // x : (g | A) in scope; inside `t` it is used under a g-lock.
        let scope = Ctx::empty().push_decl("x".into(), w("g"), None);
        let t = var_id(0, &w("g"));
        let eps = TwoCell::generator(CellGen::Eps0);
        let r = act(&scope, &t, &eps).unwrap();
        match &*r {
            Term::Var { idx, cell } => {
                assert_eq!(*idx, 0);
                assert_eq!(*cell.src(), w("g"));
                assert!(cell.dst().is_identity());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weakening_then_instantiation_cancels() {
        // a : (1 | A) seen under a p-lock through `wk`, then instantiated.
        let scope = Ctx::empty().push_decl("a".into(), w("1"), None);
        let wk = TwoCell::generator(CellGen::Weaken);
        let body = act(&scope, &var_id(0, &w("1")), &wk).unwrap();
        let r = instantiate(&scope, &body, &Rc::new(Term::I0)).unwrap();
        match &*r {
            Term::Var { idx, cell } => {
                assert_eq!(*idx, 0);
                assert!(cell.is_identity());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn substitution_distributes_over_application() {
        // (f u)[v/u] with f outer.
        let scope = Ctx::empty().push_decl("f".into(), w("1"), None);
        let body = app(var_id(1, &w("1")), var_id(0, &w("1")));
        let r = subst_top(&scope, &body, &Rc::new(Term::Tt)).unwrap();
        match &*r {
            Term::App { fun, arg, .. } => {
                assert!(matches!(**fun, Term::Var { idx: 0, .. }));
                assert!(matches!(**arg, Term::Tt));
            }
            other => panic!("{other:?}"),
        }
    }
}
