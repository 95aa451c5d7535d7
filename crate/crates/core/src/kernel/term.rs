use std::rc::Rc;

use crate::modality::{ModalityWord, TwoCell};

pub type Name = Rc<str>;
pub type Tm = Rc<Term>;

/// Core terms in de Bruijn form.
///
/// Indices count *slots*: declarations and `p`-locks (each `p`-lock is an
/// interval variable). Other locks occupy no slot. A variable carries the
/// 2-cell from its annotation to the locks between it and the use site.
///
/// Sub-terms living under locks: `Pi::dom` and `App::arg` under `ann`,
/// `Modal::ty` and `ModIntro::body` under `mu`, `LetMod::scrut` under `nu`,
/// `Inst::body` under a single `p`.
#[derive(Clone, Debug)]
pub enum Term {
    Var {
        idx: usize,
        cell: TwoCell,
    },
    Const(Name),
    Univ(u32),
    Pi {
        ann: ModalityWord,
        name: Name,
        dom: Tm,
        cod: Tm,
    },
    Lam {
        ann: ModalityWord,
        name: Name,
        body: Tm,
    },
    App {
        fun: Tm,
        ann: ModalityWord,
        arg: Tm,
    },
    Sigma {
        name: Name,
        fst: Tm,
        snd: Tm,
    },
    Pair(Tm, Tm),
    Fst(Tm),
    Snd(Tm),
    Id {
        ty: Tm,
        lhs: Tm,
        rhs: Tm,
    },
    Refl,
    /// Based path induction: `motive : (y : A) -> Id A a y -> U k`.
    J {
        motive: Tm,
        base: Tm,
        eq: Tm,
    },
    Modal {
        mu: ModalityWord,
        ty: Tm,
    },
    ModIntro {
        mu: ModalityWord,
        body: Tm,
    },
    /// `let{nu} mod{mu}(x) = scrut return y => motive in body`; the motive
    /// binds `y : (nu | <mu| A>)`, the body binds `x : (nu.mu | A)`.
    LetMod {
        nu: ModalityWord,
        mu: ModalityWord,
        name: Name,
        scrut: Tm,
        motive: Tm,
        body: Tm,
    },
    /// Instantiates the interval slot of a `p`-locked term.
    Inst {
        body: Tm,
        arg: Tm,
    },
    Int,
    I0,
    I1,
    IMeet(Tm, Tm),
    IJoin(Tm, Tm),
    Nat,
    Zero,
    Suc(Tm),
    NatRec {
        motive: Tm,
        zero: Tm,
        succ: Tm,
        target: Tm,
    },
    Bool,
    True,
    False,
    If {
        motive: Tm,
        then_: Tm,
        else_: Tm,
        target: Tm,
    },
    Unit,
    Tt,
    Empty,
    Absurd {
        motive: Tm,
        target: Tm,
    },
    Lift(Tm),
    LiftIn(Tm),
    Lower(Tm),
}

pub fn var(idx: usize, cell: TwoCell) -> Tm {
    Rc::new(Term::Var { idx, cell })
}

/// A variable reached through the identity cell on `ann`.
pub fn var_id(idx: usize, ann: &ModalityWord) -> Tm {
    var(idx, TwoCell::identity(ann))
}

pub fn app(fun: Tm, arg: Tm) -> Tm {
    Rc::new(Term::App {
        fun,
        ann: ModalityWord::identity(),
        arg,
    })
}

pub fn arrow(dom: Tm, cod: Tm) -> Tm {
    Rc::new(Term::Pi {
        ann: ModalityWord::identity(),
        name: "_".into(),
        dom,
        cod,
    })
}

impl Term {
    /// Heads that the lattice normalizer rewrites.
    pub fn is_lattice_head(&self) -> bool {
        matches!(self, Term::I0 | Term::I1 | Term::IMeet(..) | Term::IJoin(..))
    }

    /// Immediate subterms.
    pub fn children(&self) -> Vec<&Tm> {
        use Term::*;
        match self {
            Var { .. } | Const(_) | Univ(_) | Refl | Int | I0 | I1 | Nat | Zero | Bool | True
            | False | Unit | Tt | Empty => vec![],
            Pi { dom, cod, .. } => vec![dom, cod],
            Lam { body, .. } => vec![body],
            App { fun, arg, .. } => vec![fun, arg],
            Sigma { fst, snd, .. } | Pair(fst, snd) => vec![fst, snd],
            Fst(t) | Snd(t) | Suc(t) | Lift(t) | LiftIn(t) | Lower(t) => vec![t],
            Id { ty, lhs, rhs } => vec![ty, lhs, rhs],
            J { motive, base, eq } => vec![motive, base, eq],
            Modal { ty, .. } => vec![ty],
            ModIntro { body, .. } => vec![body],
            LetMod {
                scrut, motive, body, ..
            } => vec![scrut, motive, body],
            Inst { body, arg } => vec![body, arg],
            IMeet(a, b) | IJoin(a, b) => vec![a, b],
            NatRec {
                motive,
                zero,
                succ,
                target,
            } => vec![motive, zero, succ, target],
            If {
                motive,
                then_,
                else_,
                target,
            } => vec![motive, then_, else_, target],
            Absurd { motive, target } => vec![motive, target],
        }
    }

    /// Number of nodes, for size guards.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Names of the globals mentioned.
    pub fn constants(&self, out: &mut std::collections::BTreeSet<String>) {
        if let Term::Const(n) = self {
            out.insert(n.to_string());
        }
        for c in self.children() {
            c.constants(out);
        }
    }
}
