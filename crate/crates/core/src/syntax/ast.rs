use crate::diagnostic::{Code, Span};
use crate::modality::{CellGen, ModalityWord};

#[derive(Clone, Debug)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// A modality acting as a lock, optionally naming the interval variables
/// its `p` letters bind: `p; i`.
#[derive(Clone, Debug)]
pub struct LockAnn {
    pub word: ModalityWord,
    pub names: Vec<Ident>,
    pub span: Span,
}

impl LockAnn {
    pub fn plain(word: ModalityWord, span: Span) -> Self {
        LockAnn {
            word,
            names: Vec::new(),
            span,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellStep {
    pub left: ModalityWord,
    pub gen: CellGen,
    pub right: ModalityWord,
    pub span: Span,
}

/// Surface 2-cell: `id{w}` or whiskered generators joined by `;`.
#[derive(Clone, Debug)]
pub enum CellExpr {
    Identity(ModalityWord, Span),
    Steps(Vec<CellStep>),
}

impl CellExpr {
    pub fn span(&self) -> Span {
        match self {
            CellExpr::Identity(_, s) => *s,
            CellExpr::Steps(steps) => steps
                .iter()
                .map(|s| s.span)
                .reduce(Span::join)
                .unwrap_or_default(),
        }
    }
}

/// `(x y : A @ μ)`.
#[derive(Clone, Debug)]
pub struct Binder {
    pub names: Vec<Ident>,
    pub ty: Expr,
    pub ann: Option<LockAnn>,
}

#[derive(Clone, Debug)]
pub enum LamParam {
    Name(Ident),
    Typed(Binder),
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Var {
        name: String,
        cell: Option<CellExpr>,
    },
    Univ(u32),
    Pi {
        binders: Vec<Binder>,
        cod: Box<Expr>,
    },
    Arrow {
        dom: Box<Expr>,
        cod: Box<Expr>,
    },
    Lam {
        params: Vec<LamParam>,
        body: Box<Expr>,
    },
    App {
        fun: Box<Expr>,
        arg: Box<Expr>,
    },
    Sigma {
        binders: Vec<Binder>,
        snd: Box<Expr>,
    },
    Prod {
        fst: Box<Expr>,
        snd: Box<Expr>,
    },
    Pair {
        fst: Box<Expr>,
        snd: Box<Expr>,
    },
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    Ann {
        term: Box<Expr>,
        ty: Box<Expr>,
    },
    Eq {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Id {
        ty: Box<Expr>,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Refl,
    J {
        motive: Box<Expr>,
        base: Box<Expr>,
        eq: Box<Expr>,
    },
    Modal {
        lock: LockAnn,
        ty: Box<Expr>,
    },
    ModIntro {
        lock: LockAnn,
        body: Box<Expr>,
    },
    LetMod {
        outer: Option<LockAnn>,
        inner: ModalityWord,
        var: Ident,
        scrut: Box<Expr>,
        motive: Option<(Ident, Box<Expr>)>,
        body: Box<Expr>,
    },
    Let {
        var: Ident,
        ty: Box<Expr>,
        val: Box<Expr>,
        body: Box<Expr>,
    },
    Coe {
        cell: CellExpr,
        term: Box<Expr>,
    },
    Inst {
        body: Box<Expr>,
        arg: Box<Expr>,
    },
    Int,
    Meet(Box<Expr>, Box<Expr>),
    Join(Box<Expr>, Box<Expr>),
    Leq(Box<Expr>, Box<Expr>),
    Num(u64),
    Nat,
    Suc(Box<Expr>),
    NatRec {
        motive: Box<Expr>,
        zero: Box<Expr>,
        succ: Box<Expr>,
        target: Box<Expr>,
    },
    Bool,
    True,
    False,
    If {
        motive: Box<Expr>,
        then_: Box<Expr>,
        else_: Box<Expr>,
        target: Box<Expr>,
    },
    Unit,
    Tt,
    Empty,
    Absurd {
        motive: Box<Expr>,
        target: Box<Expr>,
    },
    Lift(Box<Expr>),
    LiftIn(Box<Expr>),
    Lower(Box<Expr>),
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    Def,
    Axiom,
    Check,
    FailCheck(Code),
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub kind: DeclKind,
    pub name: Ident,
    pub binders: Vec<Binder>,
    pub ty: Expr,
    pub body: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct SurfaceModule {
    pub imports: Vec<Ident>,
    pub decls: Vec<Decl>,
}

/// Structural equality ignoring spans.
pub trait SameShape {
    fn same_shape(&self, other: &Self) -> bool;
}

impl SameShape for Ident {
    fn same_shape(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl SameShape for LockAnn {
    fn same_shape(&self, other: &Self) -> bool {
        self.word == other.word && self.names.same_shape(&other.names)
    }
}

impl<T: SameShape> SameShape for Vec<T> {
    fn same_shape(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.same_shape(b))
    }
}

impl<T: SameShape> SameShape for Option<T> {
    fn same_shape(&self, other: &Self) -> bool {
        match (self, other) {
            (None, None) => true,
            (Some(a), Some(b)) => a.same_shape(b),
            _ => false,
        }
    }
}

impl<T: SameShape> SameShape for Box<T> {
    fn same_shape(&self, other: &Self) -> bool {
        (**self).same_shape(other)
    }
}

impl SameShape for CellExpr {
    fn same_shape(&self, other: &Self) -> bool {
        match (self, other) {
            (CellExpr::Identity(a, _), CellExpr::Identity(b, _)) => a == b,
            (CellExpr::Steps(a), CellExpr::Steps(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(x, y)| x.left == y.left && x.gen == y.gen && x.right == y.right)
            }
            _ => false,
        }
    }
}

impl SameShape for Binder {
    fn same_shape(&self, other: &Self) -> bool {
        self.names.same_shape(&other.names)
            && self.ty.same_shape(&other.ty)
            && self.ann.same_shape(&other.ann)
    }
}

impl SameShape for LamParam {
    fn same_shape(&self, other: &Self) -> bool {
        match (self, other) {
            (LamParam::Name(a), LamParam::Name(b)) => a.same_shape(b),
            (LamParam::Typed(a), LamParam::Typed(b)) => a.same_shape(b),
            _ => false,
        }
    }
}

impl SameShape for (Ident, Box<Expr>) {
    fn same_shape(&self, other: &Self) -> bool {
        self.0.same_shape(&other.0) && self.1.same_shape(&other.1)
    }
}

impl SameShape for Expr {
    fn same_shape(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Var { name: a, cell: c }, Var { name: b, cell: d }) => a == b && c.same_shape(d),
            (Univ(a), Univ(b)) => a == b,
            (Num(a), Num(b)) => a == b,
            (Refl, Refl) | (Int, Int) | (Nat, Nat) | (Bool, Bool) => true,
            (True, True) | (False, False) | (Unit, Unit) | (Tt, Tt) | (Empty, Empty) => true,
            (Pi { binders: a, cod: c }, Pi { binders: b, cod: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            (Sigma { binders: a, snd: c }, Sigma { binders: b, snd: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            (Arrow { dom: a, cod: c }, Arrow { dom: b, cod: d })
            | (Prod { fst: a, snd: c }, Prod { fst: b, snd: d })
            | (Pair { fst: a, snd: c }, Pair { fst: b, snd: d })
            | (App { fun: a, arg: c }, App { fun: b, arg: d })
            | (Ann { term: a, ty: c }, Ann { term: b, ty: d })
            | (Eq { lhs: a, rhs: c }, Eq { lhs: b, rhs: d })
            | (Inst { body: a, arg: c }, Inst { body: b, arg: d })
            | (Meet(a, c), Meet(b, d))
            | (Join(a, c), Join(b, d))
            | (Leq(a, c), Leq(b, d))
            | (Absurd { motive: a, target: c }, Absurd { motive: b, target: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            (Fst(a), Fst(b))
            | (Snd(a), Snd(b))
            | (Suc(a), Suc(b))
            | (Lift(a), Lift(b))
            | (LiftIn(a), LiftIn(b))
            | (Lower(a), Lower(b)) => a.same_shape(b),
            (Lam { params: a, body: c }, Lam { params: b, body: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            (
                Id { ty: a, lhs: c, rhs: e },
                Id { ty: b, lhs: d, rhs: f },
            )
            | (
                J { motive: a, base: c, eq: e },
                J { motive: b, base: d, eq: f },
            ) => a.same_shape(b) && c.same_shape(d) && e.same_shape(f),
            (
                NatRec { motive: a, zero: c, succ: e, target: g },
                NatRec { motive: b, zero: d, succ: f, target: h },
            )
            | (
                If { motive: a, then_: c, else_: e, target: g },
                If { motive: b, then_: d, else_: f, target: h },
            ) => a.same_shape(b) && c.same_shape(d) && e.same_shape(f) && g.same_shape(h),
            (Modal { lock: a, ty: c }, Modal { lock: b, ty: d })
            | (ModIntro { lock: a, body: c }, ModIntro { lock: b, body: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            (
                LetMod { outer: a1, inner: a2, var: a3, scrut: a4, motive: a5, body: a6 },
                LetMod { outer: b1, inner: b2, var: b3, scrut: b4, motive: b5, body: b6 },
            ) => {
                a1.same_shape(b1)
                    && a2 == b2
                    && a3.same_shape(b3)
                    && a4.same_shape(b4)
                    && a5.same_shape(b5)
                    && a6.same_shape(b6)
            }
            (
                Let { var: a1, ty: a2, val: a3, body: a4 },
                Let { var: b1, ty: b2, val: b3, body: b4 },
            ) => a1.same_shape(b1) && a2.same_shape(b2) && a3.same_shape(b3) && a4.same_shape(b4),
            (Coe { cell: a, term: c }, Coe { cell: b, term: d }) => {
                a.same_shape(b) && c.same_shape(d)
            }
            _ => false,
        }
    }
}

impl SameShape for Decl {
    fn same_shape(&self, other: &Self) -> bool {
        let kinds = match (&self.kind, &other.kind) {
            (DeclKind::Def, DeclKind::Def)
            | (DeclKind::Axiom, DeclKind::Axiom)
            | (DeclKind::Check, DeclKind::Check) => true,
            (DeclKind::FailCheck(a), DeclKind::FailCheck(b)) => a == b,
            _ => false,
        };
        kinds
            && self.name.same_shape(&other.name)
            && self.binders.same_shape(&other.binders)
            && self.ty.same_shape(&other.ty)
            && self.body.same_shape(&other.body)
    }
}

impl SameShape for SurfaceModule {
    fn same_shape(&self, other: &Self) -> bool {
        self.imports.same_shape(&other.imports) && self.decls.same_shape(&other.decls)
    }
}
