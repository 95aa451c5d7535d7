//! Properties of reduction, conversion and substitution, sampled over the
//! elaborated prelude and standard library.

use std::path::Path;
use std::rc::Rc;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use trikernel::kernel::subst::{act, subst_top};
use trikernel::kernel::term::Term;
use trikernel::kernel::{conv, whnf, Checker, Ctx, Session, Tm};
use trikernel::modality::{CellGen, Gen, ModalityWord, Step, TwoCell};
use trikernel::prelude::{load_prelude, PreludeSource};
use trikernel::syntax::parse_expr;

const FILES: &[&str] = &[
    "simplices", "hom", "segal", "iso", "simp", "covariant", "acov", "space", "subcat", "monoid",
];

fn corpus() -> Session {
    let (mut s, r) = load_prelude(&PreludeSource::embedded(), 8);
    assert!(r.is_clean());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../stdlib");
    for f in FILES {
        let r = s.load_file(&dir.join(format!("{f}.ttt"))).unwrap();
        assert!(r.is_clean(), "{f}");
    }
    s
}

/// Every (name, type, definition) in the session, definitions optional.
fn globals(s: &Session) -> Vec<(String, Tm, Option<Tm>)> {
    s.env
        .names()
        .iter()
        .map(|n| {
            let g = s.env.get(n).unwrap();
            (n.clone(), g.ty.clone(), g.def.clone())
        })
        .collect()
}

#[test]
fn conversion_is_reflexive_on_the_corpus() {
    let s = corpus();
    let ctx = Ctx::empty();
    let gs = globals(&s);
    assert!(gs.len() > 150);
    for (n, ty, def) in &gs {
        assert!(conv(&s.env, &ctx, ty, ty), "type of {n}");
        if let Some(d) = def {
            assert!(conv(&s.env, &ctx, d, d), "body of {n}");
            assert!(conv(&s.env, &ctx, d, &Rc::new(Term::Const(n.as_str().into()))), "unfold {n}");
        }
    }
}

#[test]
fn conversion_is_symmetric_and_transitive_on_samples() {
    let s = corpus();
    let ctx = Ctx::empty();
    let types: Vec<Tm> = globals(&s).into_iter().map(|g| g.1).collect();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..2000 {
        let t: Vec<&Tm> = types.choose_multiple(&mut rng, 3).collect();
        let ab = conv(&s.env, &ctx, t[0], t[1]);
        assert_eq!(ab, conv(&s.env, &ctx, t[1], t[0]));
        let bc = conv(&s.env, &ctx, t[1], t[2]);
        if ab && bc {
            assert!(conv(&s.env, &ctx, t[0], t[2]));
        }
    }
}

/// Head forms that a value of a type with head `ty` may take.
fn fits(value: &Term, ty: &Term) -> bool {
    use Term::*;
    match value {
        Lam { .. } => matches!(ty, Pi { .. }),
        Pair(..) => matches!(ty, Sigma { .. }),
        Refl => matches!(ty, Id { .. }),
        ModIntro { .. } => matches!(ty, Modal { .. }),
        LiftIn(_) => matches!(ty, Lift(_)),
        I0 | I1 | IMeet(..) | IJoin(..) => matches!(ty, Int),
        Zero | Suc(_) => matches!(ty, Nat),
        True | False => matches!(ty, Bool),
        Tt => matches!(ty, Unit),
        Univ(_) | Pi { .. } | Sigma { .. } | Id { .. } | Modal { .. } | Int | Nat | Bool
        | Unit | Empty | Lift(_) => matches!(ty, Univ(_)),
        _ => false,
    }
}

#[test]
fn head_reduction_preserves_types() {
    let s = corpus();
    let ctx = Ctx::empty();
    let c = Checker::new(&s.env);
    let mut neutral = 0;
    let mut canonical = 0;
    for (n, ty, def) in globals(&s) {
        let Some(d) = def else { continue };
        let w = whnf(&s.env, &ctx, &d);
        assert!(conv(&s.env, &ctx, &w, &d), "{n}");
        match c.type_of(&ctx, &w) {
            Some(t) => {
                neutral += 1;
                assert!(conv(&s.env, &ctx, &t, &ty), "{n}: reduct has another type");
            }
            None => {
                canonical += 1;
                let tw = whnf(&s.env, &ctx, &ty);
                assert!(fits(&w, &tw), "{n}: {w:?} does not inhabit {tw:?}");
            }
        }
    }
    assert!(neutral + canonical > 100);
}

#[test]
fn substitution_agrees_with_application() {
    let s = corpus();
    let ctx = Ctx::empty();
    let c = Checker::new(&s.env);
    let int: Tm = Rc::new(Term::Int);
    let mut tried = 0;
    for (n, ty, def) in globals(&s) {
        let Some(d) = def else { continue };
        let tw = whnf(&s.env, &ctx, &ty);
        let Term::Pi { ann, dom, cod, .. } = &*tw else { continue };
        if !ann.is_identity() || !matches!(&*whnf(&s.env, &ctx, dom), Term::Univ(0)) {
            continue;
        }
        tried += 1;
        let (_, inferred) = c.infer(&ctx, &parse_expr(&format!("{n} Int")).unwrap()).unwrap();
        let expected = subst_top(&ctx, cod, &int).unwrap();
        assert!(conv(&s.env, &ctx, &inferred, &expected), "{n}: type");
        if let Term::Lam { body, .. } = &*whnf(&s.env, &ctx, &d) {
            let reduct = subst_top(&ctx, body, &int).unwrap();
            let redex = trikernel::kernel::term::app(d.clone(), int.clone());
            assert!(conv(&s.env, &ctx, &reduct, &redex), "{n}: value");
        }
    }
    assert!(tried > 20, "{tried}");
}

/// `p ⇒ p.a.p ⇒ p`, the identity by a triangle law.
fn p_triangle() -> TwoCell {
    let p = ModalityWord::single(Gen::P);
    TwoCell::from_steps(
        &p,
        vec![
            Step::new(p.clone(), CellGen::EtaPA, ModalityWord::identity()),
            Step::new(ModalityWord::identity(), CellGen::EpsPA, p.clone()),
        ],
    )
    .unwrap()
}

fn arb_int() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["i", "j", "0", "1"]).prop_map(str::to_string);
    leaf.prop_recursive(4, 16, 2, |e| {
        (e.clone(), e, any::<bool>())
            .prop_map(|(a, b, m)| format!("({a} {} {b})", if m { "/\\" } else { "\\/" }))
    })
}

fn arb_term() -> impl Strategy<Value = String> {
    prop_oneof![
        arb_int(),
        arb_int().prop_map(|e| format!("f {e}")),
        (arb_int(), arb_int()).prop_map(|(a, b)| format!("(f {a}, f {b})")),
        arb_int().prop_map(|e| format!("(fun (k : Int) => f (k /\\ {e}))")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn identity_cells_act_trivially(src in arb_term()) {
        let s = Session::default();
        let c = Checker::new(&s.env);
        let scope = Ctx::empty()
            .push_decl("A".into(), ModalityWord::identity(), Some(Rc::new(Term::Univ(0))))
            .push_decl("j".into(), ModalityWord::identity(), Some(Rc::new(Term::Int)));
        let f_ty = c
            .check_type(&scope, &parse_expr("Int -> A").unwrap())
            .unwrap()
            .0;
        let scope = scope.push_decl("f".into(), ModalityWord::identity(), Some(f_ty));
        let inner = scope.push_lock(Gen::P, Some("i".into()));
        let (t, _) = c.infer(&inner, &parse_expr(&src).unwrap()).unwrap();
        let same = act(&scope, &t, &TwoCell::identity(&ModalityWord::single(Gen::P))).unwrap();
        prop_assert!(conv(&s.env, &inner, &same, &t));
        let cell = p_triangle();
        prop_assert!(cell.cell_eq(&TwoCell::identity(cell.src())).unwrap());
        let moved = act(&scope, &t, &cell).unwrap();
        prop_assert!(conv(&s.env, &inner, &moved, &t), "{src}");
    }
}
