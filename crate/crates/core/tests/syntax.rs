use proptest::prelude::*;
use trikernel::diagnostic::{Code, Span};
use trikernel::modality::{CellGen, Gen, ModalityWord};
use trikernel::syntax::ast::*;
use trikernel::syntax::{parse_cell, parse_expr, parse_module, print_expr, print_module, SameShape};

const NAMES: &[&str] = &["x", "y", "f", "A", "B", "foo", "h1", "b'"];

fn sp() -> Span {
    Span::default()
}

fn ex(kind: ExprKind) -> Expr {
    Expr { kind, span: sp() }
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn arb_ident() -> impl Strategy<Value = Ident> {
    prop::sample::select(NAMES).prop_map(|n| Ident {
        name: n.to_string(),
        span: sp(),
    })
}

fn arb_word() -> impl Strategy<Value = ModalityWord> {
    prop::collection::vec(
        prop::sample::select(vec![Gen::G, Gen::S, Gen::O, Gen::P, Gen::A]),
        0..4,
    )
    .prop_map(ModalityWord::from_gens)
}

fn arb_lock() -> impl Strategy<Value = LockAnn> {
    arb_word().prop_flat_map(|word| {
        let k = word.p_count();
        prop::collection::vec(arb_ident(), 0..=k).prop_map(move |names| LockAnn {
            word: word.clone(),
            names,
            span: sp(),
        })
    })
}

fn arb_cell() -> impl Strategy<Value = CellExpr> {
    let gen = prop::sample::select(vec![
        CellGen::EpsGS,
        CellGen::EtaGS,
        CellGen::EpsPA,
        CellGen::EtaPA,
        CellGen::Eps0,
        CellGen::Weaken,
    ]);
    let step = (arb_word(), gen, arb_word()).prop_map(|(left, gen, right)| CellStep {
        left,
        gen,
        right,
        span: sp(),
    });
    prop_oneof![
        arb_word().prop_map(|w| CellExpr::Identity(w, sp())),
        prop::collection::vec(step, 1..3).prop_map(CellExpr::Steps),
    ]
}

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (arb_ident(), prop::option::of(arb_cell())).prop_map(|(id, cell)| ex(ExprKind::Var {
            name: id.name,
            cell
        })),
        (0u32..3).prop_map(|n| ex(ExprKind::Univ(n))),
        (0u64..4).prop_map(|n| ex(ExprKind::Num(n))),
        Just(ex(ExprKind::Refl)),
        Just(ex(ExprKind::Int)),
        Just(ex(ExprKind::Nat)),
        Just(ex(ExprKind::Bool)),
        Just(ex(ExprKind::True)),
        Just(ex(ExprKind::False)),
        Just(ex(ExprKind::Unit)),
        Just(ex(ExprKind::Tt)),
        Just(ex(ExprKind::Empty)),
    ]
}

fn arb_binder(e: BoxedStrategy<Expr>) -> impl Strategy<Value = Binder> {
    (prop::collection::vec(arb_ident(), 1..3), e, prop::option::of(arb_lock()))
        .prop_map(|(names, ty, ann)| Binder { names, ty, ann })
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(8, 96, 4, |e| {
        let e = e.boxed();
        let b = || arb_binder(e.clone());
        let two = || (e.clone(), e.clone());
        let param = prop_oneof![
            arb_ident().prop_map(LamParam::Name),
            b().prop_map(LamParam::Typed),
        ];
        prop_oneof![
            (prop::collection::vec(b(), 1..3), e.clone())
                .prop_map(|(binders, cod)| ex(ExprKind::Pi { binders, cod: bx(cod) })),
            (prop::collection::vec(b(), 1..3), e.clone())
                .prop_map(|(binders, snd)| ex(ExprKind::Sigma { binders, snd: bx(snd) })),
            two().prop_map(|(a, c)| ex(ExprKind::Arrow { dom: bx(a), cod: bx(c) })),
            (prop::collection::vec(param, 1..3), e.clone())
                .prop_map(|(params, body)| ex(ExprKind::Lam { params, body: bx(body) })),
            two().prop_map(|(a, c)| ex(ExprKind::App { fun: bx(a), arg: bx(c) })),
            two().prop_map(|(a, c)| ex(ExprKind::Prod { fst: bx(a), snd: bx(c) })),
            two().prop_map(|(a, c)| ex(ExprKind::Pair { fst: bx(a), snd: bx(c) })),
            e.clone().prop_map(|a| ex(ExprKind::Fst(bx(a)))),
            e.clone().prop_map(|a| ex(ExprKind::Snd(bx(a)))),
            two().prop_map(|(a, c)| ex(ExprKind::Ann { term: bx(a), ty: bx(c) })),
            two().prop_map(|(a, c)| ex(ExprKind::Eq { lhs: bx(a), rhs: bx(c) })),
            (e.clone(), e.clone(), e.clone()).prop_map(|(t, a, c)| ex(ExprKind::Id {
                ty: bx(t),
                lhs: bx(a),
                rhs: bx(c)
            })),
            (e.clone(), e.clone(), e.clone()).prop_map(|(m, a, c)| ex(ExprKind::J {
                motive: bx(m),
                base: bx(a),
                eq: bx(c)
            })),
            (arb_lock(), e.clone()).prop_map(|(lock, t)| ex(ExprKind::Modal { lock, ty: bx(t) })),
            (arb_lock(), e.clone())
                .prop_map(|(lock, t)| ex(ExprKind::ModIntro { lock, body: bx(t) })),
            (
                prop::option::of(arb_lock()),
                arb_word(),
                arb_ident(),
                e.clone(),
                prop::option::of((arb_ident(), e.clone())),
                e.clone()
            )
                .prop_map(|(outer, inner, var, scrut, motive, body)| ex(ExprKind::LetMod {
                    outer,
                    inner,
                    var,
                    scrut: bx(scrut),
                    motive: motive.map(|(y, m)| (y, bx(m))),
                    body: bx(body),
                })),
            (arb_ident(), e.clone(), e.clone(), e.clone()).prop_map(|(var, t, v, body)| ex(
                ExprKind::Let { var, ty: bx(t), val: bx(v), body: bx(body) }
            )),
            (arb_cell(), e.clone()).prop_map(|(cell, t)| ex(ExprKind::Coe { cell, term: bx(t) })),
            two().prop_map(|(a, c)| ex(ExprKind::Inst { body: bx(a), arg: bx(c) })),
            two().prop_map(|(a, c)| ex(ExprKind::Meet(bx(a), bx(c)))),
            two().prop_map(|(a, c)| ex(ExprKind::Join(bx(a), bx(c)))),
            two().prop_map(|(a, c)| ex(ExprKind::Leq(bx(a), bx(c)))),
            e.clone().prop_map(|a| ex(ExprKind::Suc(bx(a)))),
            (e.clone(), e.clone(), e.clone(), e.clone()).prop_map(|(m, z, s, t)| ex(
                ExprKind::NatRec { motive: bx(m), zero: bx(z), succ: bx(s), target: bx(t) }
            )),
            (e.clone(), e.clone(), e.clone(), e.clone()).prop_map(|(m, a, c, t)| ex(
                ExprKind::If { motive: bx(m), then_: bx(a), else_: bx(c), target: bx(t) }
            )),
            two().prop_map(|(m, t)| ex(ExprKind::Absurd { motive: bx(m), target: bx(t) })),
            e.clone().prop_map(|a| ex(ExprKind::Lift(bx(a)))),
            e.clone().prop_map(|a| ex(ExprKind::LiftIn(bx(a)))),
            e.clone().prop_map(|a| ex(ExprKind::Lower(bx(a)))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let text = print_expr(&e);
        let back = parse_expr(&text)
            .unwrap_or_else(|r| panic!("{text}\n{}", r.message));
        prop_assert!(back.same_shape(&e), "{text}\nreprinted: {}", print_expr(&back));
    }

    #[test]
    fn parser_is_total_on_arbitrary_text(s in "\\PC{0,80}") {
        let _ = parse_module(&s);
        let _ = parse_expr(&s);
    }

    #[test]
    fn parser_is_total_on_token_soup(
        toks in prop::collection::vec(prop::sample::select(vec![
            "def", "x", ":", ":=", "(", ")", "<", "|", ">", "g", "p", ";", "i", "->", "*",
            "fun", "=>", "let", "mod", "{", "}", "=", "in", "^", "eps0", "#", ".1", ",",
            "U", "0", "@", "coe", "<|", "|>", "J", "\\/", "/\\",
        ]), 0..40)
    ) {
        let s = toks.join(" ");
        if let Err(r) = parse_module(&s) {
            prop_assert_eq!(r.code, Code::Parse);
            prop_assert!(r.span.end <= s.len());
        }
    }
}

#[test]
fn missing_type_is_reported_at_the_second_colon() {
    let src = "def bad : := x";
    let err = parse_module(src).unwrap_err();
    assert_eq!(err.code, Code::Parse);
    assert_eq!(err.span.start, 10);
}

#[test]
fn unicode_and_ascii_spellings_agree() {
    let pairs = [
        ("fun x => x", "λ x ⇒ x"),
        ("(x : A) -> B", "(x : A) → B"),
        ("x /\\ y \\/ z", "x ∧ y ∨ z"),
        ("A * B", "A × B"),
        ("<p| A> # i", "⟨p| A⟩ · i"),
        ("x^{g <| eps_gs |> s}", "x^{g ◁ eps_gs ▷ s}"),
    ];
    for (a, u) in pairs {
        assert!(parse_expr(a).unwrap().same_shape(&parse_expr(u).unwrap()), "{a}");
    }
}

#[test]
fn cells_round_trip() {
    for src in ["id{g.s}", "eps0", "g <| eps_gs |> s ; eps0", "p.a <| eta_pa", "eps_pa |> o ; wk"] {
        let c = parse_cell(src).unwrap();
        let again = parse_cell(&trikernel::syntax::printer::print_cell(&c)).unwrap();
        assert!(c.same_shape(&again), "{src}");
    }
}

#[test]
fn corpus_modules_round_trip() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let mut files = vec![format!("{root}/prelude/prelude.ttt")];
    for dir in ["stdlib", "examples"] {
        if let Ok(rd) = std::fs::read_dir(format!("{root}/{dir}")) {
            for f in rd.flatten() {
                let p = f.path();
                if p.extension().is_some_and(|e| e == "ttt") {
                    files.push(p.display().to_string());
                }
            }
        }
    }
    assert!(files.len() > 5);
    for f in files {
        let src = std::fs::read_to_string(&f).unwrap();
        let m = parse_module(&src).unwrap_or_else(|r| panic!("{f}: {}", r.message));
        let back = parse_module(&print_module(&m)).unwrap();
        assert!(m.same_shape(&back), "{f}");
    }
}

#[test]
fn hom_prints_as_golden() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let src = std::fs::read_to_string(format!("{root}/stdlib/hom.ttt")).unwrap();
    let printed = print_module(&parse_module(&src).unwrap());
    let golden_path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/hom.print");
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(golden_path, &printed).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path).expect("golden file; rerun with BLESS=1");
    assert_eq!(printed, golden);
}
