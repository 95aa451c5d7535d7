use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use trikernel::lattice::{
    canon, count_free, dualize, enumerate_free, eq, fp_algebra_homs, leq, oracle_eq,
    phoa_endpoints, phoa_reconstruct, AtomId, LatticeExpr, LatticePoly, Presentation,
};

/// Truth table of an expression over atoms `0..n`, one bit per assignment.
fn truth_table(e: &LatticeExpr, n: u32) -> u64 {
    fn go(e: &LatticeExpr, bits: u32) -> bool {
        match e {
            LatticeExpr::Atom(a) => bits >> a & 1 == 1,
            LatticeExpr::Zero => false,
            LatticeExpr::One => true,
            LatticeExpr::Meet(a, b) => go(a, bits) && go(b, bits),
            LatticeExpr::Join(a, b) => go(a, bits) || go(b, bits),
        }
    }
    (0..1u32 << n).fold(0, |acc, bits| acc | (go(e, bits) as u64) << bits)
}

/// Every expression over atoms `0..n` whose tree has at most `depth` levels.
fn expressions(n: u32, depth: usize) -> Vec<LatticeExpr> {
    let mut all: Vec<LatticeExpr> = (0..n).map(LatticeExpr::Atom).collect();
    all.push(LatticeExpr::Zero);
    all.push(LatticeExpr::One);
    for _ in 1..depth {
        let prev = all.clone();
        for a in &prev {
            for b in &prev {
                all.push(LatticeExpr::meet(a.clone(), b.clone()));
                all.push(LatticeExpr::join(a.clone(), b.clone()));
            }
        }
    }
    all
}

fn random_expr(rng: &mut StdRng, atoms: u32, depth: u32) -> LatticeExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..atoms + 2) {
            k if k < atoms => LatticeExpr::Atom(k),
            k if k == atoms => LatticeExpr::Zero,
            _ => LatticeExpr::One,
        };
    }
    let a = random_expr(rng, atoms, depth - 1);
    let b = random_expr(rng, atoms, depth - 1);
    if rng.gen_bool(0.5) {
        LatticeExpr::meet(a, b)
    } else {
        LatticeExpr::join(a, b)
    }
}

#[test]
fn eq_matches_truth_tables_exhaustively() {
    let exprs = expressions(2, 3);
    assert_eq!(exprs.len(), 2628);
    let keyed: Vec<(LatticePoly, u64)> = exprs.iter().map(|e| (canon(e), truth_table(e, 2))).collect();
    let mut disagreements = 0usize;
    for (p, tp) in &keyed {
        for (q, tq) in &keyed {
            if eq(p, q) != (tp == tq) {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn eq_matches_truth_tables_randomly() {
    let mut rng = StdRng::seed_from_u64(0x01a7_71ce);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=4);
        let a = random_expr(&mut rng, n, 5);
        let b = random_expr(&mut rng, n, 5);
        let (p, q) = (canon(&a), canon(&b));
        let expected = truth_table(&a, n) == truth_table(&b, n);
        assert_eq!(eq(&p, &q), expected, "{a:?} vs {b:?}");
        assert_eq!(oracle_eq(&p, &q).unwrap(), expected);
    }
}

#[test]
fn leq_matches_pointwise_order() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..2_000 {
        let a = random_expr(&mut rng, 3, 4);
        let b = random_expr(&mut rng, 3, 4);
        let (ta, tb) = (truth_table(&a, 3), truth_table(&b, 3));
        assert_eq!(leq(&canon(&a), &canon(&b)), ta & !tb == 0);
    }
}

/// Monotone Boolean functions of n variables, by brute force over all
/// truth tables.
fn monotone_count(n: u32) -> u64 {
    let points = 1u32 << n;
    let mut count = 0;
    for table in 0u64..1u64 << points {
        let at = |x: u32| table >> x & 1 == 1;
        let monotone = (0..points).all(|x| (0..points).all(|y| x & y != x || !at(x) || at(y)));
        count += monotone as u64;
    }
    count
}

#[test]
fn free_lattice_sizes() {
    for (n, expected) in [(1, 3), (2, 6), (3, 20), (4, 168)] {
        assert_eq!(monotone_count(n as u32), expected);
        assert_eq!(count_free(n).unwrap(), expected);
    }
}

#[test]
fn enumeration_is_duplicate_free() {
    let mut forms = enumerate_free(4).unwrap();
    let n = forms.len();
    forms.sort();
    forms.dedup();
    assert_eq!(forms.len(), n);
}

#[test]
fn phoa_reconstruction() {
    for n in 0..=3u32 {
        for p in enumerate_free(n as usize).unwrap() {
            for x in 0..n {
                let (p0, p1) = phoa_endpoints(&p, x);
                assert!(leq(&p0, &p1));
                assert_eq!(phoa_reconstruct(&p0, x, &p1), p);
                assert!(!p0.atoms().contains(&x) && !p1.atoms().contains(&x));
            }
        }
    }
}

#[test]
fn straight_line_homotopy_is_monotone() {
    let t: AtomId = 3;
    for p in enumerate_free(3).unwrap() {
        let shrunk = p.substitute(&|a| LatticePoly::atom(a).meet(&LatticePoly::atom(t)));
        assert!(leq(&shrunk, &p));
        let at_one = shrunk.substitute_const(t, true);
        assert_eq!(at_one, p);
    }
}

#[test]
fn dualize_is_an_anti_homomorphism() {
    let forms = enumerate_free(3).unwrap();
    for p in &forms {
        assert_eq!(dualize(&dualize(p)), *p);
        for q in &forms {
            assert_eq!(dualize(&p.meet(q)), dualize(p).join(&dualize(q)));
            assert_eq!(dualize(&p.join(q)), dualize(p).meet(&dualize(q)));
        }
    }
    assert_eq!(dualize(&LatticePoly::zero()), LatticePoly::one());
}

#[test]
fn homs_out_of_presentations() {
    let x = LatticeExpr::Atom(0);
    let y = LatticeExpr::Atom(1);
    let free = Presentation {
        generators: 1,
        relations: vec![],
    };
    assert_eq!(fp_algebra_homs(&free).unwrap().len(), 2);
    let ordered = Presentation {
        generators: 2,
        relations: vec![(LatticeExpr::meet(x.clone(), y), x)],
    };
    assert_eq!(fp_algebra_homs(&ordered).unwrap().len(), 3);
    let inconsistent = Presentation {
        generators: 2,
        relations: vec![(LatticeExpr::Zero, LatticeExpr::One)],
    };
    assert!(fp_algebra_homs(&inconsistent).unwrap().is_empty());
}
