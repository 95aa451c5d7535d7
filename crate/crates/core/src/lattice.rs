//! The free bounded distributive lattice over interval atoms.
//!
//! Elements are kept as antichains of monomials (irredundant disjunctive
//! normal form): each monomial is a set of atoms read as their meet, and the
//! antichain is read as the join of its monomials. The empty antichain is `0`
//! and the antichain holding only the empty monomial is `1`. Two expressions
//! are equal in the free lattice exactly when their antichains coincide.

use std::collections::HashMap;
use std::fmt;

use crate::diagnostic::Code;

/// Largest atom count the exhaustive Boolean oracle will evaluate.
pub const ORACLE_MAX_ATOMS: usize = 20;
/// Largest `n` accepted by [`count_free`].
pub const COUNT_MAX_ATOMS: usize = 5;
/// Largest number of generators accepted by [`fp_algebra_homs`].
pub const FP_MAX_GENERATORS: usize = 4;

pub type AtomId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("{what} needs {requested} atoms but the budget is {limit}")]
    Size {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("lattice expression parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl LatticeError {
    pub fn code(&self) -> Code {
        match self {
            LatticeError::Size { .. } => Code::LatticeSize,
            LatticeError::Parse { .. } => Code::Parse,
        }
    }
}

/// A sorted set of atoms, read as their meet.
pub type Monomial = Vec<AtomId>;

/// Canonical form of a lattice element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoly {
    monomials: Vec<Monomial>,
}

fn is_subset(a: &[AtomId], b: &[AtomId]) -> bool {
    // both sorted
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

fn union(a: &[AtomId], b: &[AtomId]) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn monomial_order(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl LatticePoly {
    pub fn zero() -> Self {
        LatticePoly { monomials: vec![] }
    }

    pub fn one() -> Self {
        LatticePoly {
            monomials: vec![vec![]],
        }
    }

    pub fn atom(a: AtomId) -> Self {
        LatticePoly {
            monomials: vec![vec![a]],
        }
    }

    /// Builds the canonical form of an arbitrary family of monomials:
    /// drops duplicates and any monomial that contains another.
    pub fn from_monomials(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        let mut ms: Vec<Monomial> = monomials
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        ms.sort_by(monomial_order);
        ms.dedup();
        let mut kept: Vec<Monomial> = Vec::with_capacity(ms.len());
        // Sorted by size, so a monomial can only be absorbed by earlier ones.
        for m in ms {
            if !kept.iter().any(|k| is_subset(k, &m)) {
                kept.push(m);
            }
        }
        LatticePoly { monomials: kept }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.monomials.len() == 1 && self.monomials[0].is_empty()
    }

    /// Atoms occurring in the form, sorted.
    pub fn atoms(&self) -> Vec<AtomId> {
        let mut v: Vec<AtomId> = self.monomials.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn join(&self, other: &LatticePoly) -> LatticePoly {
        LatticePoly::from_monomials(self.monomials.iter().chain(&other.monomials).cloned())
    }

    pub fn meet(&self, other: &LatticePoly) -> LatticePoly {
        let mut out = Vec::with_capacity(self.monomials.len() * other.monomials.len());
        for a in &self.monomials {
            for b in &other.monomials {
                out.push(union(a, b));
            }
        }
        LatticePoly::from_monomials(out)
    }

    /// Substitutes a constant for an atom.
    pub fn substitute_const(&self, x: AtomId, value: bool) -> LatticePoly {
        if value {
            LatticePoly::from_monomials(
                self.monomials
                    .iter()
                    .map(|m| m.iter().copied().filter(|a| *a != x).collect()),
            )
        } else {
            LatticePoly::from_monomials(self.monomials.iter().filter(|m| !m.contains(&x)).cloned())
        }
    }

    /// Substitutes a polynomial for every atom.
    pub fn substitute(&self, f: &dyn Fn(AtomId) -> LatticePoly) -> LatticePoly {
        let mut acc = LatticePoly::zero();
        for m in &self.monomials {
            let mut term = LatticePoly::one();
            for a in m {
                term = term.meet(&f(*a));
            }
            acc = acc.join(&term);
        }
        acc
    }

    /// Evaluates under a Boolean assignment.
    pub fn eval(&self, assignment: &dyn Fn(AtomId) -> bool) -> bool {
        self.monomials
            .iter()
            .any(|m| m.iter().all(|a| assignment(*a)))
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(AtomId) -> String) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a LatticePoly,
    names: &'a dyn Fn(AtomId) -> String,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, m) in self.poly.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, "\\/")?;
            }
            if m.is_empty() {
                write!(f, "1")?;
            }
            for (j, a) in m.iter().enumerate() {
                if j > 0 {
                    write!(f, "/\\")?;
                }
                write!(f, "{}", (self.names)(*a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for LatticePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |a: AtomId| format!("x{a}");
        write!(f, "{}", self.display_with(&names))
    }
}

/// Lattice expression trees over atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatticeExpr {
    Atom(AtomId),
    Zero,
    One,
    Meet(Box<LatticeExpr>, Box<LatticeExpr>),
    Join(Box<LatticeExpr>, Box<LatticeExpr>),
}

impl LatticeExpr {
    pub fn meet(a: LatticeExpr, b: LatticeExpr) -> Self {
        LatticeExpr::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatticeExpr, b: LatticeExpr) -> Self {
        LatticeExpr::Join(Box::new(a), Box::new(b))
    }

    pub fn atoms(&self, out: &mut Vec<AtomId>) {
        match self {
            LatticeExpr::Atom(a) => out.push(*a),
            LatticeExpr::Zero | LatticeExpr::One => {}
            LatticeExpr::Meet(a, b) | LatticeExpr::Join(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    pub fn eval(&self, assignment: &dyn Fn(AtomId) -> bool) -> bool {
        match self {
            LatticeExpr::Atom(a) => assignment(*a),
            LatticeExpr::Zero => false,
            LatticeExpr::One => true,
            LatticeExpr::Meet(a, b) => a.eval(assignment) && b.eval(assignment),
            LatticeExpr::Join(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }
}

/// Canonical antichain form of an expression.
pub fn canon(expr: &LatticeExpr) -> LatticePoly {
    match expr {
        LatticeExpr::Atom(a) => LatticePoly::atom(*a),
        LatticeExpr::Zero => LatticePoly::zero(),
        LatticeExpr::One => LatticePoly::one(),
        LatticeExpr::Meet(a, b) => canon(a).meet(&canon(b)),
        LatticeExpr::Join(a, b) => canon(a).join(&canon(b)),
    }
}

pub fn eq(p: &LatticePoly, q: &LatticePoly) -> bool {
    p == q
}

/// `p ≤ q` iff `p ∧ q = p`.
pub fn leq(p: &LatticePoly, q: &LatticePoly) -> bool {
    p.meet(q) == *p
}

/// Exhaustive Boolean check: `p` and `q` agree under every assignment of
/// their atoms. Independent of the antichain machinery.
pub fn oracle_eq(p: &LatticePoly, q: &LatticePoly) -> Result<bool, LatticeError> {
    let mut atoms = p.atoms();
    atoms.extend(q.atoms());
    atoms.sort_unstable();
    atoms.dedup();
    let n = atoms.len();
    if n > ORACLE_MAX_ATOMS {
        return Err(LatticeError::Size {
            what: "the Boolean oracle",
            requested: n,
            limit: ORACLE_MAX_ATOMS,
        });
    }
    let index: HashMap<AtomId, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    for bits in 0u32..(1u32 << n) {
        let assign = |a: AtomId| bits & (1 << index[&a]) != 0;
        if p.eval(&assign) != q.eval(&assign) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The endpoint decomposition of `p` in the atom `x`: `(p[x:=0], p[x:=1])`.
/// These satisfy `p₀ ≤ p₁` and `p = p₀ ∨ (x ∧ p₁)`.
pub fn phoa_endpoints(p: &LatticePoly, x: AtomId) -> (LatticePoly, LatticePoly) {
    (p.substitute_const(x, false), p.substitute_const(x, true))
}

/// Rebuilds `p₀ ∨ (x ∧ p₁)`.
pub fn phoa_reconstruct(p0: &LatticePoly, x: AtomId, p1: &LatticePoly) -> LatticePoly {
    p0.join(&LatticePoly::atom(x).meet(p1))
}

/// The De Morgan dual: swaps `∧` with `∨` and `0` with `1`, fixing atoms.
pub fn dualize(p: &LatticePoly) -> LatticePoly {
    // Each monomial becomes a clause (join of its atoms); the clauses meet.
    let mut acc = LatticePoly::one();
    for m in &p.monomials {
        let clause = LatticePoly::from_monomials(m.iter().map(|a| vec![*a]));
        acc = acc.meet(&clause);
    }
    acc
}

/// Every canonical form over atoms `0..n`, in a fixed order.
pub fn enumerate_free(n: usize) -> Result<Vec<LatticePoly>, LatticeError> {
    if n > COUNT_MAX_ATOMS {
        return Err(LatticeError::Size {
            what: "free lattice enumeration",
            requested: n,
            limit: COUNT_MAX_ATOMS,
        });
    }
    let subsets: Vec<u32> = (0u32..(1 << n)).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    antichains(&subsets, 0, &mut chosen, &mut |sets| {
        out.push(LatticePoly::from_monomials(sets.iter().map(|&s| {
            (0..n as u32).filter(|i| s & (1 << i) != 0).collect::<Vec<_>>()
        })));
    });
    Ok(out)
}

fn antichains(subsets: &[u32], start: usize, chosen: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32])) {
    emit(chosen);
    for i in start..subsets.len() {
        let s = subsets[i];
        let comparable = chosen.iter().any(|&c| c & s == c || c & s == s);
        if comparable {
            continue;
        }
        chosen.push(s);
        antichains(subsets, i + 1, chosen, emit);
        chosen.pop();
    }
}

/// Number of distinct elements of the free bounded distributive lattice on
/// `n` generators.
pub fn count_free(n: usize) -> Result<u64, LatticeError> {
    Ok(enumerate_free(n)?.len() as u64)
}

/// A finitely presented algebra `Int[x₀..xₙ₋₁] / (lhs = rhs, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: Vec<(LatticeExpr, LatticeExpr)>,
}

/// All algebra maps into the two global points: Boolean tuples (as constant
/// polynomials) satisfying every relation.
pub fn fp_algebra_homs(pres: &Presentation) -> Result<Vec<Vec<LatticePoly>>, LatticeError> {
    let n = pres.generators;
    if n > FP_MAX_GENERATORS {
        return Err(LatticeError::Size {
            what: "homomorphism enumeration",
            requested: n,
            limit: FP_MAX_GENERATORS,
        });
    }
    let mut out = Vec::new();
    for bits in 0u32..(1 << n) {
        let assign = |a: AtomId| (a as usize) < n && bits & (1 << a) != 0;
        if pres.relations.iter().all(|(l, r)| l.eval(&assign) == r.eval(&assign)) {
            out.push(
                (0..n)
                    .map(|i| {
                        if bits & (1 << i) != 0 {
                            LatticePoly::one()
                        } else {
                            LatticePoly::zero()
                        }
                    })
                    .collect(),
            );
        }
    }
    // Lexicographic in the tuple with 0 < 1.
    out.sort_by(|a: &Vec<LatticePoly>, b| {
        let key = |t: &Vec<LatticePoly>| t.iter().map(|p| p.is_one()).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    Ok(out)
}

/// Append-only table from atom names to ids.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    names: Vec<String>,
    ids: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(id) = self.ids.get(name) {
            return *id;
        }
        let id = self.names.len() as AtomId;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn render(&self, p: &LatticePoly) -> String {
        let names = |a: AtomId| self.name(a).to_string();
        p.display_with(&names).to_string()
    }
}

/// Parses `/\`, `\/` (or `∧`, `∨`), `0`, `1`, identifiers and parentheses.
/// `/\` binds tighter than `\/`.
pub fn parse_expr(src: &str, atoms: &mut AtomTable) -> Result<LatticeExpr, LatticeError> {
    let mut p = ExprParser { src, pos: 0, atoms };
    let e = p.join()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
    atoms: &'a mut AtomTable,
}

impl ExprParser<'_> {
    fn error(&self, message: &str) -> LatticeError {
        LatticeError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, toks: &[&str]) -> bool {
        self.skip_ws();
        for t in toks {
            if self.src[self.pos..].starts_with(t) {
                self.pos += t.len();
                return true;
            }
        }
        false
    }

    fn join(&mut self) -> Result<LatticeExpr, LatticeError> {
        let mut lhs = self.meet()?;
        while self.eat(&["\\/", "∨"]) {
            let rhs = self.meet()?;
            lhs = LatticeExpr::join(lhs, rhs);
        }
        Ok(lhs)
    }

    fn meet(&mut self) -> Result<LatticeExpr, LatticeError> {
        let mut lhs = self.atom()?;
        while self.eat(&["/\\", "∧"]) {
            let rhs = self.atom()?;
            lhs = LatticeExpr::meet(lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<LatticeExpr, LatticeError> {
        self.skip_ws();
        if self.eat(&["("]) {
            let e = self.join()?;
            if !self.eat(&[")"]) {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        let rest = &self.src[self.pos..];
        let len: usize = rest
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.error("expected an atom, `0`, `1` or `(`"));
        }
        let word = &rest[..len];
        self.pos += len;
        Ok(match word {
            "0" => LatticeExpr::Zero,
            "1" => LatticeExpr::One,
            _ if word.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
                self.pos -= len;
                return Err(self.error("only 0 and 1 are lattice constants"));
            }
            _ => LatticeExpr::Atom(self.atoms.intern(word)),
        })
    }
}
