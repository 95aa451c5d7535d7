//! The mode theory: modality words over the five generators and the
//! 2-cells between them.
//!
//! Words are stored outermost-first, so `ν ∘ μ` is the sequence `ν ++ μ`.
//! Normal forms are computed by the completed rewrite system
//!
//! ```text
//! g·g → g   g·o → g   g·a → g
//! s·g → s   s·s → s   s·o → s   s·a → s
//! o·o → 1
//! ```
//!
//! Every rule shrinks the word, and all critical pairs join, so each word has
//! exactly one normal form. The letter `p` is never touched by a rule: the
//! number and relative order of `p`s is an invariant of normalization.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::diagnostic::Code;

/// A generating modality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    /// Global sections (discrete).
    G,
    /// Codiscrete, right adjoint to `g`.
    S,
    /// Opposite.
    O,
    /// Path space `Int → -`.
    P,
    /// The amazing right adjoint to `p`.
    A,
}

impl Gen {
    pub const ALL: [Gen; 5] = [Gen::G, Gen::S, Gen::O, Gen::P, Gen::A];

    pub fn letter(self) -> char {
        match self {
            Gen::G => 'g',
            Gen::S => 's',
            Gen::O => 'o',
            Gen::P => 'p',
            Gen::A => 'a',
        }
    }

    pub fn from_letter(c: char) -> Option<Gen> {
        Some(match c {
            'g' => Gen::G,
            's' => Gen::S,
            'o' => Gen::O,
            'p' => Gen::P,
            'a' => Gen::A,
            _ => return None,
        })
    }
}

/// Result of rewriting an adjacent pair, if a rule applies.
fn rewrite_pair(x: Gen, y: Gen) -> Option<Option<Gen>> {
    use Gen::*;
    match (x, y) {
        (G, G) | (G, O) | (G, A) => Some(Some(G)),
        (S, G) | (S, S) | (S, O) | (S, A) => Some(Some(S)),
        (O, O) => Some(None),
        _ => None,
    }
}

/// A composite of generators, outermost first. The empty word is the
/// identity modality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModalityWord(Vec<Gen>);

impl ModalityWord {
    pub fn identity() -> Self {
        ModalityWord(Vec::new())
    }

    pub fn single(g: Gen) -> Self {
        ModalityWord(vec![g])
    }

    /// Builds a word without normalizing it.
    pub fn from_gens(gens: impl IntoIterator<Item = Gen>) -> Self {
        ModalityWord(gens.into_iter().collect())
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of `p` letters; invariant under normalization.
    pub fn p_count(&self) -> usize {
        self.0.iter().filter(|g| **g == Gen::P).count()
    }

    pub fn concat(&self, other: &ModalityWord) -> ModalityWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ModalityWord(v)
    }

    /// The letters up to and including the `r`-th `p`.
    pub fn through_nth_p(&self, r: usize) -> ModalityWord {
        ModalityWord(self.0[..self.nth_p_position(r) + 1].to_vec())
    }

    /// The letters strictly after the `r`-th `p`.
    pub fn after_nth_p(&self, r: usize) -> ModalityWord {
        ModalityWord(self.0[self.nth_p_position(r) + 1..].to_vec())
    }

    fn nth_p_position(&self, r: usize) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, g)| **g == Gen::P)
            .nth(r)
            .map(|(i, _)| i)
            .unwrap_or_else(|| panic!("word {self} has no p number {r}"))
    }

    /// Whether the word contains no reducible adjacent pair.
    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|w| rewrite_pair(w[0], w[1]).is_none())
    }

    /// All single rewrite steps applicable to this word.
    pub fn rewrites(&self) -> Vec<ModalityWord> {
        let mut out = Vec::new();
        for i in 0..self.0.len().saturating_sub(1) {
            if let Some(r) = rewrite_pair(self.0[i], self.0[i + 1]) {
                let mut v = self.0[..i].to_vec();
                v.extend(r);
                v.extend_from_slice(&self.0[i + 2..]);
                out.push(ModalityWord(v));
            }
        }
        out
    }
}

/// Normal form under the completed equation set.
pub fn normalize(w: &ModalityWord) -> ModalityWord {
    // Stack-based: the prefix on the stack is always normal, so each new
    // letter only interacts with the top.
    let mut stack: Vec<Gen> = Vec::with_capacity(w.len());
    for &g in &w.0 {
        let mut cur = Some(g);
        while let Some(c) = cur {
            match stack.last().and_then(|&top| rewrite_pair(top, c)) {
                Some(res) => {
                    stack.pop();
                    cur = res;
                }
                None => {
                    stack.push(c);
                    cur = None;
                }
            }
        }
    }
    ModalityWord(stack)
}

/// `normalize(w1 ++ w2)`.
pub fn compose(w1: &ModalityWord, w2: &ModalityWord) -> ModalityWord {
    normalize(&w1.concat(w2))
}

impl fmt::Display for ModalityWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", g.letter())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed modality word {0:?}")]
pub struct WordParseError(pub String);

impl FromStr for ModalityWord {
    type Err = WordParseError;

    /// Accepts `1`, single letters, and letters joined by `.` or `∘`.
    /// Whitespace is ignored. The result is not normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(WordParseError(s.to_string()));
        }
        let mut gens = Vec::new();
        for part in cleaned.split(['.', '∘']) {
            match part {
                "1" | "id" => {}
                _ => {
                    let mut cs = part.chars();
                    match (cs.next().and_then(Gen::from_letter), cs.next()) {
                        (Some(g), None) => gens.push(g),
                        _ => return Err(WordParseError(s.to_string())),
                    }
                }
            }
        }
        Ok(ModalityWord(gens))
    }
}

/// Generating 2-cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellGen {
    /// ε of `g ⊣ s`: `g∘s ⇒ 1`.
    EpsGS,
    /// η of `g ⊣ s`: `1 ⇒ s∘g`.
    EtaGS,
    /// ε of `p ⊣ a`: `p∘a ⇒ 1`.
    EpsPA,
    /// η of `p ⊣ a`: `1 ⇒ a∘p`.
    EtaPA,
    /// The counit `g ⇒ 1` that is usually left implicit.
    Eps0,
    /// `1 ⇒ p`: the projection `Γ.{p} = Γ, i:Int → Γ`. Only used by the
    /// kernel, which realizes p-locks as interval binders.
    Weaken,
}

impl CellGen {
    /// The five generators of the mode theory proper.
    pub const MODE_THEORY: [CellGen; 5] = [
        CellGen::EpsGS,
        CellGen::EtaGS,
        CellGen::EpsPA,
        CellGen::EtaPA,
        CellGen::Eps0,
    ];

    /// Mode-theory generators plus the interval weakening.
    pub const KERNEL: [CellGen; 6] = [
        CellGen::EpsGS,
        CellGen::EtaGS,
        CellGen::EpsPA,
        CellGen::EtaPA,
        CellGen::Eps0,
        CellGen::Weaken,
    ];

    pub fn src(self) -> ModalityWord {
        use Gen::*;
        ModalityWord(match self {
            CellGen::EpsGS => vec![G, S],
            CellGen::EpsPA => vec![P, A],
            CellGen::Eps0 => vec![G],
            CellGen::EtaGS | CellGen::EtaPA | CellGen::Weaken => vec![],
        })
    }

    pub fn dst(self) -> ModalityWord {
        use Gen::*;
        ModalityWord(match self {
            CellGen::EtaGS => vec![S, G],
            CellGen::EtaPA => vec![A, P],
            CellGen::Weaken => vec![P],
            CellGen::EpsGS | CellGen::EpsPA | CellGen::Eps0 => vec![],
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            CellGen::EpsGS => "eps_gs",
            CellGen::EtaGS => "eta_gs",
            CellGen::EpsPA => "eps_pa",
            CellGen::EtaPA => "eta_pa",
            CellGen::Eps0 => "eps0",
            CellGen::Weaken => "wk",
        }
    }

    pub fn from_name(s: &str) -> Option<CellGen> {
        Some(match s {
            "eps_gs" | "ε_gs" => CellGen::EpsGS,
            "eta_gs" | "η_gs" => CellGen::EtaGS,
            "eps_pa" | "ε_pa" => CellGen::EpsPA,
            "eta_pa" | "η_pa" => CellGen::EtaPA,
            "eps0" | "ε0" | "ε₀" => CellGen::Eps0,
            "wk" => CellGen::Weaken,
            _ => return None,
        })
    }
}

/// One whiskered generator: `left ◁ gen ▷ right`. Whiskers are normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub left: ModalityWord,
    pub gen: CellGen,
    pub right: ModalityWord,
}

impl Step {
    pub fn new(left: ModalityWord, gen: CellGen, right: ModalityWord) -> Self {
        Step {
            left: normalize(&left),
            gen,
            right: normalize(&right),
        }
    }

    pub fn src(&self) -> ModalityWord {
        normalize(&self.left.concat(&self.gen.src()).concat(&self.right))
    }

    pub fn dst(&self) -> ModalityWord {
        normalize(&self.left.concat(&self.gen.dst()).concat(&self.right))
    }

    fn whisker(&self, l: &ModalityWord, r: &ModalityWord) -> Step {
        Step::new(l.concat(&self.left), self.gen, self.right.concat(r))
    }

    /// Where the `p`s of the source go: for each `p` of the source (in
    /// order), its index among the target's `p`s, or `None` if consumed.
    /// Also returns the number of `p`s in the target.
    pub fn p_transport(&self) -> (Vec<Option<usize>>, usize) {
        let before = self.left.p_count();
        let after = self.right.p_count();
        let (consumed, fresh) = match self.gen {
            CellGen::EpsPA => (1, 0),
            CellGen::EtaPA | CellGen::Weaken => (0, 1),
            _ => (0, 0),
        };
        let mut map = Vec::with_capacity(before + consumed + after);
        for i in 0..before {
            map.push(Some(i));
        }
        for _ in 0..consumed {
            map.push(None);
        }
        for i in 0..after {
            map.push(Some(before + fresh + i));
        }
        (map, before + fresh + after)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.left.is_identity() {
            write!(f, "{} <| ", self.left)?;
        }
        write!(f, "{}", self.gen.name())?;
        if !self.right.is_identity() {
            write!(f, " |> {}", self.right)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("2-cell boundary mismatch: {found} where {expected} was required")]
pub struct BoundaryError {
    pub expected: ModalityWord,
    pub found: ModalityWord,
}

impl BoundaryError {
    pub fn code(&self) -> Code {
        Code::TwoCellBoundary
    }
}

/// A vertical pasting of whiskered generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoCell {
    src: ModalityWord,
    dst: ModalityWord,
    steps: Vec<Step>,
}

impl TwoCell {
    pub fn identity(w: &ModalityWord) -> Self {
        let w = normalize(w);
        TwoCell {
            src: w.clone(),
            dst: w,
            steps: Vec::new(),
        }
    }

    pub fn generator(gen: CellGen) -> Self {
        TwoCell::from_step(Step::new(ModalityWord::identity(), gen, ModalityWord::identity()))
    }

    pub fn from_step(step: Step) -> Self {
        TwoCell {
            src: step.src(),
            dst: step.dst(),
            steps: vec![step],
        }
    }

    /// Builds a cell from steps, validating that consecutive boundaries meet.
    pub fn from_steps(src: &ModalityWord, steps: Vec<Step>) -> Result<Self, BoundaryError> {
        let mut cur = normalize(src);
        for s in &steps {
            let ssrc = s.src();
            if ssrc != cur {
                return Err(BoundaryError {
                    expected: cur,
                    found: ssrc,
                });
            }
            cur = s.dst();
        }
        Ok(TwoCell {
            src: normalize(src),
            dst: cur,
            steps,
        })
    }

    pub fn src(&self) -> &ModalityWord {
        &self.src
    }

    pub fn dst(&self) -> &ModalityWord {
        &self.dst
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-checks the step boundaries.
    pub fn validate(&self) -> Result<(), BoundaryError> {
        let rebuilt = TwoCell::from_steps(&self.src, self.steps.clone())?;
        if rebuilt.dst != self.dst {
            return Err(BoundaryError {
                expected: self.dst.clone(),
                found: rebuilt.dst,
            });
        }
        Ok(())
    }

    /// Vertical composite `self ; other`.
    pub fn vcomp(&self, other: &TwoCell) -> Result<TwoCell, BoundaryError> {
        if self.dst != other.src {
            return Err(BoundaryError {
                expected: self.dst.clone(),
                found: other.src.clone(),
            });
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(TwoCell {
            src: self.src.clone(),
            dst: other.dst.clone(),
            steps,
        })
    }

    /// `l ◁ self ▷ r`.
    pub fn whisker(&self, l: &ModalityWord, r: &ModalityWord) -> TwoCell {
        TwoCell {
            src: normalize(&l.concat(&self.src).concat(r)),
            dst: normalize(&l.concat(&self.dst).concat(r)),
            steps: self.steps.iter().map(|s| s.whisker(l, r)).collect(),
        }
    }

    pub fn whisker_left(&self, l: &ModalityWord) -> TwoCell {
        self.whisker(l, &ModalityWord::identity())
    }

    pub fn whisker_right(&self, r: &ModalityWord) -> TwoCell {
        self.whisker(&ModalityWord::identity(), r)
    }

    /// How the `p` letters of `src` are carried to `dst`: entry `k` is the
    /// index of the image of the `k`-th `p` of the source among the `p`s of
    /// the target, or `None` if some step consumed it.
    pub fn p_map(&self) -> Vec<Option<usize>> {
        let mut cur: Vec<Option<usize>> = (0..self.src.p_count()).map(Some).collect();
        for s in &self.steps {
            let (m, _) = s.p_transport();
            cur = cur.into_iter().map(|c| c.and_then(|i| m[i])).collect();
        }
        cur
    }

    /// Which `p`s of the target are not images of a source `p`.
    pub fn fresh_targets(&self) -> Vec<usize> {
        let hit: Vec<usize> = self.p_map().into_iter().flatten().collect();
        (0..self.dst.p_count()).filter(|i| !hit.contains(i)).collect()
    }

    /// Normal form under the triangle and (co)join identities.
    ///
    /// Rules, applied until none fires:
    /// * `(X∘L ◁ η ▷ Y) ; (X ◁ ε ▷ L∘Y)` erases (left triangle law),
    /// * `(X ◁ η ▷ R∘Y) ; (X∘R ◁ ε ▷ Y)` erases (right triangle law),
    /// * `X∘g ◁ η_gs ▷ s∘Y` and `X∘s ◁ ε_gs ▷ g∘Y` erase (the (co)join of
    ///   the `g ⊣ s` (co)monad is the identity).
    pub fn normalized(&self) -> TwoCell {
        let mut steps = self.steps.clone();
        loop {
            if let Some(i) = steps.iter().position(is_trivial_join) {
                steps.remove(i);
                continue;
            }
            if let Some(i) = (0..steps.len().saturating_sub(1))
                .find(|&i| is_triangle(&steps[i], &steps[i + 1]))
            {
                steps.drain(i..i + 2);
                continue;
            }
            break;
        }
        TwoCell {
            src: self.src.clone(),
            dst: self.dst.clone(),
            steps,
        }
    }

    /// Equality of normal forms. Sound for the imposed identities but not
    /// complete for the free 2-category they present.
    pub fn cell_eq(&self, other: &TwoCell) -> Result<bool, BoundaryError> {
        if self.src != other.src {
            return Err(BoundaryError {
                expected: self.src.clone(),
                found: other.src.clone(),
            });
        }
        if self.dst != other.dst {
            return Err(BoundaryError {
                expected: self.dst.clone(),
                found: other.dst.clone(),
            });
        }
        Ok(self.normalized().steps == other.normalized().steps)
    }

    /// Removes interval weakenings whose `p` survives untouched to the
    /// target, moving each past the later steps by the interchange law.
    /// Returns the reduced cell and the target `p` indices (in the original
    /// target) that were removed.
    pub fn strip_weakenings(&self) -> (TwoCell, Vec<usize>) {
        let mut cell = self.normalized();
        let mut removed: Vec<usize> = Vec::new();
        'outer: loop {
            for i in (0..cell.steps.len()).rev() {
                if cell.steps[i].gen != CellGen::Weaken {
                    continue;
                }
                if let Some((reduced, idx)) = cell.drop_weakening(i) {
                    // translate idx (relative to current dst) to original dst
                    let mut orig = idx;
                    let mut sorted = removed.clone();
                    sorted.sort_unstable();
                    for r in sorted {
                        if r <= orig {
                            orig += 1;
                        }
                    }
                    removed.push(orig);
                    cell = reduced;
                    continue 'outer;
                }
            }
            break;
        }
        removed.sort_unstable();
        (cell, removed)
    }

    /// Removes the target `p` at index `k`, provided it is introduced by an
    /// interval weakening that no later step consumes.
    pub fn remove_weakened_p(&self, k: usize) -> Option<TwoCell> {
        for cand in [self.clone(), self.normalized()] {
            for i in 0..cand.steps.len() {
                if cand.steps[i].gen != CellGen::Weaken {
                    continue;
                }
                if let Some((reduced, idx)) = cand.drop_weakening(i) {
                    if idx == k {
                        return Some(reduced);
                    }
                }
            }
        }
        None
    }

    /// A comparison key: the normalized core left after stripping the
    /// removable weakenings, together with the indices they occupied.
    pub fn canonical(&self) -> (ModalityWord, ModalityWord, Vec<Step>, Vec<usize>) {
        let (core, removed) = self.strip_weakenings();
        let core = core.normalized();
        (self.src.clone(), self.dst.clone(), core.steps, removed)
    }

    /// Tries to delete the weakening at step `i`, removing its `p` from all
    /// later whiskers. Fails if a later step consumes that `p`.
    fn drop_weakening(&self, i: usize) -> Option<(TwoCell, usize)> {
        let step = &self.steps[i];
        // Index of the inserted p among the p's after step i.
        let mut idx = step.left.p_count();
        let mut later = Vec::new();
        for s in &self.steps[i + 1..] {
            let lp = s.left.p_count();
            let gp = s.gen.src().p_count();
            let new_step = if idx < lp {
                Step::new(remove_nth_p(&s.left, idx), s.gen, s.right.clone())
            } else if idx < lp + gp {
                return None;
            } else {
                Step::new(
                    s.left.clone(),
                    s.gen,
                    remove_nth_p(&s.right, idx - lp - gp),
                )
            };
            let (m, _) = s.p_transport();
            idx = m[idx]?;
            later.push(new_step);
        }
        let mut steps = self.steps[..i].to_vec();
        steps.extend(later);
        let src = self.src.clone();
        let cell = TwoCell::from_steps(&src, steps).ok()?;
        Some((cell, idx))
    }
}

/// Deletes the `n`-th `p` of `w` and renormalizes.
pub fn remove_nth_p(w: &ModalityWord, n: usize) -> ModalityWord {
    let mut seen = 0;
    let mut out = Vec::with_capacity(w.len());
    for &g in w.gens() {
        if g == Gen::P {
            if seen == n {
                seen += 1;
                continue;
            }
            seen += 1;
        }
        out.push(g);
    }
    normalize(&ModalityWord(out))
}

fn adjunction(eta: CellGen) -> Option<(CellGen, Gen, Gen)> {
    match eta {
        CellGen::EtaGS => Some((CellGen::EpsGS, Gen::G, Gen::S)),
        CellGen::EtaPA => Some((CellGen::EpsPA, Gen::P, Gen::A)),
        _ => None,
    }
}

fn is_triangle(first: &Step, second: &Step) -> bool {
    let Some((eps, l, r)) = adjunction(first.gen) else {
        return false;
    };
    if second.gen != eps {
        return false;
    }
    let lw = ModalityWord::single(l);
    let rw = ModalityWord::single(r);
    // L-triangle: η whiskered by L on the outside, then ε on the inside.
    let left_law = first.left == compose(&second.left, &lw)
        && second.right == compose(&lw, &first.right);
    // R-triangle: η whiskered by R on the inside, then ε on the outside.
    let right_law = first.right == compose(&rw, &second.right)
        && second.left == compose(&first.left, &rw);
    (left_law || right_law) && first.src() == second.dst()
}

fn is_trivial_join(s: &Step) -> bool {
    let g = ModalityWord::single(Gen::G);
    let sw = ModalityWord::single(Gen::S);
    let erasable = match s.gen {
        CellGen::EtaGS => compose(&s.left, &g) == s.left && compose(&sw, &s.right) == s.right,
        CellGen::EpsGS => compose(&s.left, &sw) == s.left && compose(&g, &s.right) == s.right,
        _ => false,
    };
    erasable && s.src() == s.dst()
}

impl fmt::Display for TwoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "id{{{}}}", self.src);
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Default depth bound for [`cell_search`].
pub const DEFAULT_SEARCH_DEPTH: usize = 8;

/// How many letters an intermediate word may exceed the boundaries by.
pub const MAX_DETOUR: usize = 4;

/// Breadth-first search for a 2-cell `src ⇒ dst` built from at most `depth`
/// whiskered generators drawn from `gens`, through intermediate words at most
/// [`MAX_DETOUR`] letters longer than `src` and `dst` combined. `None` means
/// none was found within these bounds.
pub fn cell_search_with(
    src: &ModalityWord,
    dst: &ModalityWord,
    depth: usize,
    gens: &[CellGen],
) -> Option<TwoCell> {
    let src = normalize(src);
    let dst = normalize(dst);
    if src == dst {
        return Some(TwoCell::identity(&src));
    }
    // Intermediate words are capped in length; together with the depth this
    // bounds the search space. Every cell the corpus needs stays well inside.
    let max_len = src.len() + dst.len() + MAX_DETOUR;
    let mut parent: HashMap<ModalityWord, Option<(ModalityWord, Step)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(src.clone(), None);
    queue.push_back((src.clone(), 0usize));
    while let Some((w, d)) = queue.pop_front() {
        if d >= depth {
            continue;
        }
        for step in successors(&w, gens) {
            let next = step.dst();
            if next.len() > max_len || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((w.clone(), step)));
            if next == dst {
                return Some(rebuild(&src, &dst, &parent));
            }
            queue.push_back((next, d + 1));
        }
    }
    None
}

/// [`cell_search_with`] over the mode-theory generators.
pub fn cell_search(src: &ModalityWord, dst: &ModalityWord, depth: usize) -> Option<TwoCell> {
    cell_search_with(src, dst, depth, &CellGen::MODE_THEORY)
}

fn successors(w: &ModalityWord, gens: &[CellGen]) -> Vec<Step> {
    let mut out = Vec::new();
    let letters = w.gens();
    for &gen in gens {
        let gsrc = gen.src();
        let k = gsrc.len();
        if k == 0 {
            for i in 0..=letters.len() {
                out.push(Step::new(
                    ModalityWord(letters[..i].to_vec()),
                    gen,
                    ModalityWord(letters[i..].to_vec()),
                ));
            }
        } else if letters.len() >= k {
            for i in 0..=letters.len() - k {
                if letters[i..i + k] == *gsrc.gens() {
                    out.push(Step::new(
                        ModalityWord(letters[..i].to_vec()),
                        gen,
                        ModalityWord(letters[i + k..].to_vec()),
                    ));
                }
            }
        }
    }
    out
}

fn rebuild(
    src: &ModalityWord,
    dst: &ModalityWord,
    parent: &HashMap<ModalityWord, Option<(ModalityWord, Step)>>,
) -> TwoCell {
    let mut steps = Vec::new();
    let mut cur = dst.clone();
    while let Some((prev, step)) = &parent[&cur] {
        steps.push(step.clone());
        cur = prev.clone();
    }
    steps.reverse();
    TwoCell::from_steps(src, steps).expect("search only follows valid steps")
}
