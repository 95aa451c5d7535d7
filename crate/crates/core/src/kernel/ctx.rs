use std::rc::Rc;

use crate::modality::{normalize, Gen, ModalityWord};

use super::term::{Name, Tm};

#[derive(Clone, Debug)]
pub enum Entry {
    /// `x : (ann | ty)`; `ty` lives in the prefix extended by `ann`.
    Decl {
        name: Name,
        ann: ModalityWord,
        ty: Option<Tm>,
    },
    /// A lock. A `p`-lock is an interval variable and occupies a slot.
    Lock { gen: Gen, name: Option<Name> },
}

impl Entry {
    pub fn is_slot(&self) -> bool {
        matches!(self, Entry::Decl { .. } | Entry::Lock { gen: Gen::P, .. })
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Entry::Decl { name, .. } => Some(name),
            Entry::Lock { name, .. } => name.as_ref(),
        }
    }
}

struct Node {
    entry: Entry,
    parent: Ctx,
    slots: usize,
}

/// A persistent context: cheap to clone and extend.
#[derive(Clone, Default)]
pub struct Ctx(Option<Rc<Node>>);

/// Result of resolving a slot.
pub struct SlotInfo {
    pub entry: Entry,
    /// The context before the entry.
    pub prefix: Ctx,
    /// Entries after it, outermost first.
    pub after: Vec<Entry>,
}

impl Ctx {
    pub fn empty() -> Self {
        Ctx(None)
    }

    pub fn push(&self, entry: Entry) -> Ctx {
        let slots = self.slots() + usize::from(entry.is_slot());
        Ctx(Some(Rc::new(Node {
            entry,
            parent: self.clone(),
            slots,
        })))
    }

    pub fn push_decl(&self, name: Name, ann: ModalityWord, ty: Option<Tm>) -> Ctx {
        self.push(Entry::Decl { name, ann, ty })
    }

    pub fn push_lock(&self, gen: Gen, name: Option<Name>) -> Ctx {
        self.push(Entry::Lock { gen, name })
    }

    /// Pushes the letters of `word` in order; `names` label its `p`s.
    pub fn push_locks(&self, word: &ModalityWord, names: &[Name]) -> Ctx {
        let mut ctx = self.clone();
        let mut names = names.iter();
        for &g in word.gens() {
            let name = if g == Gen::P { names.next().cloned() } else { None };
            ctx = ctx.push_lock(g, name);
        }
        ctx
    }

    pub fn slots(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.slots)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Entries from the innermost outwards.
    pub fn iter(&self) -> impl Iterator<Item = &Entry> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.parent.0.as_deref();
            Some(&node.entry)
        })
    }

    /// The normalized composite of the locks after slot `k`.
    pub fn locks_after_slot(&self, k: usize) -> ModalityWord {
        let mut letters = Vec::new();
        let mut seen = 0;
        for e in self.iter() {
            if e.is_slot() {
                if seen == k {
                    break;
                }
                seen += 1;
            }
            if let Entry::Lock { gen, .. } = e {
                letters.push(*gen);
            }
        }
        letters.reverse();
        normalize(&ModalityWord::from_gens(letters))
    }

    /// All lock letters, normalized.
    pub fn locks(&self) -> ModalityWord {
        let mut letters: Vec<Gen> = self
            .iter()
            .filter_map(|e| match e {
                Entry::Lock { gen, .. } => Some(*gen),
                _ => None,
            })
            .collect();
        letters.reverse();
        normalize(&ModalityWord::from_gens(letters))
    }

    pub fn slot(&self, k: usize) -> Option<SlotInfo> {
        let mut after = Vec::new();
        let mut seen = 0;
        let mut cur = self.0.as_deref();
        while let Some(node) = cur {
            if node.entry.is_slot() {
                if seen == k {
                    after.reverse();
                    return Some(SlotInfo {
                        entry: node.entry.clone(),
                        prefix: node.parent.clone(),
                        after,
                    });
                }
                seen += 1;
            }
            after.push(node.entry.clone());
            cur = node.parent.0.as_deref();
        }
        None
    }

    /// Innermost slot named `name`, as a de Bruijn index.
    pub fn find(&self, name: &str) -> Option<usize> {
        let mut seen = 0;
        for e in self.iter() {
            if e.name().is_some_and(|n| &**n == name) && e.is_slot() {
                return Some(seen);
            }
            if e.is_slot() {
                seen += 1;
            }
        }
        None
    }

    /// Display name for slot `k`.
    pub fn slot_name(&self, k: usize) -> String {
        match self.slot(k) {
            Some(info) => match info.entry.name() {
                Some(n) => n.to_string(),
                None => format!("i{k}"),
            },
            None => format!("#{k}"),
        }
    }

    pub fn is_plock(&self, k: usize) -> bool {
        matches!(
            self.slot(k).map(|s| s.entry),
            Some(Entry::Lock { gen: Gen::P, .. })
        )
    }
}
