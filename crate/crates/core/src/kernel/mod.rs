//! The core type theory: contexts with locks, the 2-cell action, reduction,
//! conversion and bidirectional checking.

pub mod check;
pub mod ctx;
pub mod eval;
pub mod module;
pub mod print;
pub mod subst;
pub mod term;

pub use check::Checker;
pub use ctx::{Ctx, Entry};
pub use eval::{conv, nf, whnf, Env, Global};
pub use module::{DeclOutcome, ModuleReport, Session};
pub use print::show;
pub use term::{Term, Tm};
