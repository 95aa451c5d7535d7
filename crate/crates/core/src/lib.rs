//! A proof-assistant kernel for triangulated type theory: multimodal
//! dependent types over the `g s o p a` mode theory, with a bounded
//! distributive lattice interval.

pub mod diagnostic;
pub mod lattice;
pub mod modality;
pub mod syntax;
pub mod kernel;
pub mod prelude;
pub mod stdlib;
