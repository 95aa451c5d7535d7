//! Surface syntax: lexer, recursive-descent parser and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::{SameShape, SurfaceModule};
pub use parser::{parse_cell, parse_expr, parse_module};
pub use printer::{print_decl, print_expr, print_module};
