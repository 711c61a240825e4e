//! Program tree, parser, printer and tree dump.

pub mod ast;
pub mod parser;
pub mod pretty;
pub mod tree;
pub mod visit;

pub use ast::*;
pub use parser::{parse_block_contents, parse_expression, parse_expression_list, parse_pattern, parse_program, ParseError};
pub use pretty::{print_block, print_expr, print_pattern, print_program, print_type};
pub use tree::{dump_expr, dump_program};
