//! The property language: `G[..]`, `F[..]`, `P[.. ~~> .. ~~> ..]` over
//! propositional, arithmetic, string, and list expressions.

mod ast;
mod lexer;
mod normalize;
mod parser;
mod printer;

use thiserror::Error;

pub use ast::{BinOp, Expr, ListOp, Quantifier, NOT_PRECEDENCE};
pub use lexer::{tokenize, Spanned, Tok};
pub use normalize::normalize;
pub use parser::parse_property;
pub use printer::{pretty_print, print_parenthesized};

/// A syntax error at a character offset of the property text.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("at column {}: {message}", .pos + 1)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}
