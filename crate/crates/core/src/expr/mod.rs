//! Expression language for metric components and its jet evaluator.

mod ast;
mod jet;
mod parser;
mod tape;

pub(crate) use ast::flat;
pub use ast::{BinaryOp, Expr, UnaryOp};
pub use jet::{Jet3, MAX_DIM};
pub use parser::{parse_expr, ParseError, Parser};
pub use tape::Tape;

use crate::error::Result;

/// Value and derivatives up to order three of `ast` at `p`.
pub fn eval_jet3(ast: &Expr, p: &[f64]) -> Result<Jet3> {
    ast.eval_jet3(p)
}
