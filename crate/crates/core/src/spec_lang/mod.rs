//! The model-spec text format, integer expressions and polynomial real maps.

mod ast;
mod eval;
mod lexer;
mod parser;
mod printer;
mod real;

use std::fmt;

use thiserror::Error;

pub use ast::{
    BinOp, Expr, ModelSpec, ObservableSpec, Proj, RangeSpec, SimOpSpec, Sort, StatesSpec,
};
pub use eval::{eval, eval_int, eval_pred, EvalError, Value};
pub use parser::{parse_expr, parse_model, DEFAULT_VAR};
pub use printer::print_model;
pub use real::{eval_interval, parse_real_fn, Closed, RealError, RealExpr, RealFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecErrorKind {
    Syntax,
    Sort,
    Scope,
    Duplicate,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind:?} error: {message}")]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl SpecError {
    fn new(kind: SpecErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        SpecError {
            kind,
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn syntax(pos: Pos, m: impl Into<String>) -> Self {
        Self::new(SpecErrorKind::Syntax, pos, m)
    }

    pub(crate) fn sort(pos: Pos, m: impl Into<String>) -> Self {
        Self::new(SpecErrorKind::Sort, pos, m)
    }

    pub(crate) fn scope(pos: Pos, m: impl Into<String>) -> Self {
        Self::new(SpecErrorKind::Scope, pos, m)
    }

    pub(crate) fn duplicate(pos: Pos, m: impl Into<String>) -> Self {
        Self::new(SpecErrorKind::Duplicate, pos, m)
    }

    pub(crate) fn missing(pos: Pos, m: impl Into<String>) -> Self {
        Self::new(SpecErrorKind::Missing, pos, m)
    }
}
