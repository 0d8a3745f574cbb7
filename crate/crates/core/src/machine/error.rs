use alloc::string::String;
use core::fmt;

use thiserror::Error;

use super::expr::EvalError;
use super::model::Span;
use crate::event::Name;

/// A problem with a model, located at the declaration it concerns.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ModelError {
    pub kind: ModelErrorKind,
    pub span: Span,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl ModelError {
    pub fn new(kind: ModelErrorKind, span: Span) -> Self {
        ModelError { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelErrorKind {
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: Name },
    #[error("undeclared {what} `{name}`")]
    Undeclared { what: &'static str, name: Name },
    #[error("{0}")]
    Invalid(String),
    #[error("junction `{machine}.{junction}` has no enabled branch when {valuation}")]
    NonExhaustiveJunction {
        machine: Name,
        junction: Name,
        valuation: String,
    },
    #[error("junction `{machine}.{junction}` is re-entered without reaching a state")]
    JunctionCycle { machine: Name, junction: Name },
    #[error("value {value} is out of range for `{machine}.{var}`")]
    OutOfRange {
        machine: Name,
        var: Name,
        value: String,
    },
    #[error("`{name}` has {size} values, more than the limit of {limit}")]
    RangeTooWide { name: Name, size: u64, limit: u64 },
    #[error("in {context}: {source}")]
    Eval { context: String, source: EvalError },
    #[error("input `{node}.{event}` is fed by more than one connection")]
    DuplicateInput { node: Name, event: Name },
}
