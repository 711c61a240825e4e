use thiserror::Error;

use crate::diag::{codes, Diagnostic};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeErrorKind {
    #[error("index out of bounds: the len is {len} but the index is {index}")]
    IndexOutOfBounds { index: i128, len: usize },
    #[error("attempt to divide by zero")]
    DivisionByZero,
    #[error("no method `{name}` found for type `{ty}`")]
    NoMethodFound { ty: String, name: String },
    #[error("multiple applicable methods named `{0}`")]
    AmbiguousMethod(String),
    #[error("no match arm matched the value `{0}`")]
    NonExhaustiveMatch(String),
    #[error("`{name}` takes {expected} argument(s) but {found} were supplied")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("format string has {placeholders} placeholder(s) but {args} argument(s) were given")]
    FormatArityMismatch { placeholders: usize, args: usize },
    #[error("invalid format string: {0}")]
    BadFormat(String),
    #[error("stack overflow: more than {0} nested calls")]
    StackOverflow(usize),
    #[error("cannot mutate the contents of an `Rc`")]
    SharedMutation,
    #[error("cannot write through a shared reference")]
    ImmutableWrite,
    #[error("conflicting access to the same location")]
    BorrowConflict,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("refutable pattern in `let` did not match `{0}`")]
    RefutablePattern(String),
    #[error("`next` returned `{0}`, expected `None` or `Some(_)`")]
    BadIterator(String),
    #[error("`{0}` outside of a loop")]
    StrayControl(&'static str),
    #[error("no entry function `{0}` taking no parameters")]
    MissingEntry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub span: SourceSpan,
}

impl RuntimeError {
    pub fn new(kind: RuntimeErrorKind, span: SourceSpan) -> Self {
        RuntimeError { kind, span }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(codes::RUNTIME, self.span, self.kind.to_string())
    }
}
