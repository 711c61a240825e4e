//! Frontend and interpreter for FRS, a small functional subset of Rust.
//!
//! The pipeline is `lexer` → `syntax` → `macro_engine` → `desugar` →
//! `checker` → `interp`. [`pipeline`] strings the stages together.

pub mod checker;
pub mod desugar;
pub mod diag;
pub mod interp;
pub mod lexer;
pub mod macro_engine;
pub mod pipeline;
pub mod span;
pub mod syntax;
