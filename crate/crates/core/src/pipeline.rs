//! Stage composition used by the command-line driver and the tests.

use crate::checker::check_program;
use crate::desugar::desugar_program;
use crate::diag::Diagnostic;
use crate::interp::{run_program, RunOutcome};
use crate::lexer::{tokenize, Token};
use crate::macro_engine::expand_all;
use crate::syntax::{parse_program, print_program, Program};

pub use crate::macro_engine::DEFAULT_DEPTH_LIMIT;

pub type StageResult<T> = Result<T, Vec<Diagnostic>>;

pub fn lex(src: &str) -> StageResult<Vec<Token>> {
    tokenize(src).map_err(|e| vec![e.to_diagnostic()])
}

pub fn parse(src: &str) -> StageResult<Program> {
    parse_program(&lex(src)?).map_err(|es| es.iter().map(|e| e.to_diagnostic()).collect())
}

pub fn expand(src: &str, depth: usize) -> StageResult<Program> {
    expand_all(&parse(src)?, depth).map_err(|es| es.iter().map(|e| e.to_diagnostic()).collect())
}

pub fn desugar(src: &str, depth: usize) -> StageResult<Program> {
    Ok(desugar_program(&expand(src, depth)?))
}

/// Checker diagnostics (errors and warnings) for an expanded program.
pub fn check(src: &str, depth: usize) -> StageResult<Vec<Diagnostic>> {
    Ok(check_program(&expand(src, depth)?))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunReport {
    /// The program was rejected before it ran.
    Rejected(Vec<Diagnostic>),
    /// The program ran; warnings from the checker are carried along.
    Ran { outcome: RunOutcome, warnings: Vec<Diagnostic> },
}

/// Expands, checks, desugars and runs. With `unchecked`, checker errors do
/// not prevent execution.
pub fn run(src: &str, depth: usize, unchecked: bool) -> RunReport {
    let expanded = match expand(src, depth) {
        Ok(p) => p,
        Err(d) => return RunReport::Rejected(d),
    };
    let diags = check_program(&expanded);
    if !unchecked && diags.iter().any(Diagnostic::is_error) {
        return RunReport::Rejected(diags);
    }
    RunReport::Ran {
        outcome: run_program(&desugar_program(&expanded)),
        warnings: diags,
    }
}

/// Stdout of a program that must run cleanly; panics otherwise.
pub fn run_to_string(src: &str) -> String {
    match run(src, DEFAULT_DEPTH_LIMIT, false) {
        RunReport::Ran { outcome, .. } if outcome.is_ok() => outcome.stdout,
        other => panic!("program did not run cleanly: {:?}", other),
    }
}

/// Re-ingestible source text of the expanded or desugared program.
pub fn to_source(p: &Program) -> String {
    print_program(p)
}
