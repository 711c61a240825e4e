//! Declarative macros: `macro_rules!` definitions and expansion of every
//! invocation in a program.

mod def;
mod matcher;
pub mod tt;

use std::collections::HashMap;

use thiserror::Error;

pub use def::{FragKind, MacroDef, PatTree, Rule, TmplTree};
pub use matcher::{match_pattern, transcribe, Binding, Bindings, TranscribeError};

use crate::diag::{codes, Diagnostic};
use crate::lexer::Token;
use crate::span::SourceSpan;
use crate::syntax::visit::{walk_block, walk_expr, walk_program, MutVisitor};
use crate::syntax::*;

pub const DEFAULT_DEPTH_LIMIT: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MacroError {
    #[error("invalid definition of `{name}!`: {message}")]
    Definition {
        name: String,
        message: String,
        span: SourceSpan,
    },
    #[error("no rule of `{name}!` matches this invocation")]
    NoRuleMatched { name: String, span: SourceSpan },
    #[error("cannot find macro `{name}!`")]
    UnknownMacro { name: String, span: SourceSpan },
    #[error("recursion limit of {limit} reached while expanding `{name}!`")]
    RecursionLimitExceeded {
        name: String,
        span: SourceSpan,
        limit: usize,
    },
    #[error("in expansion of `{name}!`: {error:?}")]
    Transcribe {
        name: String,
        span: SourceSpan,
        error: TranscribeError,
    },
    #[error("in expansion of `{name}!`: {error}")]
    Parse {
        name: String,
        span: SourceSpan,
        error: ParseError,
    },
}

impl MacroError {
    pub fn span(&self) -> SourceSpan {
        match self {
            MacroError::Definition { span, .. }
            | MacroError::NoRuleMatched { span, .. }
            | MacroError::UnknownMacro { span, .. }
            | MacroError::RecursionLimitExceeded { span, .. }
            | MacroError::Transcribe { span, .. }
            | MacroError::Parse { span, .. } => *span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(codes::MACRO, self.span(), self.to_string())
    }
}

/// Expands one invocation by a single step: the first matching rule's
/// template with captures substituted.
pub fn expand_invocation(def: &MacroDef, tokens: &[Token], span: SourceSpan) -> Result<Vec<Token>, MacroError> {
    let input = tt::build(tokens).map_err(|_| MacroError::NoRuleMatched {
        name: def.name.clone(),
        span,
    })?;
    for rule in &def.rules {
        if let Some(binds) = match_pattern(&rule.pattern, &input) {
            let mut out = Vec::new();
            transcribe(&rule.template, &binds, &mut out).map_err(|error| MacroError::Transcribe {
                name: def.name.clone(),
                span,
                error,
            })?;
            return Ok(out);
        }
    }
    Err(MacroError::NoRuleMatched {
        name: def.name.clone(),
        span,
    })
}

/// Collects the program's macro definitions.
pub fn collect_macros(program: &Program) -> Result<HashMap<String, MacroDef>, Vec<MacroError>> {
    let mut defs = HashMap::new();
    let mut errors = Vec::new();
    for item in &program.items {
        if let Item::Macro(m) = item {
            match MacroDef::from_item(m) {
                Ok(d) => {
                    defs.insert(d.name.clone(), d);
                }
                Err(e) => errors.push(e),
            }
        }
    }
    if errors.is_empty() {
        Ok(defs)
    } else {
        Err(errors)
    }
}

/// Expands every macro invocation until none remain. Macro definitions are
/// removed from the result. Invocations in statement position may expand to
/// several statements, which are spliced into the enclosing block.
pub fn expand_all(program: &Program, depth_limit: usize) -> Result<Program, Vec<MacroError>> {
    let defs = collect_macros(program)?;
    let mut out = program.clone();
    out.items.retain(|i| !matches!(i, Item::Macro(_)));
    let mut ex = Expander {
        defs: &defs,
        limit: depth_limit.max(1),
        depth: 0,
        site: None,
        errors: Vec::new(),
    };
    walk_program(&mut ex, &mut out);
    if ex.errors.is_empty() {
        Ok(out)
    } else {
        Err(ex.errors)
    }
}

struct Expander<'d> {
    defs: &'d HashMap<String, MacroDef>,
    limit: usize,
    depth: usize,
    /// Outermost invocation currently being expanded.
    site: Option<SourceSpan>,
    errors: Vec<MacroError>,
}

impl Expander<'_> {
    /// One expansion step of a user macro; `None` after recording an error.
    fn step(&mut self, name: &str, tokens: &[Token], span: SourceSpan) -> Option<Vec<Token>> {
        let site = self.site.unwrap_or(span);
        if self.depth >= self.limit {
            self.errors.push(MacroError::RecursionLimitExceeded {
                name: name.to_string(),
                span: site,
                limit: self.limit,
            });
            return None;
        }
        match expand_invocation(&self.defs[name], tokens, span) {
            Ok(t) => Some(t),
            Err(e) => {
                self.errors.push(e);
                None
            }
        }
    }

    fn nested<T>(&mut self, span: SourceSpan, f: impl FnOnce(&mut Self) -> T) -> T {
        let saved = self.site;
        if self.site.is_none() {
            self.site = Some(span);
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        self.site = saved;
        r
    }

    fn parse_err(&mut self, name: &str, span: SourceSpan, error: ParseError) {
        self.errors.push(MacroError::Parse {
            name: name.to_string(),
            span,
            error,
        });
    }

    /// Statement-position user macro: its expansion as block contents.
    fn expand_stmt(&mut self, name: &str, tokens: &[Token], span: SourceSpan) -> Option<Block> {
        let expanded = self.step(name, tokens, span)?;
        match parse_block_contents(&expanded) {
            Ok(mut b) => {
                self.nested(span, |ex| ex.visit_block(&mut b));
                Some(b)
            }
            Err(e) => {
                self.parse_err(name, span, e);
                None
            }
        }
    }
}

fn user_macro<'e>(e: &'e Expr, defs: &HashMap<String, MacroDef>) -> Option<(&'e str, &'e [Token])> {
    match &e.kind {
        ExprKind::MacroCall { name, tokens, .. } if defs.contains_key(name) => Some((name, tokens)),
        _ => None,
    }
}

impl MutVisitor for Expander<'_> {
    fn visit_block(&mut self, b: &mut Block) {
        let has_stmt_macro = b
            .stmts
            .iter()
            .any(|s| matches!(&s.kind, StmtKind::Expr { expr, .. } if user_macro(expr, self.defs).is_some()))
            || b.tail.as_deref().is_some_and(|t| user_macro(t, self.defs).is_some());
        if !has_stmt_macro {
            walk_block(self, b);
            return;
        }
        let mut stmts = Vec::new();
        for s in std::mem::take(&mut b.stmts) {
            if let StmtKind::Expr { expr, .. } = &s.kind {
                if let Some((name, tokens)) = user_macro(expr, self.defs) {
                    if let Some(exp) = self.expand_stmt(name, tokens, expr.span) {
                        stmts.extend(exp.stmts);
                        if let Some(t) = exp.tail {
                            let span = t.span;
                            stmts.push(Stmt {
                                kind: StmtKind::Expr { expr: *t, semi: true },
                                span,
                            });
                        }
                    }
                    continue;
                }
            }
            let mut s = s;
            match &mut s.kind {
                StmtKind::Let { init: Some(i), .. } => self.visit_expr(i),
                StmtKind::Let { .. } => {}
                StmtKind::Expr { expr, .. } => self.visit_expr(expr),
            }
            stmts.push(s);
        }
        let mut tail = b.tail.take();
        if let Some(t) = &tail {
            if let Some((name, tokens)) = user_macro(t, self.defs) {
                let span = t.span;
                let exp = self.expand_stmt(name, tokens, span);
                tail = None;
                if let Some(exp) = exp {
                    stmts.extend(exp.stmts);
                    tail = exp.tail;
                }
            }
        }
        if let Some(t) = &mut tail {
            self.visit_expr(t);
        }
        b.stmts = stmts;
        b.tail = tail;
    }

    fn visit_expr(&mut self, e: &mut Expr) {
        let ExprKind::MacroCall { name, tokens, .. } = &e.kind else {
            walk_expr(self, e);
            return;
        };
        let span = e.span;
        if self.defs.contains_key(name) {
            let name = name.clone();
            let Some(expanded) = self.step(&name, tokens, span) else {
                e.kind = ExprKind::Lit(Lit::Unit);
                return;
            };
            match parse_expression(&expanded) {
                Ok(new) => {
                    *e = new;
                    self.nested(span, |ex| ex.visit_expr(e));
                }
                Err(err) => {
                    self.parse_err(&name, span, err);
                    e.kind = ExprKind::Lit(Lit::Unit);
                }
            }
        } else if let Some(mac) = BuiltinMacro::from_name(name) {
            match parse_expression_list(tokens) {
                Ok(args) => {
                    e.kind = ExprKind::Builtin { mac, args };
                    walk_expr(self, e);
                }
                Err(err) => {
                    let name = name.clone();
                    self.parse_err(&name, span, err);
                    e.kind = ExprKind::Lit(Lit::Unit);
                }
            }
        } else {
            self.errors.push(MacroError::UnknownMacro {
                name: name.clone(),
                span,
            });
            e.kind = ExprKind::Lit(Lit::Unit);
        }
    }
}
