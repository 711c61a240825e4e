//! `macro_rules!` definitions: rule patterns and templates.

use std::collections::BTreeMap;

use super::tt::{self, TokenTree};
use super::MacroError;
use crate::lexer::{Token, TokenKind};
use crate::span::SourceSpan;
use crate::syntax::{Delim, MacroItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragKind {
    Ident,
    Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatTree {
    Token(Token),
    Group(Delim, Vec<PatTree>),
    Fragment { name: String, kind: FragKind },
    Repeat { body: Vec<PatTree>, sep: Option<Token> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TmplTree {
    Token(Token),
    Group { open: Token, inner: Vec<TmplTree>, close: Token },
    Var { name: String, span: SourceSpan },
    Repeat { body: Vec<TmplTree>, sep: Option<Token> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub pattern: Vec<PatTree>,
    pub template: Vec<TmplTree>,
    /// Fragment name to repetition depth and kind.
    pub vars: BTreeMap<String, (usize, FragKind)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroDef {
    pub name: String,
    pub rules: Vec<Rule>,
    pub span: SourceSpan,
}

impl MacroDef {
    pub fn from_item(item: &MacroItem) -> Result<MacroDef, MacroError> {
        let err = |span: SourceSpan, message: String| MacroError::Definition {
            name: item.name.clone(),
            message,
            span,
        };
        let trees = tt::build(&item.body).map_err(|t| err(t.span, format!("unbalanced `{}`", t.text)))?;
        let mut rules = Vec::new();
        let mut i = 0;
        while i < trees.len() {
            let TokenTree::Group { inner: pat, .. } = &trees[i] else {
                return Err(err(trees[i].first_token().span, "expected a rule pattern in delimiters".into()));
            };
            match trees.get(i + 1).and_then(TokenTree::leaf) {
                Some(t) if t.is("=>") => {}
                _ => return Err(err(trees[i].first_token().span, "expected `=>` after rule pattern".into())),
            }
            let Some(TokenTree::Group { inner: tmpl, .. }) = trees.get(i + 2) else {
                return Err(err(trees[i].first_token().span, "expected a rule template in delimiters".into()));
            };
            let mut vars = BTreeMap::new();
            let pattern = parse_pattern(pat, 0, &mut vars).map_err(|(s, m)| err(s, m))?;
            let template = parse_template(tmpl).map_err(|(s, m)| err(s, m))?;
            check_template(&template, &vars, 0).map_err(|(s, m)| err(s, m))?;
            rules.push(Rule {
                pattern,
                template,
                vars,
            });
            i += 3;
            if trees.get(i).and_then(TokenTree::leaf).is_some_and(|t| t.is(";")) {
                i += 1;
            }
        }
        if rules.is_empty() {
            return Err(err(item.span, "macro has no rules".into()));
        }
        Ok(MacroDef {
            name: item.name.clone(),
            rules,
            span: item.span,
        })
    }
}

type DefResult<T> = Result<T, (SourceSpan, String)>;

fn is_dollar(tt: &TokenTree) -> bool {
    tt.leaf().is_some_and(|t| t.is("$"))
}

/// After a `$( ... )` group: optional separator then the `*` operator.
fn parse_rep_op(trees: &[TokenTree], i: usize, at: SourceSpan) -> DefResult<(Option<Token>, usize)> {
    let op_of = |tt: Option<&TokenTree>| tt.and_then(TokenTree::leaf).filter(|t| t.kind == TokenKind::Punct && matches!(t.text.as_str(), "*" | "+" | "?")).cloned();
    if let Some(op) = op_of(trees.get(i)) {
        return rep_star(op, None, i + 1);
    }
    let Some(sep) = trees.get(i).and_then(TokenTree::leaf) else {
        return Err((at, "expected a repetition operator after `$(...)`".into()));
    };
    match op_of(trees.get(i + 1)) {
        Some(op) => rep_star(op, Some(sep.clone()), i + 2),
        None => Err((at, "expected a repetition operator after `$(...)`".into())),
    }
}

fn rep_star(op: Token, sep: Option<Token>, next: usize) -> DefResult<(Option<Token>, usize)> {
    if op.text == "*" {
        Ok((sep, next))
    } else {
        Err((op.span, format!("repetition operator `{}` is not supported; use `*`", op.text)))
    }
}

fn parse_pattern(
    trees: &[TokenTree],
    depth: usize,
    vars: &mut BTreeMap<String, (usize, FragKind)>,
) -> DefResult<Vec<PatTree>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < trees.len() {
        let tt = &trees[i];
        if is_dollar(tt) {
            let at = tt.first_token().span;
            match trees.get(i + 1) {
                Some(TokenTree::Leaf(name)) if name.is_ident() => {
                    let colon = trees.get(i + 2).and_then(TokenTree::leaf).is_some_and(|t| t.is(":"));
                    let kind_tok = trees.get(i + 3).and_then(TokenTree::leaf).filter(|t| t.is_ident());
                    let (true, Some(kind_tok)) = (colon, kind_tok) else {
                        return Err((at, format!("expected `${}:kind`", name.text)));
                    };
                    let kind = match kind_tok.text.as_str() {
                        "ident" => FragKind::Ident,
                        "expr" => FragKind::Expr,
                        other => {
                            return Err((kind_tok.span, format!("unsupported fragment specifier `{}`", other)));
                        }
                    };
                    if vars.insert(name.text.clone(), (depth, kind)).is_some() {
                        return Err((name.span, format!("duplicate fragment `${}`", name.text)));
                    }
                    out.push(PatTree::Fragment {
                        name: name.text.clone(),
                        kind,
                    });
                    i += 4;
                }
                Some(TokenTree::Group {
                    delim: Delim::Paren,
                    inner,
                    ..
                }) => {
                    let body = parse_pattern(inner, depth + 1, vars)?;
                    let (sep, next) = parse_rep_op(trees, i + 2, at)?;
                    out.push(PatTree::Repeat { body, sep });
                    i = next;
                }
                _ => return Err((at, "expected a fragment or repetition after `$`".into())),
            }
            continue;
        }
        match tt {
            TokenTree::Leaf(t) => out.push(PatTree::Token(t.clone())),
            TokenTree::Group { delim, inner, .. } => out.push(PatTree::Group(*delim, parse_pattern(inner, depth, vars)?)),
        }
        i += 1;
    }
    Ok(out)
}

fn parse_template(trees: &[TokenTree]) -> DefResult<Vec<TmplTree>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < trees.len() {
        let tt = &trees[i];
        if is_dollar(tt) {
            let at = tt.first_token().span;
            match trees.get(i + 1) {
                Some(TokenTree::Leaf(name)) if name.is_ident() => {
                    out.push(TmplTree::Var {
                        name: name.text.clone(),
                        span: name.span,
                    });
                    i += 2;
                }
                Some(TokenTree::Group {
                    delim: Delim::Paren,
                    inner,
                    ..
                }) => {
                    let body = parse_template(inner)?;
                    let (sep, next) = parse_rep_op(trees, i + 2, at)?;
                    out.push(TmplTree::Repeat { body, sep });
                    i = next;
                }
                _ => return Err((at, "expected a variable or repetition after `$`".into())),
            }
            continue;
        }
        match tt {
            TokenTree::Leaf(t) => out.push(TmplTree::Token(t.clone())),
            TokenTree::Group { open, inner, close, .. } => out.push(TmplTree::Group {
                open: open.clone(),
                inner: parse_template(inner)?,
                close: close.clone(),
            }),
        }
        i += 1;
    }
    Ok(out)
}

/// Every variable must be bound, and used under at least as many
/// repetitions as it was captured under.
fn check_template(tmpl: &[TmplTree], vars: &BTreeMap<String, (usize, FragKind)>, depth: usize) -> DefResult<()> {
    for t in tmpl {
        match t {
            TmplTree::Token(_) => {}
            TmplTree::Group { inner, .. } => check_template(inner, vars, depth)?,
            TmplTree::Var { name, span } => match vars.get(name) {
                None => return Err((*span, format!("unbound fragment `${}` in template", name))),
                Some((d, _)) if *d > depth => {
                    return Err((*span, format!("`${}` is still repeating at this depth", name)));
                }
                _ => {}
            },
            TmplTree::Repeat { body, .. } => check_template(body, vars, depth + 1)?,
        }
    }
    Ok(())
}

/// Variable names used inside a template subtree.
pub(super) fn template_vars(tmpl: &[TmplTree], out: &mut Vec<String>) {
    for t in tmpl {
        match t {
            TmplTree::Token(_) => {}
            TmplTree::Group { inner, .. } => template_vars(inner, out),
            TmplTree::Var { name, .. } => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            TmplTree::Repeat { body, .. } => template_vars(body, out),
        }
    }
}

/// Fragment names declared inside a pattern subtree.
pub(super) fn pattern_vars(pat: &[PatTree], out: &mut Vec<String>) {
    for p in pat {
        match p {
            PatTree::Token(_) => {}
            PatTree::Group(_, inner) => pattern_vars(inner, out),
            PatTree::Fragment { name, .. } => out.push(name.clone()),
            PatTree::Repeat { body, .. } => pattern_vars(body, out),
        }
    }
}
