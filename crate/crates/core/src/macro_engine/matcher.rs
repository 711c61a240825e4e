//! Rule matching and template transcription.

use std::collections::BTreeMap;

use super::def::{pattern_vars, template_vars, FragKind, PatTree, TmplTree};
use super::tt::{flatten, TokenTree};
use crate::lexer::{Payload, Token, TokenKind};
use crate::syntax::parse_expression;

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    One(Vec<TokenTree>, FragKind),
    Many(Vec<Binding>),
}

pub type Bindings = BTreeMap<String, Binding>;

type Cont<'a> = &'a dyn Fn(&[TokenTree], Bindings) -> Option<Bindings>;

/// Matches the whole input against a rule pattern.
pub fn match_pattern(pattern: &[PatTree], input: &[TokenTree]) -> Option<Bindings> {
    match_seq(pattern, input, Bindings::new(), &|rest, b| rest.is_empty().then_some(b))
}

fn same_token(a: &Token, b: &Token) -> bool {
    a.kind == b.kind && a.text == b.text
}

fn parses_as_expr(tts: &[TokenTree]) -> bool {
    parse_expression(&flatten(tts)).is_ok()
}

fn match_seq(pats: &[PatTree], input: &[TokenTree], binds: Bindings, k: Cont) -> Option<Bindings> {
    let Some((first, rest)) = pats.split_first() else {
        return k(input, binds);
    };
    match first {
        PatTree::Token(t) => match input.first() {
            Some(TokenTree::Leaf(x)) if same_token(t, x) => match_seq(rest, &input[1..], binds, k),
            _ => None,
        },
        PatTree::Group(delim, inner) => match input.first() {
            Some(TokenTree::Group { delim: d, inner: got, .. }) if d == delim => {
                let b = match_seq(inner, got, binds, &|r, b| r.is_empty().then_some(b))?;
                match_seq(rest, &input[1..], b, k)
            }
            _ => None,
        },
        PatTree::Fragment { name, kind: FragKind::Ident } => match input.first() {
            Some(tt @ TokenTree::Leaf(x)) if x.is_ident() || x.is("self") => {
                let mut b = binds;
                b.insert(name.clone(), Binding::One(vec![tt.clone()], FragKind::Ident));
                match_seq(rest, &input[1..], b, k)
            }
            _ => None,
        },
        PatTree::Fragment { name, kind: FragKind::Expr } => {
            // Longest candidate first; the rest of the pattern must still match.
            for end in (1..=input.len()).rev() {
                if !parses_as_expr(&input[..end]) {
                    continue;
                }
                let mut b = binds.clone();
                b.insert(name.clone(), Binding::One(input[..end].to_vec(), FragKind::Expr));
                if let Some(done) = match_seq(rest, &input[end..], b, k) {
                    return Some(done);
                }
            }
            None
        }
        PatTree::Repeat { body, sep } => {
            let mut names = Vec::new();
            pattern_vars(body, &mut names);
            match_rep(body, sep.as_ref(), &names, rest, input, binds, Vec::new(), k)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn match_rep(
    body: &[PatTree],
    sep: Option<&Token>,
    names: &[String],
    rest: &[PatTree],
    input: &[TokenTree],
    binds: Bindings,
    iters: Vec<Bindings>,
    k: Cont,
) -> Option<Bindings> {
    // Greedy: try one more iteration before stopping.
    let after_sep = match (iters.is_empty(), sep) {
        (false, Some(s)) => match input.first() {
            Some(TokenTree::Leaf(x)) if same_token(s, x) => Some(&input[1..]),
            _ => None,
        },
        _ => Some(input),
    };
    if let Some(start) = after_sep {
        let more = match_seq(body, start, Bindings::new(), &|remaining, ib| {
            if remaining.len() == input.len() {
                return None;
            }
            let mut next = iters.clone();
            next.push(ib);
            match_rep(body, sep, names, rest, remaining, binds.clone(), next, k)
        });
        if more.is_some() {
            return more;
        }
    }
    let mut b = binds;
    for name in names {
        let items = iters.iter().map(|it| it[name].clone()).collect();
        b.insert(name.clone(), Binding::Many(items));
    }
    match_seq(rest, input, b, k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscribeError {
    Unbound(String),
    StillRepeating(String),
    CountMismatch,
    NoRepeatingVar,
}

pub fn transcribe(tmpl: &[TmplTree], binds: &Bindings, out: &mut Vec<Token>) -> Result<(), TranscribeError> {
    for t in tmpl {
        match t {
            TmplTree::Token(tok) => out.push(tok.clone()),
            TmplTree::Group { open, inner, close } => {
                out.push(open.clone());
                transcribe(inner, binds, out)?;
                out.push(close.clone());
            }
            TmplTree::Var { name, .. } => match binds.get(name) {
                None => return Err(TranscribeError::Unbound(name.clone())),
                Some(Binding::Many(_)) => return Err(TranscribeError::StillRepeating(name.clone())),
                Some(Binding::One(tts, kind)) => {
                    // Multi-token expressions keep their grouping.
                    let wrap = *kind == FragKind::Expr && tts.len() > 1;
                    if wrap {
                        out.push(synthetic(tts[0].first_token(), "("));
                    }
                    out.extend(flatten(tts));
                    if wrap {
                        out.push(synthetic(tts[tts.len() - 1].first_token(), ")"));
                    }
                }
            },
            TmplTree::Repeat { body, sep } => {
                let mut names = Vec::new();
                template_vars(body, &mut names);
                let mut count = None;
                for n in &names {
                    if let Some(Binding::Many(items)) = binds.get(n) {
                        match count {
                            None => count = Some(items.len()),
                            Some(c) if c != items.len() => return Err(TranscribeError::CountMismatch),
                            _ => {}
                        }
                    }
                }
                let count = count.ok_or(TranscribeError::NoRepeatingVar)?;
                for i in 0..count {
                    if i > 0 {
                        if let Some(s) = sep {
                            out.push(s.clone());
                        }
                    }
                    let mut inner = binds.clone();
                    for n in &names {
                        if let Some(Binding::Many(items)) = binds.get(n) {
                            inner.insert(n.clone(), items[i].clone());
                        }
                    }
                    transcribe(body, &inner, out)?;
                }
            }
        }
    }
    Ok(())
}

fn synthetic(at: &Token, text: &str) -> Token {
    Token::new(TokenKind::Delimiter, text, Payload::None, at.span)
}
