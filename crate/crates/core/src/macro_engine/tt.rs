//! Token trees: tokens grouped by balanced delimiters.

use crate::lexer::{Token, TokenKind};
use crate::syntax::Delim;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenTree {
    Leaf(Token),
    Group {
        delim: Delim,
        open: Token,
        inner: Vec<TokenTree>,
        close: Token,
    },
}

impl TokenTree {
    pub fn leaf(&self) -> Option<&Token> {
        match self {
            TokenTree::Leaf(t) => Some(t),
            TokenTree::Group { .. } => None,
        }
    }

    pub fn first_token(&self) -> &Token {
        match self {
            TokenTree::Leaf(t) => t,
            TokenTree::Group { open, .. } => open,
        }
    }

    pub fn flatten_into(&self, out: &mut Vec<Token>) {
        match self {
            TokenTree::Leaf(t) => out.push(t.clone()),
            TokenTree::Group { open, inner, close, .. } => {
                out.push(open.clone());
                for tt in inner {
                    tt.flatten_into(out);
                }
                out.push(close.clone());
            }
        }
    }
}

pub fn flatten(tts: &[TokenTree]) -> Vec<Token> {
    let mut out = Vec::new();
    for tt in tts {
        tt.flatten_into(&mut out);
    }
    out
}

/// Groups a token stream. Returns the offending token on imbalance.
pub fn build(tokens: &[Token]) -> Result<Vec<TokenTree>, Token> {
    let mut stack: Vec<(Delim, Token, Vec<TokenTree>)> = Vec::new();
    let mut cur: Vec<TokenTree> = Vec::new();
    for t in tokens {
        if t.kind == TokenKind::Delimiter {
            if let Some(d) = Delim::from_open(&t.text) {
                stack.push((d, t.clone(), std::mem::take(&mut cur)));
                continue;
            }
            let Some((d, open, parent)) = stack.pop() else {
                return Err(t.clone());
            };
            if d.close() != t.text {
                return Err(t.clone());
            }
            let inner = std::mem::replace(&mut cur, parent);
            cur.push(TokenTree::Group {
                delim: d,
                open,
                inner,
                close: t.clone(),
            });
        } else {
            cur.push(TokenTree::Leaf(t.clone()));
        }
    }
    match stack.pop() {
        Some((_, open, _)) => Err(open),
        None => Ok(cur),
    }
}
