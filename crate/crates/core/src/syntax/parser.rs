//! Recursive-descent parser with a Pratt loop for binary operators.

use thiserror::Error;

use super::ast::*;
use crate::diag::{codes, Diagnostic};
use crate::lexer::{Payload, Token, TokenKind};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

fn expected_list(expected: &[String]) -> String {
    match expected {
        [] => "something else".to_string(),
        [one] => one.clone(),
        many => format!("one of {}", many.join(", ")),
    }
}

impl ParseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(codes::PARSE, self.span, self.to_string())
    }
}

pub type PResult<T> = Result<T, ParseError>;

/// Parses a whole program. Errors abort the current item; parsing resumes
/// at the next top-level item and all errors are returned together.
pub fn parse_program(tokens: &[Token]) -> Result<Program, Vec<ParseError>> {
    let mut p = Parser::new(tokens);
    let mut items = Vec::new();
    let mut errors = Vec::new();
    while !p.at_eof() {
        if p.eat(";") {
            continue;
        }
        match p.parse_item() {
            Ok(item) => items.push(item),
            Err(e) => {
                errors.push(e);
                p.recover_to_item();
            }
        }
    }
    if errors.is_empty() {
        Ok(Program { items })
    } else {
        Err(errors)
    }
}

/// Parses tokens that must form exactly one expression.
pub fn parse_expression(tokens: &[Token]) -> PResult<Expr> {
    let mut p = Parser::new(tokens);
    let e = p.parse_expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_pattern(tokens: &[Token]) -> PResult<Pattern> {
    let mut p = Parser::new(tokens);
    let pat = p.parse_pattern()?;
    p.expect_eof()?;
    Ok(pat)
}

/// Parses the inside of a block (statements and optional tail) with no
/// surrounding braces.
pub fn parse_block_contents(tokens: &[Token]) -> PResult<Block> {
    let mut p = Parser::new(tokens);
    let block = p.parse_block_body(None)?;
    p.expect_eof()?;
    Ok(block)
}

/// Parses a comma-separated expression list (trailing comma allowed).
pub fn parse_expression_list(tokens: &[Token]) -> PResult<Vec<Expr>> {
    let mut p = Parser::new(tokens);
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.parse_expr()?);
        if !p.eat(",") {
            break;
        }
    }
    p.expect_eof()?;
    Ok(out)
}

pub struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    /// The current token is `>>` and its first `>` was consumed.
    half_gt: bool,
    no_struct: bool,
}

fn is_item_start(t: &Token) -> bool {
    match t.kind {
        TokenKind::Keyword => matches!(t.text.as_str(), "fn" | "struct" | "enum" | "trait" | "impl" | "macro_rules"),
        TokenKind::Ident => matches!(t.text.as_str(), "type" | "use"),
        _ => false,
    }
}

impl<'t> Parser<'t> {
    pub fn new(toks: &'t [Token]) -> Self {
        Parser {
            toks,
            pos: 0,
            half_gt: false,
            no_struct: false,
        }
    }

    // ----- cursor helpers -------------------------------------------------

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + n)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn nth_is(&self, n: usize, text: &str) -> bool {
        self.peek_nth(n).is_some_and(|t| t.is(text))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.is_ident())
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.toks[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn prev_span(&self) -> SourceSpan {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.toks.get(i))
            .map(|t| t.span)
            .unwrap_or_default()
    }

    fn cur_span(&self) -> SourceSpan {
        match self.peek() {
            Some(t) => t.span,
            None => {
                let p = self.prev_span();
                SourceSpan {
                    start_line: p.end_line,
                    start_col: p.end_col,
                    lo: p.hi,
                    ..p
                }
            }
        }
    }

    fn prev_is(&self, text: &str) -> bool {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.toks.get(i))
            .is_some_and(|t| t.is(text))
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.cur_span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map(|t| format!("`{}`", t.text))
                .unwrap_or_else(|| "end of input".to_string()),
        })
    }

    fn expect(&mut self, text: &str) -> PResult<&'t Token> {
        if self.at(text) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("`{}`", text)])
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        if self.at_ident() {
            Ok(self.bump().text.clone())
        } else {
            self.error(&["identifier"])
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn eat_gt(&mut self) -> bool {
        if self.half_gt {
            self.half_gt = false;
            self.pos += 1;
            return true;
        }
        if self.eat(">") {
            return true;
        }
        if self.at(">>") {
            self.half_gt = true;
            return true;
        }
        false
    }

    fn at_gt(&self) -> bool {
        self.half_gt || self.at(">") || self.at(">>")
    }

    fn with_struct<T>(&mut self, allowed: bool, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = self.no_struct;
        self.no_struct = !allowed;
        let r = f(self);
        self.no_struct = saved;
        r
    }

    fn recover_to_item(&mut self) {
        let start = self.pos;
        let mut depth: i32 = 0;
        while let Some(t) = self.peek() {
            if self.pos > start && depth <= 0 && is_item_start(t) {
                break;
            }
            match t.text.as_str() {
                "(" | "[" | "{" if t.kind == TokenKind::Delimiter => depth += 1,
                ")" | "]" | "}" if t.kind == TokenKind::Delimiter => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        self.half_gt = false;
    }

    /// Tokens strictly inside the delimited group starting at the cursor;
    /// consumes the whole group.
    fn take_group(&mut self) -> PResult<(Delim, Vec<Token>)> {
        let Some(delim) = self.peek().filter(|t| t.kind == TokenKind::Delimiter).and_then(|t| Delim::from_open(&t.text))
        else {
            return self.error(&["`(`", "`[`", "`{`"]);
        };
        let open_span = self.bump().span;
        let start = self.pos;
        let mut depth = 1;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Delimiter {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    _ => {
                        depth -= 1;
                        if depth == 0 {
                            if t.text != delim.close() {
                                return self.error(&[&format!("`{}`", delim.close())]);
                            }
                            let inner = self.toks[start..self.pos].to_vec();
                            self.pos += 1;
                            return Ok((delim, inner));
                        }
                    }
                }
            }
            self.pos += 1;
        }
        Err(ParseError {
            span: open_span,
            expected: vec![format!("`{}`", delim.close())],
            found: "end of input".into(),
        })
    }

    // ----- items ----------------------------------------------------------

    pub fn parse_item(&mut self) -> PResult<Item> {
        let Some(t) = self.peek() else {
            return self.error(&["item"]);
        };
        match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "fn") => Ok(Item::Fn(self.parse_fn(false)?)),
            (TokenKind::Keyword, "struct") => self.parse_struct(),
            (TokenKind::Keyword, "enum") => self.parse_enum(),
            (TokenKind::Keyword, "trait") => self.parse_trait(),
            (TokenKind::Keyword, "impl") => self.parse_impl(),
            (TokenKind::Keyword, "macro_rules") => self.parse_macro_rules(),
            (TokenKind::Ident, "type") => self.parse_type_alias(),
            (TokenKind::Ident, "use") => self.parse_use(),
            _ => self.error(&["`fn`", "`struct`", "`enum`", "`trait`", "`impl`", "`macro_rules`", "`type`", "`use`"]),
        }
    }

    fn parse_type_params(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if !self.eat("<") {
            return Ok(out);
        }
        loop {
            if self.eat_gt() {
                break;
            }
            out.push(self.expect_ident()?);
            if self.eat(":") {
                // Bounds are parsed and discarded.
                self.parse_type()?;
                while self.eat("+") {
                    self.parse_type()?;
                }
            }
            if !self.eat(",") {
                if !self.eat_gt() {
                    return self.error(&["`,`", "`>`"]);
                }
                break;
            }
        }
        Ok(out)
    }

    fn parse_fn(&mut self, in_trait: bool) -> PResult<FnDef> {
        let start = self.expect("fn")?.span;
        let name = self.expect_ident()?;
        let type_params = self.parse_type_params()?;
        self.expect("(")?;
        let mut receiver = None;
        let mut params = Vec::new();
        if self.at("&") && (self.nth_is(1, "self") || (self.nth_is(1, "mut") && self.nth_is(2, "self"))) {
            self.bump();
            receiver = Some(if self.eat("mut") { Receiver::RefMut } else { Receiver::Ref });
            self.expect("self")?;
        } else if self.at("self") || (self.at("mut") && self.nth_is(1, "self")) {
            let mutable = self.eat("mut");
            self.expect("self")?;
            receiver = Some(Receiver::Value { mutable });
        }
        if receiver.is_some() && !self.at(")") {
            self.expect(",")?;
        }
        while !self.at(")") {
            let pstart = self.cur_span();
            let mutable = self.eat("mut");
            let pname = self.expect_ident()?;
            self.expect(":")?;
            let ty = self.parse_type()?;
            params.push(Param {
                name: pname,
                mutable,
                ty,
                span: pstart.to(self.prev_span()),
            });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        let ret = if self.eat("->") { Some(self.parse_type()?) } else { None };
        let body = if self.at("{") {
            Some(self.parse_block()?)
        } else if in_trait {
            self.eat(";");
            None
        } else {
            return self.error(&["`{`"]);
        };
        Ok(FnDef {
            name,
            type_params,
            receiver,
            params,
            ret,
            body,
            span: start.to(self.prev_span()),
        })
    }

    fn parse_struct(&mut self) -> PResult<Item> {
        let start = self.expect("struct")?.span;
        let name = self.expect_ident()?;
        let type_params = self.parse_type_params()?;
        let mut fields = Vec::new();
        if self.eat("{") {
            while !self.at("}") {
                let fname = self.expect_ident()?;
                self.expect(":")?;
                let ty = self.parse_type()?;
                fields.push(FieldDef { name: fname, ty });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("}")?;
        } else {
            self.expect(";")?;
        }
        Ok(Item::Struct(StructDef {
            name,
            type_params,
            fields,
            span: start.to(self.prev_span()),
        }))
    }

    fn parse_enum(&mut self) -> PResult<Item> {
        let start = self.expect("enum")?.span;
        let name = self.expect_ident()?;
        let type_params = self.parse_type_params()?;
        self.expect("{")?;
        let mut variants = Vec::new();
        while !self.at("}") {
            let vname = self.expect_ident()?;
            let mut payload = Vec::new();
            if self.eat("(") {
                while !self.at(")") {
                    payload.push(self.parse_type()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect(")")?;
            }
            variants.push(VariantDef { name: vname, payload });
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(Item::Enum(EnumDef {
            name,
            type_params,
            variants,
            span: start.to(self.prev_span()),
        }))
    }

    fn parse_trait(&mut self) -> PResult<Item> {
        let start = self.expect("trait")?.span;
        let name = self.expect_ident()?;
        let type_params = self.parse_type_params()?;
        self.expect("{")?;
        let mut methods = Vec::new();
        while !self.at("}") {
            methods.push(self.parse_fn(true)?);
        }
        self.expect("}")?;
        Ok(Item::Trait(TraitDef {
            name,
            type_params,
            methods,
            span: start.to(self.prev_span()),
        }))
    }

    fn parse_impl(&mut self) -> PResult<Item> {
        let start = self.expect("impl")?.span;
        let type_params = self.parse_type_params()?;
        let first = self.parse_type()?;
        let (trait_ref, target) = if self.eat("for") {
            (Some(first), self.parse_type()?)
        } else {
            (None, first)
        };
        self.expect("{")?;
        let mut methods = Vec::new();
        while !self.at("}") {
            methods.push(self.parse_fn(false)?);
        }
        self.expect("}")?;
        Ok(Item::Impl(ImplBlock {
            type_params,
            trait_ref,
            target,
            methods,
            span: start.to(self.prev_span()),
        }))
    }

    fn parse_macro_rules(&mut self) -> PResult<Item> {
        let start = self.expect("macro_rules")?.span;
        self.expect("!")?;
        let name = self.expect_ident()?;
        let (delim, body) = self.take_group()?;
        let span = start.to(self.prev_span());
        self.eat(";");
        Ok(Item::Macro(MacroItem { name, delim, body, span }))
    }

    fn parse_type_alias(&mut self) -> PResult<Item> {
        let start = self.bump().span;
        let name = self.expect_ident()?;
        let type_params = self.parse_type_params()?;
        self.expect("=")?;
        let target = self.parse_type()?;
        let span = start.to(self.prev_span());
        self.eat(";");
        Ok(Item::TypeAlias(TypeAlias {
            name,
            type_params,
            target,
            span,
        }))
    }

    fn parse_use(&mut self) -> PResult<Item> {
        let start = self.bump().span;
        let mut path = vec![self.expect_ident()?];
        while self.eat("::") {
            if self.eat("*") {
                path.push("*".into());
                break;
            }
            path.push(self.expect_ident()?);
        }
        let span = start.to(self.prev_span());
        self.eat(";");
        Ok(Item::Use(UseItem { path, span }))
    }

    // ----- types ----------------------------------------------------------

    pub fn parse_type(&mut self) -> PResult<TypeTerm> {
        if self.eat("&") {
            let mutable = self.eat("mut");
            return Ok(TypeTerm::Ref {
                mutable,
                inner: Box::new(self.parse_type()?),
            });
        }
        if self.eat("&&") {
            let mutable = self.eat("mut");
            let inner = TypeTerm::Ref {
                mutable,
                inner: Box::new(self.parse_type()?),
            };
            return Ok(TypeTerm::Ref {
                mutable: false,
                inner: Box::new(inner),
            });
        }
        if self.eat("(") {
            let mut elems = Vec::new();
            let mut trailing_comma = false;
            while !self.at(")") {
                elems.push(self.parse_type()?);
                trailing_comma = self.eat(",");
                if !trailing_comma {
                    break;
                }
            }
            self.expect(")")?;
            if elems.len() == 1 && !trailing_comma {
                return Ok(elems.pop().expect("one element"));
            }
            return Ok(TypeTerm::Tuple(elems));
        }
        if self.eat("[") {
            let inner = self.parse_type()?;
            if self.eat(",") {
                self.expect("..")?;
                self.parse_expr()?;
            } else if self.eat(";") {
                self.parse_expr()?;
            }
            self.expect("]")?;
            return Ok(TypeTerm::Slice(Box::new(inner)));
        }
        if self.at("|") || self.at("||") {
            let mut params = Vec::new();
            if !self.eat("||") {
                self.bump();
                while !self.at("|") {
                    params.push(self.parse_type()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("|")?;
            }
            let ret = if self.eat("->") { Some(Box::new(self.parse_type()?)) } else { None };
            return Ok(TypeTerm::Closure { params, ret });
        }
        if self.eat("fn") {
            self.expect("(")?;
            let mut params = Vec::new();
            while !self.at(")") {
                params.push(self.parse_type()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
            let ret = if self.eat("->") { Some(Box::new(self.parse_type()?)) } else { None };
            return Ok(TypeTerm::Closure { params, ret });
        }
        let mut segments = vec![self.expect_type_segment()?];
        while self.eat("::") {
            segments.push(self.expect_type_segment()?);
        }
        let mut args = Vec::new();
        if self.eat("<") {
            while !self.at_gt() {
                args.push(self.parse_type()?);
                if !self.eat(",") {
                    break;
                }
            }
            if !self.eat_gt() {
                return self.error(&["`>`"]);
            }
        }
        Ok(TypeTerm::Path { segments, args })
    }

    fn expect_type_segment(&mut self) -> PResult<String> {
        if self.at("self") {
            return Ok(self.bump().text.clone());
        }
        self.expect_ident()
    }

    // ----- blocks and statements -----------------------------------------

    pub fn parse_block(&mut self) -> PResult<Block> {
        let start = self.expect("{")?.span;
        let mut block = self.with_struct(true, |p| p.parse_block_body(Some("}")))?;
        self.expect("}")?;
        block.span = start.to(self.prev_span());
        Ok(block)
    }

    fn at_block_end(&self, end: Option<&str>) -> bool {
        match end {
            Some(close) => self.at(close) || self.at_eof(),
            None => self.at_eof(),
        }
    }

    fn parse_block_body(&mut self, end: Option<&str>) -> PResult<Block> {
        let start = self.cur_span();
        let mut stmts = Vec::new();
        let mut tail = None;
        while !self.at_block_end(end) {
            if self.eat(";") {
                continue;
            }
            let sstart = self.cur_span();
            if self.at("let") {
                self.bump();
                let pat = self.parse_pattern()?;
                let ty = if self.eat(":") { Some(self.parse_type()?) } else { None };
                let init = if self.eat("=") { Some(self.parse_expr()?) } else { None };
                if !self.eat(";") && !self.prev_is("}") {
                    return self.error(&["`;`"]);
                }
                stmts.push(Stmt {
                    kind: StmtKind::Let { pat, ty, init },
                    span: sstart.to(self.prev_span()),
                });
                continue;
            }
            let expr = if self.at_block_like_start() {
                let e = self.parse_block_like()?;
                if self.at(".") {
                    let e = self.parse_postfix_ops(e)?;
                    self.parse_infix(e, 0)?
                } else {
                    e
                }
            } else {
                self.parse_expr()?
            };
            if self.eat(";") {
                stmts.push(Stmt {
                    span: sstart.to(self.prev_span()),
                    kind: StmtKind::Expr { expr, semi: true },
                });
            } else if self.at_block_end(end) {
                tail = Some(Box::new(expr));
            } else if expr.is_block_like() || self.prev_is("}") {
                stmts.push(Stmt {
                    span: sstart.to(self.prev_span()),
                    kind: StmtKind::Expr { expr, semi: false },
                });
            } else {
                return self.error(&["`;`", "`}`"]);
            }
        }
        let span = if stmts.is_empty() && tail.is_none() { start } else { start.to(self.prev_span()) };
        Ok(Block { stmts, tail, span })
    }

    fn at_block_like_start(&self) -> bool {
        ["if", "match", "loop", "while", "for", "{"].iter().any(|t| self.at(t))
    }

    fn parse_block_like(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let kind = if self.at("{") {
            ExprKind::Block(self.parse_block()?)
        } else if self.eat("if") {
            return self.parse_if_rest(start);
        } else if self.eat("match") {
            let scrutinee = self.with_struct(false, |p| {
                let first = p.parse_expr()?;
                if !p.at(",") {
                    return Ok(first);
                }
                let mut elems = vec![first];
                while p.eat(",") {
                    elems.push(p.parse_expr()?);
                }
                let span = elems[0].span.to(p.prev_span());
                Ok(Expr::new(ExprKind::Tuple(elems), span))
            })?;
            self.expect("{")?;
            let arms = self.with_struct(true, |p| p.parse_arms())?;
            self.expect("}")?;
            ExprKind::Match {
                scrutinee: Box::new(scrutinee),
                arms,
            }
        } else if self.eat("loop") {
            ExprKind::Loop(self.parse_block()?)
        } else if self.eat("while") {
            let cond = self.with_struct(false, |p| p.parse_expr())?;
            let body = self.parse_block()?;
            ExprKind::While {
                cond: Box::new(cond),
                body,
            }
        } else if self.eat("for") {
            let pat = self.parse_pattern()?;
            self.expect("in")?;
            let iter = self.with_struct(false, |p| p.parse_expr())?;
            let body = self.parse_block()?;
            ExprKind::For {
                pat,
                iter: Box::new(iter),
                body,
            }
        } else {
            return self.error(&["block"]);
        };
        Ok(Expr::new(kind, start.to(self.prev_span())))
    }

    /// After `if`.
    fn parse_if_rest(&mut self, start: SourceSpan) -> PResult<Expr> {
        let cond = self.with_struct(false, |p| p.parse_expr())?;
        let then = self.parse_block()?;
        let els = if self.eat("else") {
            let estart = self.cur_span();
            if self.eat("if") {
                Some(Box::new(self.parse_if_rest(estart)?))
            } else {
                let b = self.parse_block()?;
                let span = b.span;
                Some(Box::new(Expr::new(ExprKind::Block(b), span)))
            }
        } else {
            None
        };
        Ok(Expr::new(
            ExprKind::If {
                cond: Box::new(cond),
                then,
                els,
            },
            start.to(self.prev_span()),
        ))
    }

    fn parse_arms(&mut self) -> PResult<Vec<Arm>> {
        let mut arms = Vec::new();
        while !self.at("}") && !self.at_eof() {
            let start = self.cur_span();
            let first = self.parse_pattern()?;
            let pat = if self.at(",") {
                let mut pats = vec![first];
                while self.eat(",") {
                    pats.push(self.parse_pattern()?);
                }
                let span = pats[0].span.to(self.prev_span());
                Pattern::new(PatKind::Tuple(pats), span)
            } else {
                first
            };
            let guard = if self.eat("if") { Some(self.parse_expr()?) } else { None };
            self.expect("=>")?;
            let body = self.parse_expr()?;
            let block_like = body.is_block_like();
            arms.push(Arm {
                pat,
                guard,
                body,
                span: start.to(self.prev_span()),
            });
            if !self.eat(",") && !block_like && !self.at("}") {
                return self.error(&["`,`", "`}`"]);
            }
        }
        Ok(arms)
    }

    // ----- expressions ----------------------------------------------------

    pub fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_expr_bp(0)
    }

    pub fn parse_expr_bp(&mut self, min_bp: u8) -> PResult<Expr> {
        let lhs = self.parse_unary()?;
        self.parse_infix(lhs, min_bp)
    }

    fn peek_assign_op(&self) -> Option<Option<BinOp>> {
        let t = self.peek()?;
        if t.kind != TokenKind::Punct {
            return None;
        }
        match t.text.as_str() {
            "=" => Some(None),
            "+=" => Some(Some(BinOp::Add)),
            "-=" => Some(Some(BinOp::Sub)),
            "*=" => Some(Some(BinOp::Mul)),
            "/=" => Some(Some(BinOp::Div)),
            "%=" => Some(Some(BinOp::Rem)),
            "&=" => Some(Some(BinOp::BitAnd)),
            "|=" => Some(Some(BinOp::BitOr)),
            "^=" => Some(Some(BinOp::BitXor)),
            "<<=" => Some(Some(BinOp::Shl)),
            ">>=" => Some(Some(BinOp::Shr)),
            _ => None,
        }
    }

    fn peek_binop(&self) -> Option<BinOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Punct {
            return None;
        }
        BinOp::from_symbol(&t.text)
    }

    fn parse_infix(&mut self, mut lhs: Expr, min_bp: u8) -> PResult<Expr> {
        loop {
            if let Some(assign) = self.peek_assign_op() {
                // Assignment: left bp 2, right-associative.
                if 2 < min_bp {
                    break;
                }
                self.bump();
                let rhs = self.parse_expr_bp(1)?;
                let span = lhs.span.to(rhs.span);
                let kind = match assign {
                    None => ExprKind::Assign {
                        place: Box::new(lhs),
                        value: Box::new(rhs),
                    },
                    Some(op) => ExprKind::CompoundAssign {
                        op,
                        place: Box::new(lhs),
                        value: Box::new(rhs),
                    },
                };
                lhs = Expr::new(kind, span);
                continue;
            }
            let Some(op) = self.peek_binop() else {
                break;
            };
            let (lbp, rbp) = op.binding_power();
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.parse_expr_bp(rbp)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
            if op.is_comparison() && self.peek_binop().is_some_and(BinOp::is_comparison) {
                return Err(ParseError {
                    span: self.cur_span(),
                    expected: vec!["parentheses around chained comparison".into()],
                    found: format!("`{}`", self.peek().map(|t| t.text.as_str()).unwrap_or("")),
                });
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let op = if self.eat("-") {
            Some(UnOp::Neg)
        } else if self.eat("!") {
            Some(UnOp::Not)
        } else if self.eat("*") {
            Some(UnOp::Deref)
        } else if self.eat("&") {
            Some(if self.eat("mut") { UnOp::RefMut } else { UnOp::Ref })
        } else if self.eat("&&") {
            let inner_op = if self.eat("mut") { UnOp::RefMut } else { UnOp::Ref };
            let operand = self.parse_unary()?;
            let span = start.to(operand.span);
            let inner = Expr::new(
                ExprKind::Unary {
                    op: inner_op,
                    operand: Box::new(operand),
                },
                span,
            );
            return Ok(Expr::new(
                ExprKind::Unary {
                    op: UnOp::Ref,
                    operand: Box::new(inner),
                },
                span,
            ));
        } else {
            None
        };
        if let Some(op) = op {
            let operand = self.parse_unary()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(
                ExprKind::Unary {
                    op,
                    operand: Box::new(operand),
                },
                span,
            ));
        }
        if self.eat("box") {
            let allocator = if self.at("(")
                && self.peek_nth(1).is_some_and(Token::is_ident)
                && self.nth_is(2, ")")
                && self.peek_nth(3).is_some_and(starts_unambiguous_expr)
            {
                self.bump();
                let name = self.bump().text.clone();
                self.bump();
                Some(name)
            } else {
                None
            };
            let operand = self.parse_unary()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(
                ExprKind::Box {
                    allocator,
                    operand: Box::new(operand),
                },
                span,
            ));
        }
        let primary = self.parse_primary()?;
        self.parse_postfix_ops(primary)
    }

    fn parse_postfix_ops(&mut self, mut e: Expr) -> PResult<Expr> {
        loop {
            if self.at("(") {
                let args = self.parse_call_args()?;
                let span = e.span.to(self.prev_span());
                e = Expr::new(
                    ExprKind::Call {
                        callee: Box::new(e),
                        args,
                    },
                    span,
                );
            } else if self.at(".") {
                self.bump();
                let Some(t) = self.peek() else {
                    return self.error(&["field or method name"]);
                };
                match t.kind {
                    TokenKind::Ident => {
                        let name = self.bump().text.clone();
                        if self.at("(") {
                            let args = self.parse_call_args()?;
                            let span = e.span.to(self.prev_span());
                            e = Expr::new(
                                ExprKind::MethodCall {
                                    receiver: Box::new(e),
                                    method: name,
                                    args,
                                },
                                span,
                            );
                        } else {
                            let span = e.span.to(self.prev_span());
                            e = Expr::new(ExprKind::Field { base: Box::new(e), name }, span);
                        }
                    }
                    TokenKind::IntLit => {
                        let name = self.bump().text.clone();
                        let span = e.span.to(self.prev_span());
                        e = Expr::new(ExprKind::Field { base: Box::new(e), name }, span);
                    }
                    // `t.0.1` lexes the indices as one float literal.
                    TokenKind::FloatLit if t.text.bytes().all(|b| b.is_ascii_digit() || b == b'.') => {
                        let text = self.bump().text.clone();
                        for part in text.split('.') {
                            let span = e.span.to(self.prev_span());
                            e = Expr::new(
                                ExprKind::Field {
                                    base: Box::new(e),
                                    name: part.to_string(),
                                },
                                span,
                            );
                        }
                    }
                    _ => return self.error(&["field or method name"]),
                }
            } else if self.at("[") {
                self.bump();
                let index = self.with_struct(true, |p| p.parse_expr())?;
                self.expect("]")?;
                let span = e.span.to(self.prev_span());
                e = Expr::new(
                    ExprKind::Index {
                        base: Box::new(e),
                        index: Box::new(index),
                    },
                    span,
                );
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn parse_call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let args = self.with_struct(true, |p| {
            let mut args = Vec::new();
            while !p.at(")") {
                args.push(p.parse_expr()?);
                if !p.eat(",") {
                    break;
                }
            }
            Ok(args)
        })?;
        self.expect(")")?;
        Ok(args)
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let Some(t) = self.peek() else {
            return self.error(&["expression"]);
        };
        if let Some(lit) = token_lit(t) {
            self.bump();
            return Ok(Expr::new(ExprKind::Lit(lit), start));
        }
        if self.at_block_like_start() {
            return self.parse_block_like();
        }
        match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "true") | (TokenKind::Keyword, "false") => {
                self.bump();
                Ok(Expr::new(ExprKind::Lit(Lit::Bool(t.text == "true")), start))
            }
            (TokenKind::Keyword, "self") => {
                self.bump();
                Ok(Expr::new(ExprKind::Path(Path::single("self")), start))
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let value = if self.starts_expr() { Some(Box::new(self.parse_expr()?)) } else { None };
                Ok(Expr::new(ExprKind::Return(value), start.to(self.prev_span())))
            }
            (TokenKind::Keyword, "break") => {
                self.bump();
                Ok(Expr::new(ExprKind::Break, start))
            }
            (TokenKind::Ident, "continue") => {
                self.bump();
                Ok(Expr::new(ExprKind::Continue, start))
            }
            (TokenKind::Ident, _) => self.parse_path_expr(),
            (TokenKind::Delimiter, "(") => {
                self.bump();
                let (elems, trailing) = self.with_struct(true, |p| {
                    let mut elems = Vec::new();
                    let mut trailing = false;
                    while !p.at(")") {
                        elems.push(p.parse_expr()?);
                        trailing = p.eat(",");
                        if !trailing {
                            break;
                        }
                    }
                    Ok((elems, trailing))
                })?;
                self.expect(")")?;
                let span = start.to(self.prev_span());
                if elems.is_empty() {
                    Ok(Expr::new(ExprKind::Lit(Lit::Unit), span))
                } else if elems.len() == 1 && !trailing {
                    Ok(elems.into_iter().next().expect("one element"))
                } else {
                    Ok(Expr::new(ExprKind::Tuple(elems), span))
                }
            }
            (TokenKind::Delimiter, "[") => {
                self.bump();
                let kind = self.with_struct(true, |p| {
                    if p.at("]") {
                        return Ok(ExprKind::Array(Vec::new()));
                    }
                    let first = p.parse_expr()?;
                    if p.at(",") && p.nth_is(1, "..") {
                        p.bump();
                        p.bump();
                        let count = p.parse_expr()?;
                        return Ok(ExprKind::ArrayRepeat {
                            value: Box::new(first),
                            count: Box::new(count),
                        });
                    }
                    if p.eat(";") {
                        let count = p.parse_expr()?;
                        return Ok(ExprKind::ArrayRepeat {
                            value: Box::new(first),
                            count: Box::new(count),
                        });
                    }
                    let mut elems = vec![first];
                    while p.eat(",") {
                        if p.at("]") {
                            break;
                        }
                        elems.push(p.parse_expr()?);
                    }
                    Ok(ExprKind::Array(elems))
                })?;
                self.expect("]")?;
                Ok(Expr::new(kind, start.to(self.prev_span())))
            }
            (TokenKind::Punct, "|") | (TokenKind::Punct, "||") => self.parse_lambda(),
            _ => self.error(&["expression"]),
        }
    }

    fn starts_expr(&self) -> bool {
        match self.peek() {
            None => false,
            Some(t) => {
                !(t.is(";") || t.is("}") || t.is(")") || t.is("]") || t.is(",") || t.is("=>"))
            }
        }
    }

    fn parse_lambda(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let mut params = Vec::new();
        if !self.eat("||") {
            self.expect("|")?;
            while !self.at("|") {
                let pstart = self.cur_span();
                let name = self.expect_ident()?;
                let ty = if self.eat(":") { Some(self.parse_type()?) } else { None };
                params.push(LambdaParam {
                    name,
                    ty,
                    span: pstart.to(self.prev_span()),
                });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("|")?;
        }
        let body = self.parse_expr()?;
        let span = start.to(body.span);
        Ok(Expr::new(
            ExprKind::Lambda {
                params,
                body: Box::new(body),
            },
            span,
        ))
    }

    fn parse_path_expr(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let mut segments = vec![self.expect_ident()?];
        while self.at("::") && self.peek_nth(1).is_some_and(Token::is_ident) {
            self.bump();
            segments.push(self.bump().text.clone());
        }
        let path = Path { segments };
        if self.at("!") && path.segments.len() == 1 && self.peek_nth(1).is_some_and(|t| Delim::from_open(&t.text).is_some() && t.kind == TokenKind::Delimiter) {
            self.bump();
            let (delim, tokens) = self.take_group()?;
            return Ok(Expr::new(
                ExprKind::MacroCall {
                    name: path.segments.into_iter().next().expect("one segment"),
                    delim,
                    tokens,
                },
                start.to(self.prev_span()),
            ));
        }
        if self.at("{") && !self.no_struct && self.looks_like_record(&path) {
            return self.parse_record(path, start);
        }
        Ok(Expr::new(ExprKind::Path(path), start.to(self.prev_span())))
    }

    fn looks_like_record(&self, path: &Path) -> bool {
        let upper = path.last().starts_with(|c: char| c.is_uppercase());
        match (self.peek_nth(1), self.peek_nth(2)) {
            (Some(a), _) if a.is("..") => true,
            (Some(a), _) if a.is("}") => upper,
            (Some(a), Some(b)) if a.is_ident() && b.is(":") => true,
            (Some(a), Some(b)) if a.is_ident() && (b.is(",") || b.is("}")) => upper,
            _ => false,
        }
    }

    fn parse_record(&mut self, path: Path, start: SourceSpan) -> PResult<Expr> {
        self.expect("{")?;
        let (fields, base) = self.with_struct(true, |p| {
            let mut fields = Vec::new();
            let mut base = None;
            while !p.at("}") {
                if p.eat("..") {
                    base = Some(Box::new(p.parse_expr()?));
                    break;
                }
                let fstart = p.cur_span();
                let name = p.expect_ident()?;
                let value = if p.eat(":") {
                    p.parse_expr()?
                } else {
                    Expr::new(ExprKind::Path(Path::single(name.clone())), fstart)
                };
                fields.push(FieldInit {
                    name,
                    value,
                    span: fstart.to(p.prev_span()),
                });
                if !p.eat(",") {
                    break;
                }
            }
            Ok((fields, base))
        })?;
        self.expect("}")?;
        Ok(Expr::new(ExprKind::Record { path, fields, base }, start.to(self.prev_span())))
    }

    // ----- patterns -------------------------------------------------------

    pub fn parse_pattern(&mut self) -> PResult<Pattern> {
        let first = self.parse_pattern_no_or()?;
        if !self.at("|") {
            return Ok(first);
        }
        let mut alts = vec![first];
        while self.eat("|") {
            alts.push(self.parse_pattern_no_or()?);
        }
        let span = alts[0].span.to(self.prev_span());
        Ok(Pattern::new(PatKind::Or(alts), span))
    }

    fn parse_pattern_no_or(&mut self) -> PResult<Pattern> {
        let start = self.cur_span();
        let Some(t) = self.peek() else {
            return self.error(&["pattern"]);
        };
        let kind = if t.is_ident() && t.text == "_" {
            self.bump();
            PatKind::Wild
        } else if self.eat("&") {
            let mutable = self.eat("mut");
            PatKind::Ref {
                mutable,
                sub: Box::new(self.parse_pattern_no_or()?),
            }
        } else if self.eat("&&") {
            let inner = self.parse_pattern_no_or()?;
            let span = start.to(inner.span);
            PatKind::Ref {
                mutable: false,
                sub: Box::new(Pattern::new(
                    PatKind::Ref {
                        mutable: false,
                        sub: Box::new(inner),
                    },
                    span,
                )),
            }
        } else if self.eat("(") {
            let mut elems = Vec::new();
            let mut trailing = false;
            while !self.at(")") {
                elems.push(self.parse_pattern()?);
                trailing = self.eat(",");
                if !trailing {
                    break;
                }
            }
            self.expect(")")?;
            if elems.is_empty() {
                PatKind::Lit {
                    lit: Lit::Unit,
                    negative: false,
                }
            } else if elems.len() == 1 && !trailing {
                return Ok(elems.pop().expect("one element"));
            } else {
                PatKind::Tuple(elems)
            }
        } else if self.at("-") && self.peek_nth(1).is_some_and(|t| matches!(t.kind, TokenKind::IntLit | TokenKind::FloatLit)) {
            self.bump();
            let lit = token_lit(self.bump()).expect("numeric literal");
            PatKind::Lit { lit, negative: true }
        } else if let Some(lit) = token_lit(t) {
            self.bump();
            PatKind::Lit { lit, negative: false }
        } else if self.at("true") || self.at("false") {
            let v = self.bump().text == "true";
            PatKind::Lit {
                lit: Lit::Bool(v),
                negative: false,
            }
        } else if self.eat("ref") {
            let mutable = self.eat("mut");
            PatKind::Binding {
                name: self.expect_ident()?,
                mutable,
                by_ref: true,
            }
        } else if self.eat("mut") {
            PatKind::Binding {
                name: self.expect_ident()?,
                mutable: true,
                by_ref: false,
            }
        } else if t.is_ident() {
            let mut segments = vec![self.bump().text.clone()];
            while self.at("::") && self.peek_nth(1).is_some_and(Token::is_ident) {
                self.bump();
                segments.push(self.bump().text.clone());
            }
            let path = Path { segments };
            if self.at("@") && path.segments.len() == 1 {
                self.bump();
                let sub = self.parse_pattern_no_or()?;
                PatKind::At {
                    name: path.segments.into_iter().next().expect("one segment"),
                    sub: Box::new(sub),
                }
            } else if self.eat("(") {
                let mut subpats = Vec::new();
                while !self.at(")") {
                    subpats.push(self.parse_pattern()?);
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect(")")?;
                PatKind::Variant { path, subpats }
            } else if self.at("{") {
                self.bump();
                let mut fields = Vec::new();
                let mut rest = false;
                while !self.at("}") {
                    if self.eat("..") {
                        rest = true;
                        break;
                    }
                    let fstart = self.cur_span();
                    let by_ref = self.eat("ref");
                    let mutable = self.eat("mut");
                    let name = self.expect_ident()?;
                    let pat = if !by_ref && !mutable && self.eat(":") {
                        self.parse_pattern()?
                    } else {
                        Pattern::new(
                            PatKind::Binding {
                                name: name.clone(),
                                mutable,
                                by_ref,
                            },
                            fstart.to(self.prev_span()),
                        )
                    };
                    fields.push((name, pat));
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                PatKind::Record { path, fields, rest }
            } else if path.segments.len() > 1 {
                PatKind::Variant {
                    path,
                    subpats: Vec::new(),
                }
            } else {
                PatKind::Binding {
                    name: path.segments.into_iter().next().expect("one segment"),
                    mutable: false,
                    by_ref: false,
                }
            }
        } else {
            return self.error(&["pattern"]);
        };
        Ok(Pattern::new(kind, start.to(self.prev_span())))
    }
}

/// Token after `box (NAME)` that can only begin an operand, so the
/// parenthesized name is an allocator rather than the boxed value.
fn starts_unambiguous_expr(t: &Token) -> bool {
    match t.kind {
        TokenKind::Ident => true,
        TokenKind::Keyword => matches!(
            t.text.as_str(),
            "self" | "true" | "false" | "box" | "if" | "match" | "loop" | "while" | "for"
        ),
        TokenKind::Delimiter => t.text == "(" || t.text == "[",
        TokenKind::Punct => t.text == "!",
        _ => t.is_literal(),
    }
}

fn token_lit(t: &Token) -> Option<Lit> {
    Some(match &t.payload {
        Payload::Int { value, suffix } => Lit::Int {
            value: value.clone(),
            suffix: *suffix,
        },
        Payload::Float { value, suffix } => Lit::Float {
            value: *value,
            suffix: *suffix,
        },
        Payload::Char(c) => Lit::Char(*c),
        Payload::Byte(b) => Lit::Byte(*b),
        Payload::Str(s) => Lit::Str(s.clone()),
        Payload::ByteStr(b) => Lit::ByteStr(b.clone()),
        Payload::None => return None,
    })
}
