//! Rewrites operators into trait-method calls and `for` loops into the
//! `loop`/`next()` form.

use std::collections::HashSet;

use crate::span::SourceSpan;
use crate::syntax::visit::{walk_expr, walk_program, MutVisitor};
use crate::syntax::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Unary,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorEntry {
    pub symbol: &'static str,
    pub arity: Arity,
    pub method: &'static str,
    pub trait_name: &'static str,
}

const fn entry(symbol: &'static str, arity: Arity, method: &'static str, trait_name: &'static str) -> OperatorEntry {
    OperatorEntry {
        symbol,
        arity,
        method,
        trait_name,
    }
}

/// Operators that are sugar for trait methods.
pub const OPERATOR_TABLE: [OperatorEntry; 19] = [
    entry("==", Arity::Binary, "eq", "PartialEq"),
    entry("!=", Arity::Binary, "ne", "PartialEq"),
    entry("<", Arity::Binary, "lt", "PartialOrd"),
    entry(">", Arity::Binary, "gt", "PartialOrd"),
    entry("<=", Arity::Binary, "le", "PartialOrd"),
    entry(">=", Arity::Binary, "ge", "PartialOrd"),
    entry("+", Arity::Binary, "add", "Add"),
    entry("-", Arity::Binary, "sub", "Sub"),
    entry("*", Arity::Binary, "mul", "Mul"),
    entry("/", Arity::Binary, "div", "Div"),
    entry("%", Arity::Binary, "rem", "Rem"),
    entry("-", Arity::Unary, "neg", "Neg"),
    entry("!", Arity::Unary, "not", "Not"),
    entry("*", Arity::Unary, "deref", "Deref"),
    entry("&", Arity::Binary, "bitand", "BitAnd"),
    entry("|", Arity::Binary, "bitor", "BitOr"),
    entry("^", Arity::Binary, "bitxor", "BitXor"),
    entry("<<", Arity::Binary, "shl", "Shl"),
    entry(">>", Arity::Binary, "shr", "Shr"),
];

pub fn lookup(symbol: &str, arity: Arity) -> Option<&'static OperatorEntry> {
    OPERATOR_TABLE.iter().find(|e| e.symbol == symbol && e.arity == arity)
}

pub fn binary_method(op: BinOp) -> Option<&'static str> {
    lookup(op.symbol(), Arity::Binary).map(|e| e.method)
}

pub fn unary_method(op: UnOp) -> Option<&'static str> {
    lookup(op.symbol(), Arity::Unary).map(|e| e.method)
}

pub fn desugar_program(p: &Program) -> Program {
    let mut out = p.clone();
    walk_program(&mut ForRewriter, &mut out);
    walk_program(&mut OpRewriter, &mut out);
    out
}

pub fn desugar_operators(e: &Expr) -> Expr {
    let mut out = e.clone();
    OpRewriter.visit_expr(&mut out);
    out
}

pub fn desugar_for(e: &Expr) -> Expr {
    let mut out = e.clone();
    ForRewriter.visit_expr(&mut out);
    out
}

struct OpRewriter;

impl OpRewriter {
    /// Place expressions keep their deref/field/index structure.
    fn place(&mut self, e: &mut Expr) {
        match &mut e.kind {
            ExprKind::Unary { op: UnOp::Deref, operand } => self.place(operand),
            ExprKind::Field { base, .. } => self.place(base),
            ExprKind::Index { base, index } => {
                self.place(base);
                self.visit_expr(index);
            }
            _ => self.visit_expr(e),
        }
    }
}

impl MutVisitor for OpRewriter {
    fn visit_expr(&mut self, e: &mut Expr) {
        match &mut e.kind {
            ExprKind::Unary {
                op: UnOp::Ref | UnOp::RefMut,
                operand,
            } => {
                self.place(operand);
                return;
            }
            ExprKind::Assign { place, value } | ExprKind::CompoundAssign { place, value, .. } => {
                self.place(place);
                self.visit_expr(value);
                return;
            }
            _ => {}
        }
        walk_expr(self, e);
        let dummy = || Box::new(Expr::new(ExprKind::Lit(Lit::Unit), SourceSpan::default()));
        match &mut e.kind {
            ExprKind::Binary { op, lhs, rhs } => {
                if let Some(m) = binary_method(*op) {
                    let receiver = std::mem::replace(lhs, dummy());
                    let arg = std::mem::replace(rhs, dummy());
                    e.kind = ExprKind::MethodCall {
                        receiver,
                        method: m.to_string(),
                        args: vec![*arg],
                    };
                }
            }
            ExprKind::Unary { op, operand } => {
                if let Some(m) = unary_method(*op) {
                    let receiver = std::mem::replace(operand, dummy());
                    e.kind = ExprKind::MethodCall {
                        receiver,
                        method: m.to_string(),
                        args: Vec::new(),
                    };
                }
            }
            _ => {}
        }
    }
}

struct ForRewriter;

impl MutVisitor for ForRewriter {
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr(self, e);
        let ExprKind::For { pat, iter, body } = &mut e.kind else {
            return;
        };
        let span = e.span;
        let pat = std::mem::replace(pat, Pattern::new(PatKind::Wild, span));
        let iter = std::mem::replace(iter, Box::new(Expr::new(ExprKind::Lit(Lit::Unit), span)));
        let body = std::mem::replace(body, Block::empty(span));
        e.kind = expand_for(pat, *iter, body, span);
    }
}

/// `match &mut ITER { V => loop { match V.next() { None => break, Some(PAT) => { BODY } } } }`
fn expand_for(pat: Pattern, iter: Expr, body: Block, span: SourceSpan) -> ExprKind {
    let mut used = HashSet::new();
    collect_pattern_names(&pat, &mut used);
    collect_expr_names(&iter, &mut used);
    collect_block_names(&body, &mut used);
    let var = fresh_name(&used);

    let ex = |kind| Expr::new(kind, span);
    let pt = |kind| Pattern::new(kind, span);
    let binding = |name: &str| PatKind::Binding {
        name: name.to_string(),
        mutable: false,
        by_ref: false,
    };
    let next_call = ex(ExprKind::MethodCall {
        receiver: Box::new(ex(ExprKind::Path(Path::single(var.clone())))),
        method: "next".into(),
        args: Vec::new(),
    });
    let inner = ex(ExprKind::Match {
        scrutinee: Box::new(next_call),
        arms: vec![
            Arm {
                pat: pt(binding("None")),
                guard: None,
                body: ex(ExprKind::Break),
                span,
            },
            Arm {
                pat: pt(PatKind::Variant {
                    path: Path::single("Some"),
                    subpats: vec![pat],
                }),
                guard: None,
                body: ex(ExprKind::Block(body)),
                span,
            },
        ],
    });
    let lp = ex(ExprKind::Loop(Block {
        stmts: Vec::new(),
        tail: Some(Box::new(inner)),
        span,
    }));
    ExprKind::Match {
        scrutinee: Box::new(ex(ExprKind::Unary {
            op: UnOp::RefMut,
            operand: Box::new(iter),
        })),
        arms: vec![Arm {
            pat: pt(binding(&var)),
            guard: None,
            body: lp,
            span,
        }],
    }
}

/// `_v`, then `_v1`, `_v2`, ... until unused.
pub fn fresh_name(used: &HashSet<String>) -> String {
    if !used.contains("_v") {
        return "_v".to_string();
    }
    (1..)
        .map(|i| format!("_v{}", i))
        .find(|n| !used.contains(n))
        .expect("unbounded search")
}

fn collect_pattern_names(p: &Pattern, out: &mut HashSet<String>) {
    match &p.kind {
        PatKind::Wild | PatKind::Lit { .. } => {}
        PatKind::Binding { name, .. } => {
            out.insert(name.clone());
        }
        PatKind::At { name, sub } => {
            out.insert(name.clone());
            collect_pattern_names(sub, out);
        }
        PatKind::Tuple(xs) | PatKind::Or(xs) => xs.iter().for_each(|x| collect_pattern_names(x, out)),
        PatKind::Variant { path, subpats } => {
            out.extend(path.segments.iter().cloned());
            subpats.iter().for_each(|x| collect_pattern_names(x, out));
        }
        PatKind::Record { path, fields, .. } => {
            out.extend(path.segments.iter().cloned());
            for (n, fp) in fields {
                out.insert(n.clone());
                collect_pattern_names(fp, out);
            }
        }
        PatKind::Ref { sub, .. } => collect_pattern_names(sub, out),
    }
}

fn collect_block_names(b: &Block, out: &mut HashSet<String>) {
    for s in &b.stmts {
        match &s.kind {
            StmtKind::Let { pat, init, .. } => {
                collect_pattern_names(pat, out);
                if let Some(i) = init {
                    collect_expr_names(i, out);
                }
            }
            StmtKind::Expr { expr, .. } => collect_expr_names(expr, out),
        }
    }
    if let Some(t) = &b.tail {
        collect_expr_names(t, out);
    }
}

/// Every identifier that appears anywhere in `e`.
fn collect_expr_names(e: &Expr, out: &mut HashSet<String>) {
    crate::syntax::pretty::visit_exprs(e, &mut |x| match &x.kind {
        ExprKind::Path(p) | ExprKind::Record { path: p, .. } => out.extend(p.segments.iter().cloned()),
        ExprKind::Field { name, .. } | ExprKind::MethodCall { method: name, .. } => {
            out.insert(name.clone());
        }
        ExprKind::Lambda { params, .. } => out.extend(params.iter().map(|p| p.name.clone())),
        ExprKind::Match { arms, .. } => arms.iter().for_each(|a| collect_pattern_names(&a.pat, out)),
        ExprKind::Block(b)
        | ExprKind::Loop(b)
        | ExprKind::While { body: b, .. }
        | ExprKind::If { then: b, .. }
        | ExprKind::For { body: b, .. } => {
            if let ExprKind::For { pat, .. } = &x.kind {
                collect_pattern_names(pat, out);
            }
            for s in &b.stmts {
                if let StmtKind::Let { pat, .. } = &s.kind {
                    collect_pattern_names(pat, out);
                }
            }
        }
        ExprKind::MacroCall { tokens, .. } => {
            out.extend(tokens.iter().filter(|t| t.is_ident()).map(|t| t.text.clone()));
        }
        _ => {}
    });
}
