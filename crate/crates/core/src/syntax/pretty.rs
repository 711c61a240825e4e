//! Source printer. Output re-parses to a structurally equal tree.

use super::ast::*;
use crate::lexer::{escape_bytes, escape_char, escape_str};
use crate::lexer::Token;

const INDENT: &str = "    ";

// Precedence levels used to decide where parentheses are needed.
const PREC_LOWEST: u8 = 1;
const PREC_UNARY: u8 = 30;
const PREC_POSTFIX: u8 = 40;
const PREC_PRIMARY: u8 = 50;

pub fn print_program(p: &Program) -> String {
    let mut pr = Printer::default();
    for (i, item) in p.items.iter().enumerate() {
        if i > 0 {
            pr.out.push('\n');
        }
        pr.item(item);
    }
    pr.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut pr = Printer::default();
    pr.expr(e, 0);
    pr.out
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut pr = Printer::default();
    pr.pattern(p);
    pr.out
}

pub fn print_type(t: &TypeTerm) -> String {
    let mut pr = Printer::default();
    pr.ty(t);
    pr.out
}

pub fn print_block(b: &Block) -> String {
    let mut pr = Printer::default();
    pr.block(b);
    pr.out
}

pub fn print_lit(lit: &Lit) -> String {
    match lit {
        Lit::Int { value, suffix } => format!("{}{}", value, suffix.as_str()),
        Lit::Float { value, suffix } => format!("{:?}{}", value, suffix.as_str()),
        Lit::Bool(b) => b.to_string(),
        Lit::Char(c) => format!("'{}'", escape_char(*c)),
        Lit::Byte(b'\'') => "b'\\''".to_string(),
        Lit::Byte(b) => format!("b'{}'", escape_bytes(&[*b])),
        Lit::Str(s) => format!("\"{}\"", escape_str(s, '"')),
        Lit::ByteStr(b) => format!("b\"{}\"", escape_bytes(b)),
        Lit::Unit => "()".to_string(),
    }
}

pub fn join_tokens(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Assign { .. }
        | ExprKind::CompoundAssign { .. }
        | ExprKind::Lambda { .. }
        | ExprKind::Return(_) => PREC_LOWEST,
        ExprKind::Binary { op, .. } => op.binding_power().0,
        ExprKind::Unary { .. } | ExprKind::Box { .. } => PREC_UNARY,
        ExprKind::Call { .. } | ExprKind::MethodCall { .. } | ExprKind::Field { .. } | ExprKind::Index { .. } => {
            PREC_POSTFIX
        }
        _ => PREC_PRIMARY,
    }
}

/// Whether the expression, printed at statement start, would begin with a
/// block-like form that the parser would end early.
fn starts_with_block_like(e: &Expr) -> bool {
    let mut cur = e;
    loop {
        if cur.is_block_like() {
            return !std::ptr::eq(cur, e);
        }
        cur = match &cur.kind {
            ExprKind::Binary { lhs, .. } => lhs,
            ExprKind::Assign { place, .. } | ExprKind::CompoundAssign { place, .. } => place,
            ExprKind::Field { base, .. } | ExprKind::Index { base, .. } => base,
            ExprKind::MethodCall { receiver, .. } => receiver,
            ExprKind::Call { callee, .. } => callee,
            _ => return false,
        };
    }
}

fn contains_record(e: &Expr) -> bool {
    let mut found = false;
    visit_exprs(e, &mut |x| {
        if matches!(x.kind, ExprKind::Record { .. }) {
            found = true;
        }
    });
    found
}

/// Calls `f` on `e` and every expression nested inside it.
pub fn visit_exprs(e: &Expr, f: &mut dyn FnMut(&Expr)) {
    f(e);
    let block = |b: &Block, f: &mut dyn FnMut(&Expr)| {
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Let { init, .. } => {
                    if let Some(i) = init {
                        visit_exprs(i, f);
                    }
                }
                StmtKind::Expr { expr, .. } => visit_exprs(expr, f),
            }
        }
        if let Some(t) = &b.tail {
            visit_exprs(t, f);
        }
    };
    match &e.kind {
        ExprKind::Lit(_) | ExprKind::Path(_) | ExprKind::Break | ExprKind::Continue | ExprKind::MacroCall { .. } => {}
        ExprKind::Record { fields, base, .. } => {
            for fi in fields {
                visit_exprs(&fi.value, f);
            }
            if let Some(b) = base {
                visit_exprs(b, f);
            }
        }
        ExprKind::Tuple(xs) | ExprKind::Array(xs) | ExprKind::Builtin { args: xs, .. } => {
            for x in xs {
                visit_exprs(x, f);
            }
        }
        ExprKind::Field { base, .. } => visit_exprs(base, f),
        ExprKind::ArrayRepeat { value, count } => {
            visit_exprs(value, f);
            visit_exprs(count, f);
        }
        ExprKind::Index { base, index } => {
            visit_exprs(base, f);
            visit_exprs(index, f);
        }
        ExprKind::Block(b) | ExprKind::Loop(b) => block(b, f),
        ExprKind::If { cond, then, els } => {
            visit_exprs(cond, f);
            block(then, f);
            if let Some(e) = els {
                visit_exprs(e, f);
            }
        }
        ExprKind::Match { scrutinee, arms } => {
            visit_exprs(scrutinee, f);
            for a in arms {
                if let Some(g) = &a.guard {
                    visit_exprs(g, f);
                }
                visit_exprs(&a.body, f);
            }
        }
        ExprKind::Call { callee, args } => {
            visit_exprs(callee, f);
            for a in args {
                visit_exprs(a, f);
            }
        }
        ExprKind::MethodCall { receiver, args, .. } => {
            visit_exprs(receiver, f);
            for a in args {
                visit_exprs(a, f);
            }
        }
        ExprKind::Lambda { body, .. } => visit_exprs(body, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            visit_exprs(lhs, f);
            visit_exprs(rhs, f);
        }
        ExprKind::Unary { operand, .. } | ExprKind::Box { operand, .. } => visit_exprs(operand, f),
        ExprKind::Assign { place, value } | ExprKind::CompoundAssign { place, value, .. } => {
            visit_exprs(place, f);
            visit_exprs(value, f);
        }
        ExprKind::For { iter, body, .. } => {
            visit_exprs(iter, f);
            block(body, f);
        }
        ExprKind::While { cond, body } => {
            visit_exprs(cond, f);
            block(body, f);
        }
        ExprKind::Return(v) => {
            if let Some(v) = v {
                visit_exprs(v, f);
            }
        }
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn w(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn newline(&mut self) {
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push_str(INDENT);
        }
    }

    fn comma_list<T>(&mut self, xs: &[T], mut f: impl FnMut(&mut Self, &T)) {
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            f(self, x);
        }
    }

    fn type_params(&mut self, ps: &[String]) {
        if !ps.is_empty() {
            self.w("<");
            self.w(&ps.join(", "));
            self.w(">");
        }
    }

    // ----- items ----------------------------------------------------------

    fn item(&mut self, item: &Item) {
        match item {
            Item::Fn(f) => self.fn_def(f),
            Item::Struct(s) => {
                self.w("struct ");
                self.w(&s.name);
                self.type_params(&s.type_params);
                if s.fields.is_empty() {
                    self.w(" {}");
                } else {
                    self.w(" {");
                    self.indent += 1;
                    for fd in &s.fields {
                        self.newline();
                        self.w(&fd.name);
                        self.w(": ");
                        self.ty(&fd.ty);
                        self.w(",");
                    }
                    self.indent -= 1;
                    self.newline();
                    self.w("}");
                }
            }
            Item::Enum(e) => {
                self.w("enum ");
                self.w(&e.name);
                self.type_params(&e.type_params);
                self.w(" {");
                self.indent += 1;
                for v in &e.variants {
                    self.newline();
                    self.w(&v.name);
                    if !v.payload.is_empty() {
                        self.w("(");
                        self.comma_list(&v.payload, |p, t| p.ty(t));
                        self.w(")");
                    }
                    self.w(",");
                }
                self.indent -= 1;
                self.newline();
                self.w("}");
            }
            Item::Trait(t) => {
                self.w("trait ");
                self.w(&t.name);
                self.type_params(&t.type_params);
                self.methods(&t.methods);
            }
            Item::Impl(i) => {
                self.w("impl");
                self.type_params(&i.type_params);
                self.w(" ");
                if let Some(tr) = &i.trait_ref {
                    self.ty(tr);
                    self.w(" for ");
                }
                self.ty(&i.target);
                self.methods(&i.methods);
            }
            Item::Macro(m) => {
                self.w("macro_rules! ");
                self.w(&m.name);
                self.w(" ");
                self.w(m.delim.open());
                self.w(&join_tokens(&m.body));
                self.w(m.delim.close());
            }
            Item::TypeAlias(t) => {
                self.w("type ");
                self.w(&t.name);
                self.type_params(&t.type_params);
                self.w(" = ");
                self.ty(&t.target);
                self.w(";");
            }
            Item::Use(u) => {
                self.w("use ");
                self.w(&u.path.join("::"));
                self.w(";");
            }
        }
        self.out.push('\n');
    }

    fn methods(&mut self, methods: &[FnDef]) {
        if methods.is_empty() {
            self.w(" {}");
            return;
        }
        self.w(" {");
        self.indent += 1;
        for (i, m) in methods.iter().enumerate() {
            if i > 0 {
                self.out.push('\n');
            }
            self.newline();
            self.fn_def(m);
        }
        self.indent -= 1;
        self.newline();
        self.w("}");
    }

    fn fn_def(&mut self, f: &FnDef) {
        self.w("fn ");
        self.w(&f.name);
        self.type_params(&f.type_params);
        self.w("(");
        let mut first = true;
        if let Some(r) = f.receiver {
            self.w(match r {
                Receiver::Value { mutable: false } => "self",
                Receiver::Value { mutable: true } => "mut self",
                Receiver::Ref => "&self",
                Receiver::RefMut => "&mut self",
            });
            first = false;
        }
        for p in &f.params {
            if !first {
                self.w(", ");
            }
            first = false;
            if p.mutable {
                self.w("mut ");
            }
            self.w(&p.name);
            self.w(": ");
            self.ty(&p.ty);
        }
        self.w(")");
        if let Some(r) = &f.ret {
            self.w(" -> ");
            self.ty(r);
        }
        match &f.body {
            Some(b) => {
                self.w(" ");
                self.block(b);
            }
            None => self.w(";"),
        }
    }

    // ----- types ----------------------------------------------------------

    fn ty(&mut self, t: &TypeTerm) {
        match t {
            TypeTerm::Path { segments, args } => {
                self.w(&segments.join("::"));
                if !args.is_empty() {
                    self.w("<");
                    self.comma_list(args, |p, a| p.ty(a));
                    self.w(">");
                }
            }
            TypeTerm::Ref { mutable, inner } => {
                self.w(if *mutable { "&mut " } else { "&" });
                self.ty(inner);
            }
            TypeTerm::Tuple(elems) => {
                self.w("(");
                self.comma_list(elems, |p, a| p.ty(a));
                if elems.len() == 1 {
                    self.w(",");
                }
                self.w(")");
            }
            TypeTerm::Slice(inner) => {
                self.w("[");
                self.ty(inner);
                self.w("]");
            }
            TypeTerm::Closure { params, ret } => {
                if params.is_empty() {
                    self.w("||");
                } else {
                    self.w("|");
                    self.comma_list(params, |p, a| p.ty(a));
                    self.w("|");
                }
                if let Some(r) = ret {
                    self.w(" -> ");
                    self.ty(r);
                }
            }
        }
    }

    // ----- blocks ---------------------------------------------------------

    fn block(&mut self, b: &Block) {
        if b.stmts.is_empty() && b.tail.is_none() {
            self.w("{}");
            return;
        }
        self.w("{");
        self.indent += 1;
        for s in &b.stmts {
            self.newline();
            self.stmt(s);
        }
        if let Some(t) = &b.tail {
            self.newline();
            self.stmt_expr(t);
        }
        self.indent -= 1;
        self.newline();
        self.w("}");
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Let { pat, ty, init } => {
                self.w("let ");
                self.pattern(pat);
                if let Some(t) = ty {
                    self.w(": ");
                    self.ty(t);
                }
                if let Some(i) = init {
                    self.w(" = ");
                    self.expr(i, 0);
                }
                self.w(";");
            }
            StmtKind::Expr { expr, semi } => {
                self.stmt_expr(expr);
                if *semi {
                    self.w(";");
                }
            }
        }
    }

    fn stmt_expr(&mut self, e: &Expr) {
        if starts_with_block_like(e) {
            self.w("(");
            self.expr(e, 0);
            self.w(")");
        } else {
            self.expr(e, 0);
        }
    }

    /// Condition or scrutinee position, where record literals must be
    /// parenthesized.
    fn head_expr(&mut self, e: &Expr) {
        if contains_record(e) {
            self.w("(");
            self.expr(e, 0);
            self.w(")");
        } else {
            self.expr(e, 0);
        }
    }

    // ----- expressions ----------------------------------------------------

    /// Prints `e`, parenthesized if its precedence is below `min`.
    fn expr(&mut self, e: &Expr, min: u8) {
        if prec(e) < min {
            self.w("(");
            self.expr_inner(e);
            self.w(")");
        } else {
            self.expr_inner(e);
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.w("(");
        self.comma_list(args, |p, a| p.expr(a, 0));
        self.w(")");
    }

    fn expr_inner(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(l) => self.w(&print_lit(l)),
            ExprKind::Path(p) => self.w(&p.joined()),
            ExprKind::Record { path, fields, base } => {
                self.w(&path.joined());
                if fields.is_empty() && base.is_none() {
                    self.w(" {}");
                    return;
                }
                self.w(" { ");
                self.comma_list(fields, |p, f| {
                    p.w(&f.name);
                    p.w(": ");
                    p.expr(&f.value, 0);
                });
                if let Some(b) = base {
                    if !fields.is_empty() {
                        self.w(", ");
                    }
                    self.w("..");
                    self.expr(b, 0);
                }
                self.w(" }");
            }
            ExprKind::Tuple(elems) => {
                self.w("(");
                self.comma_list(elems, |p, x| p.expr(x, 0));
                if elems.len() == 1 {
                    self.w(",");
                }
                self.w(")");
            }
            ExprKind::Field { base, name } => {
                if matches!(base.kind, ExprKind::Lit(_)) {
                    self.w("(");
                    self.expr(base, 0);
                    self.w(")");
                } else {
                    self.expr(base, PREC_POSTFIX);
                }
                self.w(".");
                self.w(name);
            }
            ExprKind::Array(elems) => {
                self.w("[");
                self.comma_list(elems, |p, x| p.expr(x, 0));
                self.w("]");
            }
            ExprKind::ArrayRepeat { value, count } => {
                self.w("[");
                self.expr(value, 0);
                self.w(", ..");
                self.expr(count, 0);
                self.w("]");
            }
            ExprKind::Index { base, index } => {
                self.expr(base, PREC_POSTFIX);
                self.w("[");
                self.expr(index, 0);
                self.w("]");
            }
            ExprKind::Block(b) => self.block(b),
            ExprKind::If { cond, then, els } => {
                self.w("if ");
                self.head_expr(cond);
                self.w(" ");
                self.block(then);
                if let Some(e) = els {
                    self.w(" else ");
                    self.expr(e, 0);
                }
            }
            ExprKind::Match { scrutinee, arms } => {
                self.w("match ");
                self.head_expr(scrutinee);
                self.w(" {");
                self.indent += 1;
                for a in arms {
                    self.newline();
                    self.pattern(&a.pat);
                    if let Some(g) = &a.guard {
                        self.w(" if ");
                        self.expr(g, 0);
                    }
                    self.w(" => ");
                    self.expr(&a.body, 0);
                    self.w(",");
                }
                self.indent -= 1;
                self.newline();
                self.w("}");
            }
            ExprKind::Call { callee, args } => {
                self.expr(callee, PREC_POSTFIX);
                self.args(args);
            }
            ExprKind::MethodCall { receiver, method, args } => {
                if matches!(receiver.kind, ExprKind::Lit(Lit::Float { .. })) {
                    self.w("(");
                    self.expr(receiver, 0);
                    self.w(")");
                } else {
                    self.expr(receiver, PREC_POSTFIX);
                }
                self.w(".");
                self.w(method);
                self.args(args);
            }
            ExprKind::Lambda { params, body } => {
                if params.is_empty() {
                    self.w("||");
                } else {
                    self.w("|");
                    self.comma_list(params, |p, lp| {
                        p.w(&lp.name);
                        if let Some(t) = &lp.ty {
                            p.w(": ");
                            p.ty(t);
                        }
                    });
                    self.w("|");
                }
                self.w(" ");
                self.expr(body, 0);
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let (l, r) = op.binding_power();
                let lhs_paren = match &lhs.kind {
                    ExprKind::Binary { op: lop, .. } => {
                        lop.binding_power().1 <= l || (op.is_comparison() && lop.is_comparison())
                    }
                    _ => prec(lhs) < l,
                };
                if lhs_paren {
                    self.w("(");
                    self.expr(lhs, 0);
                    self.w(")");
                } else {
                    self.expr(lhs, 0);
                }
                self.w(" ");
                self.w(op.symbol());
                self.w(" ");
                let rhs_paren = match &rhs.kind {
                    ExprKind::Binary { op: rop, .. } => {
                        rop.binding_power().0 < r || (op.is_comparison() && rop.is_comparison())
                    }
                    _ => prec(rhs) < r,
                };
                if rhs_paren {
                    self.w("(");
                    self.expr(rhs, 0);
                    self.w(")");
                } else {
                    self.expr(rhs, 0);
                }
            }
            ExprKind::Unary { op, operand } => {
                self.w(op.symbol());
                self.expr(operand, PREC_UNARY);
            }
            ExprKind::Assign { place, value } => {
                self.expr(place, 3);
                self.w(" = ");
                self.expr(value, 0);
            }
            ExprKind::CompoundAssign { op, place, value } => {
                self.expr(place, 3);
                self.w(" ");
                self.w(op.symbol());
                self.w("= ");
                self.expr(value, 0);
            }
            ExprKind::For { pat, iter, body } => {
                self.w("for ");
                self.pattern(pat);
                self.w(" in ");
                self.head_expr(iter);
                self.w(" ");
                self.block(body);
            }
            ExprKind::Loop(b) => {
                self.w("loop ");
                self.block(b);
            }
            ExprKind::While { cond, body } => {
                self.w("while ");
                self.head_expr(cond);
                self.w(" ");
                self.block(body);
            }
            ExprKind::Break => self.w("break"),
            ExprKind::Continue => self.w("continue"),
            ExprKind::Return(v) => {
                self.w("return");
                if let Some(v) = v {
                    self.w(" ");
                    self.expr(v, 0);
                }
            }
            ExprKind::Box { allocator, operand } => {
                self.w("box");
                if let Some(a) = allocator {
                    self.w("(");
                    self.w(a);
                    self.w(")");
                }
                self.w(" ");
                self.expr(operand, PREC_UNARY);
            }
            ExprKind::MacroCall { name, delim, tokens } => {
                self.w(name);
                self.w("!");
                self.w(delim.open());
                self.w(&join_tokens(tokens));
                self.w(delim.close());
            }
            ExprKind::Builtin { mac, args } => {
                self.w(mac.name());
                self.w("!");
                let (open, close) = if *mac == BuiltinMacro::Vec { ("[", "]") } else { ("(", ")") };
                self.w(open);
                self.comma_list(args, |p, a| p.expr(a, 0));
                self.w(close);
            }
        }
    }

    // ----- patterns -------------------------------------------------------

    fn pattern(&mut self, p: &Pattern) {
        match &p.kind {
            PatKind::Wild => self.w("_"),
            PatKind::Lit { lit, negative } => {
                if *negative {
                    self.w("-");
                }
                self.w(&print_lit(lit));
            }
            PatKind::Binding { name, mutable, by_ref } => {
                if *by_ref {
                    self.w("ref ");
                }
                if *mutable {
                    self.w("mut ");
                }
                self.w(name);
            }
            PatKind::At { name, sub } => {
                self.w(name);
                self.w(" @ ");
                self.sub_pattern(sub);
            }
            PatKind::Tuple(elems) => {
                self.w("(");
                self.comma_list(elems, |pr, x| pr.pattern(x));
                if elems.len() == 1 {
                    self.w(",");
                }
                self.w(")");
            }
            PatKind::Variant { path, subpats } => {
                self.w(&path.joined());
                if !subpats.is_empty() || path.segments.len() == 1 {
                    self.w("(");
                    self.comma_list(subpats, |pr, x| pr.pattern(x));
                    self.w(")");
                }
            }
            PatKind::Record { path, fields, rest } => {
                self.w(&path.joined());
                if fields.is_empty() && !rest {
                    self.w(" {}");
                    return;
                }
                self.w(" { ");
                self.comma_list(fields, |pr, (name, fp)| {
                    pr.w(name);
                    pr.w(": ");
                    pr.pattern(fp);
                });
                if *rest {
                    if !fields.is_empty() {
                        self.w(", ");
                    }
                    self.w("..");
                }
                self.w(" }");
            }
            PatKind::Ref { mutable, sub } => {
                self.w(if *mutable { "&mut " } else { "&" });
                if matches!(sub.kind, PatKind::Ref { .. }) && !*mutable {
                    self.w(" ");
                }
                self.sub_pattern(sub);
            }
            PatKind::Or(alts) => {
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        self.w(" | ");
                    }
                    self.sub_pattern(a);
                }
            }
        }
    }

    /// A pattern in a position that does not accept a bare or-pattern.
    fn sub_pattern(&mut self, p: &Pattern) {
        if matches!(p.kind, PatKind::Or(_)) {
            self.w("(");
            self.pattern(p);
            self.w(")");
        } else {
            self.pattern(p);
        }
    }
}
