//! Indented s-expression dump of a program tree.
//!
//! Each node is `(Kind attr...` followed by its children, one per line and
//! indented two spaces deeper, and a closing `)`. Leaves fit on one line.
//! Attributes are literals, names, or operator symbols. Spans are omitted.

use super::ast::*;
use super::pretty::{join_tokens, print_lit, print_type};

pub fn dump_program(p: &Program) -> String {
    let mut d = Dumper::default();
    d.open("Program", &[]);
    for item in &p.items {
        d.item(item);
    }
    d.close();
    d.out
}

pub fn dump_expr(e: &Expr) -> String {
    let mut d = Dumper::default();
    d.expr(e);
    d.out
}

#[derive(Default)]
struct Dumper {
    out: String,
    depth: usize,
}

fn quote(s: &str) -> String {
    format!("{:?}", s)
}

impl Dumper {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn open(&mut self, kind: &str, attrs: &[String]) {
        let mut s = format!("({}", kind);
        for a in attrs {
            s.push(' ');
            s.push_str(a);
        }
        self.line(&s);
        self.depth += 1;
    }

    fn close(&mut self) {
        self.depth -= 1;
        // Attach `)` to the previous line.
        if self.out.ends_with('\n') {
            self.out.pop();
        }
        self.out.push_str(")\n");
    }

    fn leaf(&mut self, kind: &str, attrs: &[String]) {
        self.open(kind, attrs);
        self.close();
    }

    fn item(&mut self, item: &Item) {
        match item {
            Item::Fn(f) => self.fn_def(f),
            Item::Struct(s) => {
                self.open("Struct", &[s.name.clone()]);
                for f in &s.fields {
                    self.leaf("Field", &[f.name.clone(), print_type(&f.ty)]);
                }
                self.close();
            }
            Item::Enum(e) => {
                self.open("Enum", &[e.name.clone()]);
                for v in &e.variants {
                    let mut attrs = vec![v.name.clone()];
                    attrs.extend(v.payload.iter().map(print_type));
                    self.leaf("Variant", &attrs);
                }
                self.close();
            }
            Item::Trait(t) => {
                self.open("Trait", &[t.name.clone()]);
                for m in &t.methods {
                    self.fn_def(m);
                }
                self.close();
            }
            Item::Impl(i) => {
                let mut attrs = vec![print_type(&i.target)];
                if let Some(tr) = &i.trait_ref {
                    attrs.push(format!("trait={}", print_type(tr)));
                }
                self.open("Impl", &attrs);
                for m in &i.methods {
                    self.fn_def(m);
                }
                self.close();
            }
            Item::Macro(m) => self.leaf("MacroRules", &[m.name.clone(), quote(&join_tokens(&m.body))]),
            Item::TypeAlias(t) => self.leaf("TypeAlias", &[t.name.clone(), print_type(&t.target)]),
            Item::Use(u) => self.leaf("Use", &[u.path.join("::")]),
        }
    }

    fn fn_def(&mut self, f: &FnDef) {
        let mut attrs = vec![f.name.clone()];
        if let Some(r) = f.receiver {
            attrs.push(
                match r {
                    Receiver::Value { mutable: false } => "self",
                    Receiver::Value { mutable: true } => "mut-self",
                    Receiver::Ref => "&self",
                    Receiver::RefMut => "&mut-self",
                }
                .to_string(),
            );
        }
        self.open("Fn", &attrs);
        for p in &f.params {
            let mut a = vec![p.name.clone(), print_type(&p.ty)];
            if p.mutable {
                a.insert(0, "mut".into());
            }
            self.leaf("Param", &a);
        }
        if let Some(r) = &f.ret {
            self.leaf("Ret", &[print_type(r)]);
        }
        if let Some(b) = &f.body {
            self.block(b);
        }
        self.close();
    }

    fn block(&mut self, b: &Block) {
        self.open("Block", &[]);
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Let { pat, ty, init } => {
                    let attrs: Vec<String> = ty.iter().map(print_type).collect();
                    self.open("Let", &attrs);
                    self.pattern(pat);
                    if let Some(i) = init {
                        self.expr(i);
                    }
                    self.close();
                }
                StmtKind::Expr { expr, semi } => {
                    self.open(if *semi { "Semi" } else { "Stmt" }, &[]);
                    self.expr(expr);
                    self.close();
                }
            }
        }
        if let Some(t) = &b.tail {
            self.open("Tail", &[]);
            self.expr(t);
            self.close();
        }
        self.close();
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(l) => self.leaf("Lit", &[print_lit(l)]),
            ExprKind::Path(p) => self.leaf("Path", &[p.joined()]),
            ExprKind::Record { path, fields, base } => {
                self.open("Record", &[path.joined()]);
                for f in fields {
                    self.open("FieldInit", &[f.name.clone()]);
                    self.expr(&f.value);
                    self.close();
                }
                if let Some(b) = base {
                    self.open("Base", &[]);
                    self.expr(b);
                    self.close();
                }
                self.close();
            }
            ExprKind::Tuple(xs) => self.node("Tuple", &[], xs.iter()),
            ExprKind::Field { base, name } => self.node("Field", &[name.clone()], [&**base]),
            ExprKind::Array(xs) => self.node("Array", &[], xs.iter()),
            ExprKind::ArrayRepeat { value, count } => self.node("ArrayRepeat", &[], [&**value, &**count]),
            ExprKind::Index { base, index } => self.node("Index", &[], [&**base, &**index]),
            ExprKind::Block(b) => self.block(b),
            ExprKind::If { cond, then, els } => {
                self.open("If", &[]);
                self.expr(cond);
                self.block(then);
                if let Some(e) = els {
                    self.expr(e);
                }
                self.close();
            }
            ExprKind::Match { scrutinee, arms } => {
                self.open("Match", &[]);
                self.expr(scrutinee);
                for a in arms {
                    self.open("Arm", &[]);
                    self.pattern(&a.pat);
                    if let Some(g) = &a.guard {
                        self.open("Guard", &[]);
                        self.expr(g);
                        self.close();
                    }
                    self.expr(&a.body);
                    self.close();
                }
                self.close();
            }
            ExprKind::Call { callee, args } => self.node("Call", &[], std::iter::once(&**callee).chain(args)),
            ExprKind::MethodCall { receiver, method, args } => {
                self.node("MethodCall", &[method.clone()], std::iter::once(&**receiver).chain(args))
            }
            ExprKind::Lambda { params, body } => {
                let attrs: Vec<String> = params
                    .iter()
                    .map(|p| match &p.ty {
                        Some(t) => format!("{}:{}", p.name, print_type(t)),
                        None => p.name.clone(),
                    })
                    .collect();
                self.node("Lambda", &attrs, [&**body]);
            }
            ExprKind::Binary { op, lhs, rhs } => self.node("Binary", &[op.symbol().into()], [&**lhs, &**rhs]),
            ExprKind::Unary { op, operand } => self.node("Unary", &[op.symbol().trim().into()], [&**operand]),
            ExprKind::Assign { place, value } => self.node("Assign", &[], [&**place, &**value]),
            ExprKind::CompoundAssign { op, place, value } => {
                self.node("CompoundAssign", &[format!("{}=", op.symbol())], [&**place, &**value])
            }
            ExprKind::For { pat, iter, body } => {
                self.open("For", &[]);
                self.pattern(pat);
                self.expr(iter);
                self.block(body);
                self.close();
            }
            ExprKind::Loop(b) => {
                self.open("Loop", &[]);
                self.block(b);
                self.close();
            }
            ExprKind::While { cond, body } => {
                self.open("While", &[]);
                self.expr(cond);
                self.block(body);
                self.close();
            }
            ExprKind::Break => self.leaf("Break", &[]),
            ExprKind::Continue => self.leaf("Continue", &[]),
            ExprKind::Return(v) => self.node("Return", &[], v.iter().map(|b| &**b)),
            ExprKind::Box { allocator, operand } => {
                let attrs: Vec<String> = allocator.iter().cloned().collect();
                self.node("Box", &attrs, [&**operand]);
            }
            ExprKind::MacroCall { name, tokens, .. } => {
                self.leaf("MacroCall", &[name.clone(), quote(&join_tokens(tokens))])
            }
            ExprKind::Builtin { mac, args } => self.node("Builtin", &[mac.name().into()], args.iter()),
        }
    }

    fn node<'a>(&mut self, kind: &str, attrs: &[String], children: impl IntoIterator<Item = &'a Expr>) {
        self.open(kind, attrs);
        for c in children {
            self.expr(c);
        }
        self.close();
    }

    fn pattern(&mut self, p: &Pattern) {
        match &p.kind {
            PatKind::Wild => self.leaf("PWild", &[]),
            PatKind::Lit { lit, negative } => {
                let s = print_lit(lit);
                self.leaf("PLit", &[if *negative { format!("-{}", s) } else { s }]);
            }
            PatKind::Binding { name, mutable, by_ref } => {
                let mut attrs = Vec::new();
                if *by_ref {
                    attrs.push("ref".to_string());
                }
                if *mutable {
                    attrs.push("mut".to_string());
                }
                attrs.push(name.clone());
                self.leaf("PBind", &attrs);
            }
            PatKind::At { name, sub } => {
                self.open("PAt", &[name.clone()]);
                self.pattern(sub);
                self.close();
            }
            PatKind::Tuple(xs) => {
                self.open("PTuple", &[]);
                for x in xs {
                    self.pattern(x);
                }
                self.close();
            }
            PatKind::Variant { path, subpats } => {
                self.open("PVariant", &[path.joined()]);
                for x in subpats {
                    self.pattern(x);
                }
                self.close();
            }
            PatKind::Record { path, fields, rest } => {
                let mut attrs = vec![path.joined()];
                if *rest {
                    attrs.push("..".into());
                }
                self.open("PRecord", &attrs);
                for (name, fp) in fields {
                    self.open("PField", &[name.clone()]);
                    self.pattern(fp);
                    self.close();
                }
                self.close();
            }
            PatKind::Ref { mutable, sub } => {
                self.open("PRef", &[if *mutable { "mut".into() } else { String::new() }].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>());
                self.pattern(sub);
                self.close();
            }
            PatKind::Or(alts) => {
                self.open("POr", &[]);
                for a in alts {
                    self.pattern(a);
                }
                self.close();
            }
        }
    }
}
