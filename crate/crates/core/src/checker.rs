//! Static ownership and mutability analysis on the surface tree.
//!
//! Bindings are classified syntactically (box, `&`, `&mut`, `Rc`, or plain).
//! Only boxes move; everything else copies. Borrows held by a `let` last
//! until the end of the block that declares the reference; borrows taken in
//! argument position end with the call.

use std::collections::HashMap;

use crate::diag::{codes, sort_diagnostics, Diagnostic};
use crate::span::SourceSpan;
use crate::syntax::*;

/// Builtin methods that take `&mut self`.
const MUTATING_BUILTINS: &[&str] = &["get_mut", "push", "pop", "clear", "insert", "remove"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingKind {
    Plain,
    Box,
    SharedRef,
    MutRef,
    Rc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingState {
    Live,
    MovedOut { at: SourceSpan },
    MutablyBorrowed { by: String, at: SourceSpan },
    SharedBorrowed { count: usize, at: SourceSpan },
}

#[derive(Debug, Clone)]
struct Binding {
    name: String,
    mutable: bool,
    kind: BindingKind,
    state: BindingState,
    decl: SourceSpan,
    mutated: bool,
}

#[derive(Default)]
struct Scope {
    bindings: Vec<Binding>,
    /// Borrows to release when this scope ends: (scope index, binding index, prior state).
    releases: Vec<(usize, usize, BindingState)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Read,
    Move,
}

struct FnSig {
    /// `Some(mutable)` for reference-typed parameters.
    params: Vec<Option<bool>>,
}

/// Checks every function and method body. The result is sorted by span.
pub fn check_program(p: &Program) -> Vec<Diagnostic> {
    let mut fns = HashMap::new();
    let mut methods: HashMap<String, Vec<Option<Receiver>>> = HashMap::new();
    for item in &p.items {
        match item {
            Item::Fn(f) => {
                fns.insert(
                    f.name.clone(),
                    FnSig {
                        params: f.params.iter().map(|p| p.ty.ref_mutability()).collect(),
                    },
                );
            }
            Item::Impl(i) => {
                for m in &i.methods {
                    methods.entry(m.name.clone()).or_default().push(m.receiver);
                }
            }
            Item::Trait(t) => {
                for m in &t.methods {
                    methods.entry(m.name.clone()).or_default().push(m.receiver);
                }
            }
            _ => {}
        }
    }
    let mut c = Checker {
        fns,
        methods,
        scopes: Vec::new(),
        diags: Vec::new(),
    };
    for item in &p.items {
        match item {
            Item::Fn(f) => c.check_fn(f),
            Item::Impl(i) => i.methods.iter().for_each(|m| c.check_fn(m)),
            Item::Trait(t) => t.methods.iter().for_each(|m| c.check_fn(m)),
            _ => {}
        }
    }
    let mut diags = c.diags;
    sort_diagnostics(&mut diags);
    diags
}

struct Checker {
    fns: HashMap<String, FnSig>,
    methods: HashMap<String, Vec<Option<Receiver>>>,
    scopes: Vec<Scope>,
    diags: Vec<Diagnostic>,
}

fn kind_of_type(t: &TypeTerm) -> BindingKind {
    match t.ref_mutability() {
        Some(true) => BindingKind::MutRef,
        Some(false) => BindingKind::SharedRef,
        None if t.is_box() => BindingKind::Box,
        None if t.is_rc() => BindingKind::Rc,
        None => BindingKind::Plain,
    }
}

fn is_rc_new(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Call { callee, .. } => match &callee.kind {
            ExprKind::Path(p) => p.segments.len() >= 2 && p.segments[p.segments.len() - 2] == "Rc" && p.last() == "new",
            _ => false,
        },
        _ => false,
    }
}

/// Root binding of a place expression and whether the path to it passes
/// through an explicit dereference.
fn place_root(e: &Expr) -> Option<(&str, bool)> {
    match &e.kind {
        ExprKind::Path(p) => p.as_single().map(|n| (n, false)),
        ExprKind::Field { base, .. } | ExprKind::Index { base, .. } => place_root(base),
        ExprKind::Unary { op: UnOp::Deref, operand } => place_root(operand).map(|(n, _)| (n, true)),
        _ => None,
    }
}

impl Checker {
    // ----- scopes ---------------------------------------------------------

    fn push_scope(&mut self) {
        self.scopes.push(Scope::default());
    }

    fn pop_scope(&mut self) {
        let scope = self.scopes.pop().expect("scope underflow");
        for (si, bi, prior) in scope.releases.into_iter().rev() {
            if let Some(b) = self.scopes.get_mut(si).and_then(|s| s.bindings.get_mut(bi)) {
                // A binding that was moved or reassigned meanwhile keeps its new state.
                if matches!(
                    b.state,
                    BindingState::MutablyBorrowed { .. } | BindingState::SharedBorrowed { .. }
                ) {
                    b.state = prior;
                }
            }
        }
        for b in scope.bindings {
            if b.mutable && !b.mutated && !b.name.starts_with('_') {
                self.diags.push(Diagnostic::warning(
                    codes::UNUSED_MUT,
                    b.decl,
                    format!("`{}` is declared `mut` but never mutated", b.name),
                ));
            }
        }
    }

    fn declare(&mut self, name: &str, mutable: bool, kind: BindingKind, decl: SourceSpan) {
        self.scopes.last_mut().expect("no scope").bindings.push(Binding {
            name: name.to_string(),
            mutable,
            kind,
            state: BindingState::Live,
            decl,
            mutated: false,
        });
    }

    fn lookup(&self, name: &str) -> Option<(usize, usize)> {
        for (si, s) in self.scopes.iter().enumerate().rev() {
            if let Some(bi) = s.bindings.iter().rposition(|b| b.name == name) {
                return Some((si, bi));
            }
        }
        None
    }

    fn binding(&self, at: (usize, usize)) -> &Binding {
        &self.scopes[at.0].bindings[at.1]
    }

    fn binding_mut(&mut self, at: (usize, usize)) -> &mut Binding {
        &mut self.scopes[at.0].bindings[at.1]
    }

    fn kind_of(&self, name: &str) -> Option<BindingKind> {
        self.lookup(name).map(|at| self.binding(at).kind)
    }

    fn error(&mut self, code: &'static str, span: SourceSpan, msg: String) -> &mut Diagnostic {
        self.diags.push(Diagnostic::error(code, span, msg));
        self.diags.last_mut().expect("just pushed")
    }

    // ----- functions and patterns ----------------------------------------

    fn check_fn(&mut self, f: &FnDef) {
        let Some(body) = &f.body else {
            return;
        };
        self.scopes.clear();
        self.push_scope();
        match f.receiver {
            Some(Receiver::Ref) => self.declare("self", false, BindingKind::SharedRef, f.span),
            Some(Receiver::RefMut) => self.declare("self", false, BindingKind::MutRef, f.span),
            Some(Receiver::Value { mutable }) => self.declare("self", mutable, BindingKind::Plain, f.span),
            None => {}
        }
        for p in &f.params {
            self.declare(&p.name, p.mutable, kind_of_type(&p.ty), p.span);
        }
        self.block(body);
        self.pop_scope();
    }

    fn bind_pattern(&mut self, p: &Pattern, whole: BindingKind) {
        match &p.kind {
            PatKind::Binding { name, mutable, by_ref } => {
                let kind = match (by_ref, mutable) {
                    (true, true) => BindingKind::MutRef,
                    (true, false) => BindingKind::SharedRef,
                    _ => whole,
                };
                // `ref mut x` makes the reference mutable, not the binding.
                self.declare(name, *mutable && !by_ref, kind, p.span);
            }
            PatKind::At { name, sub } => {
                self.declare(name, false, whole, p.span);
                self.bind_pattern(sub, BindingKind::Plain);
            }
            PatKind::Tuple(xs) => xs.iter().for_each(|x| self.bind_pattern(x, BindingKind::Plain)),
            PatKind::Variant { subpats, .. } => subpats.iter().for_each(|x| self.bind_pattern(x, BindingKind::Plain)),
            PatKind::Record { fields, .. } => fields.iter().for_each(|(_, x)| self.bind_pattern(x, BindingKind::Plain)),
            PatKind::Ref { sub, .. } => self.bind_pattern(sub, BindingKind::Plain),
            // Alternatives bind the same names; the first is representative.
            PatKind::Or(alts) => {
                if let Some(a) = alts.first() {
                    self.bind_pattern(a, whole);
                }
            }
            PatKind::Wild | PatKind::Lit { .. } => {}
        }
    }

    fn init_kind(&self, init: &Expr) -> BindingKind {
        match &init.kind {
            ExprKind::Box { .. } => BindingKind::Box,
            ExprKind::Unary { op: UnOp::RefMut, .. } => BindingKind::MutRef,
            ExprKind::Unary { op: UnOp::Ref, .. } => BindingKind::SharedRef,
            ExprKind::Path(p) => p.as_single().and_then(|n| self.kind_of(n)).unwrap_or(BindingKind::Plain),
            _ if is_rc_new(init) => BindingKind::Rc,
            _ => BindingKind::Plain,
        }
    }

    // ----- blocks and statements -----------------------------------------

    fn block(&mut self, b: &Block) {
        self.push_scope();
        self.block_contents(b);
        self.pop_scope();
    }

    fn block_contents(&mut self, b: &Block) {
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Let { pat, ty, init } => {
                    let kind = match (ty, init) {
                        (Some(t), _) if kind_of_type(t) != BindingKind::Plain => kind_of_type(t),
                        (_, Some(i)) => self.init_kind(i),
                        _ => BindingKind::Plain,
                    };
                    let borrow = init.as_ref().and_then(|i| self.let_borrow(i));
                    if let Some(i) = init {
                        self.expr(i, Ctx::Move);
                    }
                    self.bind_pattern(pat, kind);
                    if let (Some((target, mutable, at)), PatKind::Binding { name, .. }) = (borrow, &pat.kind) {
                        self.hold_borrow(target, mutable, name, at);
                    }
                }
                StmtKind::Expr { expr, .. } => self.expr(expr, Ctx::Read),
            }
        }
        if let Some(t) = &b.tail {
            self.expr(t, Ctx::Move);
        }
    }

    /// For `let r = &x` / `let r = &mut x`: the borrowed binding.
    fn let_borrow(&self, init: &Expr) -> Option<((usize, usize), bool, SourceSpan)> {
        let ExprKind::Unary { op, operand } = &init.kind else {
            return None;
        };
        let mutable = match op {
            UnOp::Ref => false,
            UnOp::RefMut => true,
            _ => return None,
        };
        let (name, via_deref) = place_root(operand)?;
        if via_deref {
            return None;
        }
        self.lookup(name).map(|at| (at, mutable, init.span))
    }

    fn hold_borrow(&mut self, target: (usize, usize), mutable: bool, by: &str, at: SourceSpan) {
        let prior = self.binding(target).state.clone();
        let new_state = match (&prior, mutable) {
            (BindingState::Live, true) => BindingState::MutablyBorrowed { by: by.to_string(), at },
            (BindingState::Live, false) => BindingState::SharedBorrowed { count: 1, at },
            (BindingState::SharedBorrowed { count, at }, false) => BindingState::SharedBorrowed {
                count: count + 1,
                at: *at,
            },
            // Conflicts were already reported when the borrow was taken.
            _ => return,
        };
        self.binding_mut(target).state = new_state;
        let depth = self.scopes.len() - 1;
        self.scopes[depth].releases.push((target.0, target.1, prior));
    }

    // ----- expressions ----------------------------------------------------

    fn use_binding(&mut self, name: &str, span: SourceSpan, ctx: Ctx) {
        let Some(at) = self.lookup(name) else {
            return;
        };
        let b = self.binding(at).clone();
        match &b.state {
            BindingState::MovedOut { at: moved } => {
                let moved = *moved;
                self.error(codes::MOVED_USE, span, format!("use of moved box `{}`", name))
                    .note = Some((moved, "value moved here".into()));
                return;
            }
            BindingState::MutablyBorrowed { by, at: borrowed } => {
                let borrowed = *borrowed;
                let msg = format!("`{}` is used while mutably borrowed by `{}`", name, by);
                self.error(codes::BORROWED_USE, span, msg).note = Some((borrowed, "borrow taken here".into()));
                return;
            }
            _ => {}
        }
        if ctx == Ctx::Move && b.kind == BindingKind::Box {
            self.binding_mut(at).state = BindingState::MovedOut { at: span };
        }
    }

    fn expr(&mut self, e: &Expr, ctx: Ctx) {
        match &e.kind {
            ExprKind::Lit(_) | ExprKind::Break | ExprKind::Continue | ExprKind::MacroCall { .. } => {}
            ExprKind::Path(p) => {
                if let Some(n) = p.as_single() {
                    self.use_binding(n, e.span, ctx);
                }
            }
            ExprKind::Record { fields, base, .. } => {
                for f in fields {
                    self.expr(&f.value, Ctx::Move);
                }
                if let Some(b) = base {
                    self.expr(b, Ctx::Read);
                }
            }
            ExprKind::Tuple(xs) | ExprKind::Array(xs) => xs.iter().for_each(|x| self.expr(x, Ctx::Move)),
            ExprKind::Builtin { args, .. } => args.iter().for_each(|x| self.expr(x, Ctx::Read)),
            ExprKind::ArrayRepeat { value, count } => {
                self.expr(value, Ctx::Read);
                self.expr(count, Ctx::Read);
            }
            ExprKind::Field { base, .. } => self.expr(base, Ctx::Read),
            ExprKind::Index { base, index } => {
                self.expr(base, Ctx::Read);
                self.expr(index, Ctx::Read);
            }
            ExprKind::Block(b) | ExprKind::Loop(b) => self.block(b),
            ExprKind::If { cond, then, els } => {
                self.expr(cond, Ctx::Read);
                self.block(then);
                if let Some(x) = els {
                    self.expr(x, ctx);
                }
            }
            ExprKind::While { cond, body } => {
                self.expr(cond, Ctx::Read);
                self.block(body);
            }
            ExprKind::For { pat, iter, body } => {
                self.expr(iter, Ctx::Read);
                self.push_scope();
                self.bind_pattern(pat, BindingKind::Plain);
                self.block(body);
                self.pop_scope();
            }
            ExprKind::Match { scrutinee, arms } => {
                self.expr(scrutinee, Ctx::Read);
                for a in arms {
                    self.push_scope();
                    self.bind_pattern(&a.pat, BindingKind::Plain);
                    if let Some(g) = &a.guard {
                        self.expr(g, Ctx::Read);
                    }
                    self.expr(&a.body, ctx);
                    self.pop_scope();
                }
            }
            ExprKind::Call { callee, args } => self.call(callee, args),
            ExprKind::MethodCall { receiver, method, args } => self.method_call(receiver, method, args),
            ExprKind::Lambda { params, body } => {
                self.push_scope();
                for p in params {
                    let kind = p.ty.as_ref().map(kind_of_type).unwrap_or(BindingKind::Plain);
                    self.declare(&p.name, false, kind, p.span);
                }
                self.expr(body, Ctx::Move);
                self.pop_scope();
            }
            ExprKind::Binary { op, lhs, rhs } => {
                if op.is_arithmetic() {
                    for side in [lhs, rhs] {
                        self.check_ref_operand(*op, side);
                    }
                }
                self.expr(lhs, Ctx::Read);
                self.expr(rhs, Ctx::Read);
            }
            ExprKind::Unary { op, operand } => match op {
                UnOp::Ref | UnOp::RefMut => self.check_borrow(*op == UnOp::RefMut, operand, e.span),
                _ => self.expr(operand, Ctx::Read),
            },
            ExprKind::Assign { place, value } => {
                self.expr(value, Ctx::Move);
                self.check_assignment(place, e.span, false);
            }
            ExprKind::CompoundAssign { op, place, value } => {
                self.check_ref_operand(*op, value);
                self.expr(value, Ctx::Read);
                self.check_assignment(place, e.span, true);
            }
            ExprKind::Return(v) => {
                if let Some(v) = v {
                    self.expr(v, Ctx::Move);
                }
            }
            ExprKind::Box { operand, .. } => self.expr(operand, Ctx::Move),
        }
    }

    fn check_ref_operand(&mut self, op: BinOp, side: &Expr) {
        let Some(name) = side.path_name() else {
            return;
        };
        if matches!(self.kind_of(name), Some(BindingKind::SharedRef | BindingKind::MutRef)) {
            self.error(
                codes::REF_OPERAND,
                side.span,
                format!("`{}` cannot be applied to reference `{}`; dereference it with `*{}`", op.symbol(), name, name),
            );
        }
    }

    fn call(&mut self, callee: &Expr, args: &[Expr]) {
        let sig_params = callee.path_name().and_then(|n| self.fns.get(n)).map(|s| s.params.clone());
        if !matches!(callee.kind, ExprKind::Path(_)) {
            self.expr(callee, Ctx::Read);
        }
        for (i, arg) in args.iter().enumerate() {
            self.expr(arg, Ctx::Move);
            let wants_mut = sig_params.as_ref().and_then(|ps| ps.get(i).copied().flatten()) == Some(true);
            if !wants_mut {
                continue;
            }
            let shared = match &arg.kind {
                ExprKind::Unary { op: UnOp::Ref, .. } => true,
                ExprKind::Path(p) => p.as_single().and_then(|n| self.kind_of(n)) == Some(BindingKind::SharedRef),
                _ => false,
            };
            if shared {
                self.error(
                    codes::REF_MISMATCH,
                    arg.span,
                    "expected a mutable reference `&mut`, found a shared reference".into(),
                );
            }
        }
    }

    fn takes_mut_self(&self, method: &str) -> bool {
        match self.methods.get(method) {
            Some(receivers) => receivers.iter().all(|r| *r == Some(Receiver::RefMut)),
            None => MUTATING_BUILTINS.contains(&method),
        }
    }

    fn method_call(&mut self, receiver: &Expr, method: &str, args: &[Expr]) {
        self.expr(receiver, Ctx::Read);
        if self.takes_mut_self(method) {
            if let Some((name, via_deref)) = place_root(receiver) {
                self.require_mutable_place(name, via_deref, receiver.span, true, method);
            }
        }
        for a in args {
            self.expr(a, Ctx::Move);
        }
    }

    /// Shared by `&mut` borrows and `&mut self` calls.
    fn require_mutable_place(&mut self, name: &str, via_deref: bool, span: SourceSpan, is_borrow: bool, what: &str) {
        let Some(at) = self.lookup(name) else {
            return;
        };
        let b = self.binding(at).clone();
        let ok = match b.kind {
            BindingKind::MutRef => true,
            BindingKind::SharedRef | BindingKind::Rc => false,
            BindingKind::Box | BindingKind::Plain => b.mutable || (via_deref && b.kind == BindingKind::Plain),
        };
        if ok {
            self.binding_mut(at).mutated = true;
        } else {
            let msg = if is_borrow && what.is_empty() {
                format!("cannot borrow `{}` as mutable because it is not declared `mut`", name)
            } else {
                format!("cannot call `&mut self` method `{}` on immutable `{}`", what, name)
            };
            self.error(codes::MUTREF_IMMUT, span, msg).note = Some((b.decl, "declared here".into()));
        }
    }

    fn check_borrow(&mut self, mutable: bool, operand: &Expr, span: SourceSpan) {
        let Some((name, via_deref)) = place_root(operand) else {
            // Borrow of a temporary.
            self.expr(operand, Ctx::Read);
            return;
        };
        let Some(at) = self.lookup(name) else {
            return;
        };
        let b = self.binding(at).clone();
        match &b.state {
            BindingState::MovedOut { .. } | BindingState::MutablyBorrowed { .. } => {
                self.use_binding(name, operand.span, Ctx::Read);
                return;
            }
            BindingState::SharedBorrowed { at: shared_at, .. } if mutable && !via_deref => {
                let shared_at = *shared_at;
                self.error(
                    codes::ALIAS,
                    span,
                    format!("cannot borrow `{}` as mutable while it is also borrowed as shared", name),
                )
                .note = Some((shared_at, "shared borrow taken here".into()));
                return;
            }
            _ => {}
        }
        if let ExprKind::Index { index, .. } = &operand.kind {
            self.expr(index, Ctx::Read);
        }
        if mutable {
            self.require_mutable_place(name, via_deref, span, true, "");
        }
    }

    fn check_assignment(&mut self, place: &Expr, span: SourceSpan, compound: bool) {
        let Some((name, via_deref)) = place_root(place) else {
            self.expr(place, Ctx::Read);
            return;
        };
        if let ExprKind::Index { index, .. } = &place.kind {
            self.expr(index, Ctx::Read);
        }
        let Some(at) = self.lookup(name) else {
            return;
        };
        let b = self.binding(at).clone();
        match &b.state {
            BindingState::MutablyBorrowed { .. } => {
                self.use_binding(name, place.span, Ctx::Read);
                return;
            }
            BindingState::SharedBorrowed { at: shared_at, .. } => {
                let shared_at = *shared_at;
                self.error(codes::BORROWED_USE, place.span, format!("cannot assign to `{}` while it is borrowed", name))
                    .note = Some((shared_at, "borrow taken here".into()));
                return;
            }
            BindingState::MovedOut { .. } if compound || via_deref || !matches!(place.kind, ExprKind::Path(_)) => {
                self.use_binding(name, place.span, Ctx::Read);
                return;
            }
            _ => {}
        }
        let whole = matches!(place.kind, ExprKind::Path(_));
        let immutable_reason = if whole {
            (!b.mutable).then(|| format!("cannot assign twice to immutable `{}`", name))
        } else {
            match b.kind {
                BindingKind::MutRef => None,
                BindingKind::SharedRef => Some(format!("cannot assign through `{}`, which is a shared reference `&`", name)),
                BindingKind::Rc => Some(format!("cannot assign through `{}`, an `Rc` is immutable", name)),
                BindingKind::Box => (!b.mutable).then(|| format!("cannot assign into immutable box `{}`", name)),
                BindingKind::Plain if via_deref => None,
                BindingKind::Plain => (!b.mutable).then(|| format!("cannot assign to a part of immutable `{}`", name)),
            }
        };
        match immutable_reason {
            Some(msg) => {
                self.error(codes::IMMUT_ASSIGN, span, msg).note = Some((b.decl, "declared here".into()));
            }
            None => {
                let bm = self.binding_mut(at);
                bm.mutated = true;
                if whole {
                    bm.state = BindingState::Live;
                }
            }
        }
    }
}
