//! In-place tree traversal.

use super::ast::*;

/// Override `visit_expr` / `visit_block` and call the matching `walk_*`
/// function to continue into children.
pub trait MutVisitor {
    fn visit_expr(&mut self, e: &mut Expr) {
        walk_expr(self, e);
    }

    fn visit_block(&mut self, b: &mut Block) {
        walk_block(self, b);
    }
}

pub fn walk_program<V: MutVisitor + ?Sized>(v: &mut V, p: &mut Program) {
    for item in &mut p.items {
        match item {
            Item::Fn(f) => walk_fn(v, f),
            Item::Trait(t) => t.methods.iter_mut().for_each(|m| walk_fn(v, m)),
            Item::Impl(i) => i.methods.iter_mut().for_each(|m| walk_fn(v, m)),
            _ => {}
        }
    }
}

pub fn walk_fn<V: MutVisitor + ?Sized>(v: &mut V, f: &mut FnDef) {
    if let Some(b) = &mut f.body {
        v.visit_block(b);
    }
}

pub fn walk_block<V: MutVisitor + ?Sized>(v: &mut V, b: &mut Block) {
    for s in &mut b.stmts {
        match &mut s.kind {
            StmtKind::Let { init, .. } => {
                if let Some(i) = init {
                    v.visit_expr(i);
                }
            }
            StmtKind::Expr { expr, .. } => v.visit_expr(expr),
        }
    }
    if let Some(t) = &mut b.tail {
        v.visit_expr(t);
    }
}

pub fn walk_expr<V: MutVisitor + ?Sized>(v: &mut V, e: &mut Expr) {
    match &mut e.kind {
        ExprKind::Lit(_) | ExprKind::Path(_) | ExprKind::Break | ExprKind::Continue | ExprKind::MacroCall { .. } => {}
        ExprKind::Record { fields, base, .. } => {
            for f in fields {
                v.visit_expr(&mut f.value);
            }
            if let Some(b) = base {
                v.visit_expr(b);
            }
        }
        ExprKind::Tuple(xs) | ExprKind::Array(xs) | ExprKind::Builtin { args: xs, .. } => {
            xs.iter_mut().for_each(|x| v.visit_expr(x));
        }
        ExprKind::Field { base, .. } => v.visit_expr(base),
        ExprKind::ArrayRepeat { value, count } => {
            v.visit_expr(value);
            v.visit_expr(count);
        }
        ExprKind::Index { base, index } => {
            v.visit_expr(base);
            v.visit_expr(index);
        }
        ExprKind::Block(b) | ExprKind::Loop(b) => v.visit_block(b),
        ExprKind::If { cond, then, els } => {
            v.visit_expr(cond);
            v.visit_block(then);
            if let Some(e) = els {
                v.visit_expr(e);
            }
        }
        ExprKind::Match { scrutinee, arms } => {
            v.visit_expr(scrutinee);
            for a in arms {
                if let Some(g) = &mut a.guard {
                    v.visit_expr(g);
                }
                v.visit_expr(&mut a.body);
            }
        }
        ExprKind::Call { callee, args } => {
            v.visit_expr(callee);
            args.iter_mut().for_each(|x| v.visit_expr(x));
        }
        ExprKind::MethodCall { receiver, args, .. } => {
            v.visit_expr(receiver);
            args.iter_mut().for_each(|x| v.visit_expr(x));
        }
        ExprKind::Lambda { body, .. } => v.visit_expr(body),
        ExprKind::Binary { lhs, rhs, .. } => {
            v.visit_expr(lhs);
            v.visit_expr(rhs);
        }
        ExprKind::Unary { operand, .. } | ExprKind::Box { operand, .. } => v.visit_expr(operand),
        ExprKind::Assign { place, value } | ExprKind::CompoundAssign { place, value, .. } => {
            v.visit_expr(place);
            v.visit_expr(value);
        }
        ExprKind::For { iter, body, .. } => {
            v.visit_expr(iter);
            v.visit_block(body);
        }
        ExprKind::While { cond, body } => {
            v.visit_expr(cond);
            v.visit_block(body);
        }
        ExprKind::Return(val) => {
            if let Some(x) = val {
                v.visit_expr(x);
            }
        }
    }
}
