//! Builtin operators on primitive values.

use std::cmp::Ordering;

use super::error::RuntimeErrorKind as K;
use super::value::{values_equal, FloatTy, IntTy, Value};
use crate::syntax::{BinOp, UnOp};

fn mismatch(op: &str, a: &Value, b: &Value) -> K {
    K::TypeMismatch(format!("cannot apply `{}` to `{}` and `{}`", op, a.type_key(), b.type_key()))
}

fn compare(op: BinOp, ord: Option<Ordering>) -> Option<Value> {
    let ord = ord?;
    let r = match op {
        BinOp::Eq => ord == Ordering::Equal,
        BinOp::Ne => ord != Ordering::Equal,
        BinOp::Lt => ord == Ordering::Less,
        BinOp::Gt => ord == Ordering::Greater,
        BinOp::Le => ord != Ordering::Greater,
        BinOp::Ge => ord != Ordering::Less,
        _ => return None,
    };
    Some(Value::Bool(r))
}

/// Width of a binary result: an untyped side adopts the other side's type.
pub fn unify(a: IntTy, b: IntTy) -> IntTy {
    if a == IntTy::Untyped {
        b
    } else {
        a
    }
}

pub fn int_binary(op: BinOp, a: i128, ta: IntTy, b: i128, tb: IntTy) -> Result<Value, K> {
    let ty = match op {
        BinOp::Shl | BinOp::Shr => ta,
        _ => unify(ta, tb),
    };
    let a = ty.normalize(a);
    if op.is_comparison() {
        let b = ty.normalize(b);
        return Ok(compare(op, Some(a.cmp(&b))).expect("comparison"));
    }
    let shift = || b.rem_euclid(ty.bits() as i128) as u32;
    let b = ty.normalize(b);
    let r = match op {
        BinOp::Add => a.wrapping_add(b),
        BinOp::Sub => a.wrapping_sub(b),
        BinOp::Mul => a.wrapping_mul(b),
        BinOp::Div | BinOp::Rem if b == 0 => return Err(K::DivisionByZero),
        BinOp::Div => a.wrapping_div(b),
        BinOp::Rem => a.wrapping_rem(b),
        BinOp::BitAnd => a & b,
        BinOp::BitOr => a | b,
        BinOp::BitXor => a ^ b,
        BinOp::Shl => a.wrapping_shl(shift()),
        BinOp::Shr => a >> shift(),
        BinOp::And | BinOp::Or => return Err(mismatch(op.symbol(), &Value::Int(a, ta), &Value::Int(b, tb))),
        _ => unreachable!("comparisons handled above"),
    };
    Ok(Value::Int(ty.normalize(r), ty))
}

fn float_binary(op: BinOp, a: f64, ta: FloatTy, b: f64, tb: FloatTy) -> Result<Value, K> {
    let ty = if ta == FloatTy::Untyped { tb } else { ta };
    if let Some(v) = compare(op, a.partial_cmp(&b)) {
        return Ok(v);
    }
    if op.is_comparison() {
        // NaN compares unequal and unordered.
        return Ok(Value::Bool(op == BinOp::Ne));
    }
    let r = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Rem => a % b,
        _ => return Err(mismatch(op.symbol(), &Value::Float(a, ta), &Value::Float(b, tb))),
    };
    Ok(Value::Float(ty.round(r), ty))
}

/// Applies `op` to two non-pointer primitive values.
pub fn binary(op: BinOp, a: &Value, b: &Value) -> Result<Value, K> {
    use Value::*;
    match (a, b) {
        (Int(x, tx), Int(y, ty)) => int_binary(op, *x, *tx, *y, *ty),
        (Float(x, tx), Float(y, ty)) => float_binary(op, *x, *tx, *y, *ty),
        (Bool(x), Bool(y)) => match op {
            BinOp::BitAnd | BinOp::And => Ok(Bool(*x && *y)),
            BinOp::BitOr | BinOp::Or => Ok(Bool(*x || *y)),
            BinOp::BitXor => Ok(Bool(x ^ y)),
            _ => compare(op, Some(x.cmp(y))).ok_or_else(|| mismatch(op.symbol(), a, b)),
        },
        (Char(x), Char(y)) => compare(op, Some(x.cmp(y))).ok_or_else(|| mismatch(op.symbol(), a, b)),
        (Str(x), Str(y)) => match op {
            BinOp::Add => Ok(Str(format!("{}{}", x, y))),
            _ => compare(op, Some(x.cmp(y))).ok_or_else(|| mismatch(op.symbol(), a, b)),
        },
        (Unit, Unit) | (Tuple(_), Tuple(_)) | (Vector(_), Vector(_)) => match op {
            BinOp::Eq => Ok(Bool(values_equal(a, b))),
            BinOp::Ne => Ok(Bool(!values_equal(a, b))),
            _ => Err(mismatch(op.symbol(), a, b)),
        },
        _ => Err(mismatch(op.symbol(), a, b)),
    }
}

pub fn unary(op: UnOp, v: &Value) -> Result<Value, K> {
    match (op, v) {
        (UnOp::Neg, Value::Int(x, t)) => Ok(Value::Int(t.normalize(x.wrapping_neg()), *t)),
        (UnOp::Neg, Value::Float(x, t)) => Ok(Value::Float(-x, *t)),
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (UnOp::Not, Value::Int(x, t)) => Ok(Value::Int(t.normalize(!x), *t)),
        (UnOp::Deref, v) => Ok(v.clone()),
        (op, v) => Err(K::TypeMismatch(format!(
            "cannot apply unary `{}` to `{}`",
            op.symbol(),
            v.type_key()
        ))),
    }
}
