//! Reading and writing through places.

use super::error::RuntimeErrorKind as K;
use super::value::{Place, Proj, Value};

fn step<'v>(v: &'v Value, p: &Proj) -> Result<&'v Value, K> {
    match (p, v) {
        (Proj::Field(n), Value::Record { name, fields }) => fields
            .iter()
            .find(|(f, _)| f == n)
            .map(|(_, x)| x)
            .ok_or_else(|| K::TypeMismatch(format!("`{}` has no field `{}`", name, n))),
        (Proj::Elem(i), Value::Tuple(xs)) | (Proj::Elem(i), Value::Variant { payload: xs, .. }) => xs
            .get(*i)
            .ok_or_else(|| K::TypeMismatch(format!("no element {} in `{}`", i, v))),
        (Proj::Index(i), Value::Vector(xs)) => xs.get(*i).ok_or(K::IndexOutOfBounds {
            index: *i as i128,
            len: xs.len(),
        }),
        (p, v) => Err(K::TypeMismatch(format!("cannot project {:?} out of `{}`", p, v))),
    }
}

fn step_mut<'v>(v: &'v mut Value, p: &Proj) -> Result<&'v mut Value, K> {
    let shown = v.to_string();
    match (p, v) {
        (Proj::Field(n), Value::Record { name, fields }) => {
            let name = name.clone();
            fields
                .iter_mut()
                .find(|(f, _)| f == n)
                .map(|(_, x)| x)
                .ok_or_else(|| K::TypeMismatch(format!("`{}` has no field `{}`", name, n)))
        }
        (Proj::Elem(i), Value::Tuple(xs)) | (Proj::Elem(i), Value::Variant { payload: xs, .. }) => xs
            .get_mut(*i)
            .ok_or_else(|| K::TypeMismatch(format!("no element {} in `{}`", i, shown))),
        (Proj::Index(i), Value::Vector(xs)) => {
            let len = xs.len();
            xs.get_mut(*i).ok_or(K::IndexOutOfBounds {
                index: *i as i128,
                len,
            })
        }
        (p, _) => Err(K::TypeMismatch(format!("cannot project {:?} out of `{}`", p, shown))),
    }
}

fn view<R>(v: &Value, path: &[Proj], f: &mut dyn FnMut(&Value) -> R) -> Result<R, K> {
    let Some((p, rest)) = path.split_first() else {
        return Ok(f(v));
    };
    match (p, v) {
        (Proj::Deref, Value::Box(cell)) => view(&cell.borrow(), rest, f),
        (Proj::Deref, Value::Shared(inner)) => view(inner, rest, f),
        (Proj::Deref, Value::Ref { place, .. }) => {
            let mut full = place.path.clone();
            full.extend_from_slice(rest);
            let root = place.root.try_borrow().map_err(|_| K::BorrowConflict)?;
            view(&root, &full, f)
        }
        // Dereferencing a plain value is the identity.
        (Proj::Deref, v) => view(v, rest, f),
        (p, v) => view(step(v, p)?, rest, f),
    }
}

fn modify<R>(v: &mut Value, path: &[Proj], f: &mut dyn FnMut(&mut Value) -> Result<R, K>) -> Result<R, K> {
    let Some((p, rest)) = path.split_first() else {
        return f(v);
    };
    match (p, v) {
        (Proj::Deref, Value::Box(cell)) => {
            let cell = cell.clone();
            let mut inner = cell.try_borrow_mut().map_err(|_| K::BorrowConflict)?;
            modify(&mut inner, rest, f)
        }
        (Proj::Deref, Value::Shared(_)) => Err(K::SharedMutation),
        (Proj::Deref, Value::Ref { place, mutable }) => {
            if !*mutable {
                return Err(K::ImmutableWrite);
            }
            let mut full = place.path.clone();
            full.extend_from_slice(rest);
            let root = place.root.clone();
            let mut guard = root.try_borrow_mut().map_err(|_| K::BorrowConflict)?;
            modify(&mut guard, &full, f)
        }
        (Proj::Deref, v) => modify(v, rest, f),
        (p, v) => modify(step_mut(v, p)?, rest, f),
    }
}

pub fn with_value<R>(place: &Place, f: &mut dyn FnMut(&Value) -> R) -> Result<R, K> {
    let root = place.root.try_borrow().map_err(|_| K::BorrowConflict)?;
    view(&root, &place.path, f)
}

pub fn read(place: &Place) -> Result<Value, K> {
    with_value(place, &mut |v| v.clone())
}

pub fn with_value_mut<R>(place: &Place, f: &mut dyn FnMut(&mut Value) -> Result<R, K>) -> Result<R, K> {
    let mut root = place.root.try_borrow_mut().map_err(|_| K::BorrowConflict)?;
    modify(&mut root, &place.path, f)
}

/// Stores `new`, letting an untyped literal adopt the width of the old value.
pub fn write(place: &Place, new: Value) -> Result<(), K> {
    let mut new = Some(new);
    with_value_mut(place, &mut |slot| {
        let v = new.take().expect("written once");
        *slot = adopt(v, slot);
        Ok(())
    })
}

pub fn adopt(v: Value, like: &Value) -> Value {
    match (v, like) {
        (Value::Int(x, super::value::IntTy::Untyped), Value::Int(_, t)) => Value::Int(t.normalize(x), *t),
        (Value::Float(x, super::value::FloatTy::Untyped), Value::Float(_, t)) => Value::Float(t.round(x), *t),
        (v, _) => v,
    }
}
