//! Tree-walking evaluator.
//!
//! Runs desugared programs, and also accepts the surface forms (`for`,
//! binary and unary operators) directly with the same semantics.

mod error;
mod format;
mod ops;
mod place;
mod value;

use std::collections::HashMap;
use std::rc::Rc;

pub use error::{RuntimeError, RuntimeErrorKind};
pub use format::render;
pub use value::{values_equal, Closure, FloatTy, IntTy, Place, Proj, Slot, Value};

use crate::desugar::{Arity, OPERATOR_TABLE};
use crate::lexer::Suffix;
use crate::span::SourceSpan;
use crate::syntax::*;
use error::RuntimeErrorKind as K;
use value::slot;

/// Nested call limit before `StackOverflow`.
pub const MAX_DEPTH: usize = 10_000;

/// Host thread stack for one program run.
const STACK_BYTES: usize = 4 << 30;

const PRELUDE: &str = "trait PartialEq {
    fn eq(&self, other: &Self) -> bool;
    fn ne(&self, other: &Self) -> bool { !self.eq(other) }
}";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub stdout: String,
    pub error: Option<RuntimeError>,
}

impl RunOutcome {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Runs `main` on a dedicated thread with a deep stack.
pub fn run_program(p: &Program) -> RunOutcome {
    run_entry(p, "main")
}

pub fn run_entry(p: &Program, entry: &str) -> RunOutcome {
    let p = p.clone();
    let entry = entry.to_string();
    std::thread::Builder::new()
        .name("frs-eval".into())
        .stack_size(STACK_BYTES)
        .spawn(move || {
            let mut it = Interp::new(&p);
            let error = it.call_entry(&entry).err();
            RunOutcome { stdout: it.out, error }
        })
        .expect("spawn evaluator thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

enum Flow {
    Break,
    Continue,
    Return(Value),
    Fail(RuntimeError),
}

type Eval<T> = Result<T, Flow>;

fn fail(kind: K, span: SourceSpan) -> Flow {
    Flow::Fail(RuntimeError::new(kind, span))
}

trait At<T> {
    fn at(self, span: SourceSpan) -> Eval<T>;
}

impl<T> At<T> for Result<T, K> {
    fn at(self, span: SourceSpan) -> Eval<T> {
        self.map_err(|k| fail(k, span))
    }
}

struct VariantInfo {
    enum_name: String,
    payload: Vec<TypeTerm>,
}

type MethodKey = (String, String);

struct Interp {
    fns: HashMap<String, Rc<FnDef>>,
    structs: HashMap<String, StructDef>,
    variants: HashMap<String, VariantInfo>,
    aliases: HashMap<String, TypeTerm>,
    inherent: HashMap<MethodKey, Rc<FnDef>>,
    trait_impls: HashMap<MethodKey, Vec<(String, Rc<FnDef>)>>,
    /// trait name → method name → default body.
    trait_defaults: HashMap<String, HashMap<String, Rc<FnDef>>>,
    impls_of: HashMap<String, Vec<String>>,
    scopes: Vec<HashMap<String, Slot>>,
    depth: usize,
    out: String,
}

fn impl_key(name: &str) -> String {
    match name {
        "i64" | "isize" => "int".into(),
        "u64" | "usize" => "uint".into(),
        "String" => "str".into(),
        "float" => "f64".into(),
        n => n.into(),
    }
}

fn type_key_of(t: &TypeTerm) -> Option<String> {
    match t {
        TypeTerm::Ref { inner, .. } => type_key_of(inner),
        TypeTerm::Tuple(xs) if xs.is_empty() => Some("()".into()),
        TypeTerm::Tuple(_) => Some("tuple".into()),
        TypeTerm::Slice(_) => Some("Vec".into()),
        t => t.head_name().map(impl_key),
    }
}

fn binop_for_method(name: &str) -> Option<BinOp> {
    OPERATOR_TABLE
        .iter()
        .find(|e| e.arity == Arity::Binary && e.method == name)
        .and_then(|e| BinOp::from_symbol(e.symbol))
}

fn unop_for_method(name: &str) -> Option<UnOp> {
    match name {
        "neg" => Some(UnOp::Neg),
        "not" => Some(UnOp::Not),
        "deref" => Some(UnOp::Deref),
        _ => None,
    }
}

fn int_ty(s: Suffix) -> IntTy {
    match s {
        Suffix::I => IntTy::Int,
        Suffix::U => IntTy::Uint,
        Suffix::I8 => IntTy::I8,
        Suffix::U8 => IntTy::U8,
        Suffix::I16 => IntTy::I16,
        Suffix::U16 => IntTy::U16,
        Suffix::I32 => IntTy::I32,
        Suffix::U32 => IntTy::U32,
        Suffix::I64 => IntTy::I64,
        Suffix::U64 => IntTy::U64,
        _ => IntTy::Untyped,
    }
}

fn float_ty(s: Suffix) -> FloatTy {
    match s {
        Suffix::F32 => FloatTy::F32,
        Suffix::F64 => FloatTy::F64,
        _ => FloatTy::Untyped,
    }
}

/// Gives untyped numeric elements the type of the first typed one.
fn unify_elements(mut xs: Vec<Value>) -> Vec<Value> {
    let like = xs
        .iter()
        .find(|v| matches!(v, Value::Int(_, t) if *t != IntTy::Untyped) || matches!(v, Value::Float(_, t) if *t != FloatTy::Untyped))
        .cloned();
    if let Some(like) = like {
        xs = xs.into_iter().map(|v| place::adopt(v, &like)).collect();
    }
    xs
}

fn pointee(v: &Value) -> Result<Value, K> {
    match v {
        Value::Box(cell) => Ok(cell.try_borrow().map_err(|_| K::BorrowConflict)?.clone()),
        Value::Shared(inner) => Ok((**inner).clone()),
        Value::Ref { place, .. } => place::read(place),
        v => Ok(v.clone()),
    }
}

fn deref_full(mut v: Value) -> Result<Value, K> {
    while v.is_pointer() {
        v = pointee(&v)?;
    }
    Ok(v)
}

impl Interp {
    fn new(p: &Program) -> Interp {
        let mut it = Interp {
            fns: HashMap::new(),
            structs: HashMap::new(),
            variants: HashMap::new(),
            aliases: HashMap::new(),
            inherent: HashMap::new(),
            trait_impls: HashMap::new(),
            trait_defaults: HashMap::new(),
            impls_of: HashMap::new(),
            scopes: Vec::new(),
            depth: 0,
            out: String::new(),
        };
        let user_partial_eq = p
            .items
            .iter()
            .any(|i| matches!(i, Item::Trait(t) if t.name == "PartialEq"));
        if !user_partial_eq {
            let prelude = crate::lexer::tokenize(PRELUDE)
                .ok()
                .and_then(|t| parse_program(&t).ok())
                .expect("prelude parses");
            it.register(&crate::desugar::desugar_program(&prelude));
        }
        it.register(p);
        if !it.variants.contains_key("None") {
            for (name, payload) in [("None", vec![]), ("Some", vec![TypeTerm::named("T")])] {
                it.variants.insert(
                    name.into(),
                    VariantInfo {
                        enum_name: "Option".into(),
                        payload,
                    },
                );
            }
        }
        it
    }

    fn register(&mut self, p: &Program) {
        for item in &p.items {
            match item {
                Item::Fn(f) => {
                    self.fns.insert(f.name.clone(), Rc::new(f.clone()));
                }
                Item::Struct(s) => {
                    self.structs.insert(s.name.clone(), s.clone());
                }
                Item::Enum(e) => {
                    for v in &e.variants {
                        self.variants.insert(
                            v.name.clone(),
                            VariantInfo {
                                enum_name: e.name.clone(),
                                payload: v.payload.clone(),
                            },
                        );
                    }
                }
                Item::Trait(t) => {
                    let defaults = t
                        .methods
                        .iter()
                        .filter(|m| m.body.is_some())
                        .map(|m| (m.name.clone(), Rc::new(m.clone())))
                        .collect();
                    self.trait_defaults.insert(t.name.clone(), defaults);
                }
                Item::Impl(i) => {
                    let target = self.resolve_alias(&i.target);
                    let Some(key) = type_key_of(&target) else {
                        continue;
                    };
                    if let Some(t) = i.trait_name() {
                        self.impls_of.entry(key.clone()).or_default().push(t.to_string());
                    }
                    for m in &i.methods {
                        let def = Rc::new(m.clone());
                        let mk = (key.clone(), m.name.clone());
                        match i.trait_name() {
                            Some(t) => self.trait_impls.entry(mk).or_default().push((t.to_string(), def)),
                            None => {
                                self.inherent.insert(mk, def);
                            }
                        }
                    }
                }
                Item::TypeAlias(a) => {
                    self.aliases.insert(a.name.clone(), a.target.clone());
                }
                Item::Macro(_) | Item::Use(_) => {}
            }
        }
    }

    fn resolve_alias(&self, t: &TypeTerm) -> TypeTerm {
        let mut t = t.clone();
        for _ in 0..16 {
            match t.head_name().and_then(|n| self.aliases.get(n)) {
                Some(target) => t = target.clone(),
                None => break,
            }
        }
        t
    }

    fn call_entry(&mut self, entry: &str) -> Result<Value, RuntimeError> {
        let def = match self.fns.get(entry) {
            Some(d) if d.params.is_empty() => d.clone(),
            _ => return Err(RuntimeError::new(K::MissingEntry(entry.into()), SourceSpan::default())),
        };
        match self.call_fn(&def, None, Vec::new(), def.span) {
            Ok(v) => Ok(v),
            Err(Flow::Fail(e)) => Err(e),
            Err(_) => unreachable!("call_fn absorbs control flow"),
        }
    }

    // ----- environment ----------------------------------------------------

    fn lookup(&self, name: &str) -> Option<Slot> {
        self.scopes.iter().rev().find_map(|s| s.get(name).cloned())
    }

    fn declare(&mut self, name: &str, v: Value) {
        self.scopes
            .last_mut()
            .expect("no scope")
            .insert(name.to_string(), slot(v));
    }

    fn read(&self, p: &Place, span: SourceSpan) -> Eval<Value> {
        place::read(p).at(span)
    }

    fn variant(&self, p: &Path) -> Option<&VariantInfo> {
        let info = self.variants.get(p.last())?;
        match p.segments.as_slice() {
            [_] => Some(info),
            [.., owner, _] if *owner == info.enum_name => Some(info),
            _ => None,
        }
    }

    fn is_unit_variant(&self, name: &str) -> bool {
        self.variants.get(name).is_some_and(|v| v.payload.is_empty())
    }

    fn coerce(&self, v: Value, ty: &TypeTerm) -> Value {
        let ty = self.resolve_alias(ty);
        match (v, &ty) {
            (Value::Int(x, IntTy::Untyped), t) => match t.head_name().and_then(IntTy::from_name) {
                Some(it) => Value::Int(it.normalize(x), it),
                None => Value::Int(x, IntTy::Untyped),
            },
            (Value::Float(x, FloatTy::Untyped), t) => match t.head_name().and_then(FloatTy::from_name) {
                Some(ft) => Value::Float(ft.round(x), ft),
                None => Value::Float(x, FloatTy::Untyped),
            },
            (Value::Tuple(xs), TypeTerm::Tuple(ts)) if xs.len() == ts.len() => {
                Value::Tuple(xs.into_iter().zip(ts).map(|(x, t)| self.coerce(x, t)).collect())
            }
            (Value::Vector(xs), TypeTerm::Path { args, .. }) if ty.head_name() == Some("Vec") && args.len() == 1 => {
                Value::Vector(xs.into_iter().map(|x| self.coerce(x, &args[0])).collect())
            }
            (Value::Box(cell), TypeTerm::Path { args, .. }) if ty.is_box() && args.len() == 1 => {
                let inner = cell.borrow().clone();
                *cell.borrow_mut() = self.coerce(inner, &args[0]);
                Value::Box(cell)
            }
            (v, _) => v,
        }
    }

    // ----- calls ----------------------------------------------------------

    fn call_fn(&mut self, def: &FnDef, self_val: Option<Value>, args: Vec<Value>, span: SourceSpan) -> Eval<Value> {
        if args.len() != def.params.len() {
            return Err(fail(
                K::ArityMismatch {
                    name: def.name.clone(),
                    expected: def.params.len(),
                    found: args.len(),
                },
                span,
            ));
        }
        let Some(body) = &def.body else {
            return Err(fail(
                K::NoMethodFound {
                    ty: "trait".into(),
                    name: def.name.clone(),
                },
                span,
            ));
        };
        let mut frame = HashMap::new();
        if let Some(s) = self_val {
            frame.insert("self".to_string(), slot(s));
        }
        for (p, a) in def.params.iter().zip(args) {
            frame.insert(p.name.clone(), slot(self.coerce(a, &p.ty)));
        }
        let v = self.enter(frame, |it| it.eval_block(body), span)?;
        Ok(match &def.ret {
            Some(t) => self.coerce(v, t),
            None => v,
        })
    }

    /// Runs `f` in a fresh call frame, absorbing `return`.
    fn enter(
        &mut self,
        frame: HashMap<String, Slot>,
        f: impl FnOnce(&mut Interp) -> Eval<Value>,
        span: SourceSpan,
    ) -> Eval<Value> {
        if self.depth >= MAX_DEPTH {
            return Err(fail(K::StackOverflow(MAX_DEPTH), span));
        }
        let saved = std::mem::replace(&mut self.scopes, vec![frame]);
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        self.scopes = saved;
        match r {
            Ok(v) | Err(Flow::Return(v)) => Ok(v),
            Err(Flow::Break) => Err(fail(K::StrayControl("break"), span)),
            Err(Flow::Continue) => Err(fail(K::StrayControl("continue"), span)),
            Err(e) => Err(e),
        }
    }

    fn call_value(&mut self, f: Value, args: Vec<Value>, span: SourceSpan) -> Eval<Value> {
        match f {
            Value::Closure(c) => {
                if c.params.len() != args.len() {
                    return Err(fail(
                        K::ArityMismatch {
                            name: "closure".into(),
                            expected: c.params.len(),
                            found: args.len(),
                        },
                        span,
                    ));
                }
                let mut frame = c.env.clone();
                for (p, a) in c.params.iter().zip(args) {
                    let a = match &p.ty {
                        Some(t) => self.coerce(a, t),
                        None => a,
                    };
                    frame.insert(p.name.clone(), slot(a));
                }
                self.enter(frame, |it| it.eval(&c.body), span)
            }
            Value::Func(name) => {
                let def = self.fns.get(&name).cloned().ok_or_else(|| fail(K::UnknownIdentifier(name), span))?;
                self.call_fn(&def, None, args, span)
            }
            v => Err(fail(K::TypeMismatch(format!("`{}` is not callable", v.type_key())), span)),
        }
    }

    fn call_path(&mut self, p: &Path, mut args: Vec<Value>, span: SourceSpan) -> Eval<Value> {
        let name = p.last();
        if p.segments.len() == 1 {
            if let Some(def) = self.fns.get(name).cloned() {
                return self.call_fn(&def, None, args, span);
            }
        }
        if let Some(info) = self.variant(p) {
            if info.payload.len() != args.len() {
                return Err(fail(
                    K::ArityMismatch {
                        name: name.into(),
                        expected: info.payload.len(),
                        found: args.len(),
                    },
                    span,
                ));
            }
            let payload = args.into_iter().zip(&info.payload).map(|(a, t)| self.coerce(a, t)).collect();
            return Ok(Value::Variant {
                enum_name: info.enum_name.clone(),
                name: name.into(),
                payload,
            });
        }
        if let [.., owner, _] = p.segments.as_slice() {
            if let Some(def) = self.inherent.get(&(impl_key(owner), name.to_string())).cloned() {
                let self_val = match def.receiver {
                    Some(_) if !args.is_empty() => Some(args.remove(0)),
                    _ => None,
                };
                return self.call_fn(&def, self_val, args, span);
            }
        }
        self.builtin_fn(p, args, span)
    }

    fn builtin_fn(&mut self, p: &Path, args: Vec<Value>, span: SourceSpan) -> Eval<Value> {
        let owner = p.segments.len().checked_sub(2).map(|i| p.segments[i].as_str());
        let mut args = args.into_iter().map(deref_full).collect::<Result<Vec<_>, _>>().at(span)?;
        match (owner, p.last(), args.len()) {
            (_, "range", 2) => match (&args[0], &args[1]) {
                (Value::Int(a, ta), Value::Int(b, tb)) => {
                    let ty = ops::unify(*ta, *tb);
                    Ok(Value::Range {
                        cur: ty.normalize(*a),
                        end: ty.normalize(*b),
                        ty,
                    })
                }
                _ => Err(fail(K::TypeMismatch("`range` expects integers".into()), span)),
            },
            (_, "sqrt", 1) => match &args[0] {
                Value::Float(x, t) => Ok(Value::Float(t.round(x.sqrt()), *t)),
                v => Err(fail(K::TypeMismatch(format!("`sqrt` of `{}`", v.type_key())), span)),
            },
            (Some("Rc" | "Arc"), "new", 1) => Ok(Value::Shared(Rc::new(args.remove(0)))),
            (Some("Box"), "new", 1) => Ok(Value::Box(slot(args.remove(0)))),
            _ => Err(fail(K::UnknownIdentifier(p.joined()), span)),
        }
    }

    // ----- methods --------------------------------------------------------

    fn find_method(&self, key: &str, name: &str, span: SourceSpan) -> Eval<Option<Rc<FnDef>>> {
        let mk = (key.to_string(), name.to_string());
        if let Some(d) = self.inherent.get(&mk) {
            return Ok(Some(d.clone()));
        }
        if let Some(impls) = self.trait_impls.get(&mk) {
            return match impls.as_slice() {
                [(_, d)] => Ok(Some(d.clone())),
                _ => Err(fail(K::AmbiguousMethod(name.into()), span)),
            };
        }
        let defaults: Vec<_> = self
            .impls_of
            .get(key)
            .into_iter()
            .flatten()
            .filter_map(|t| self.trait_defaults.get(t).and_then(|m| m.get(name)))
            .collect();
        match defaults.as_slice() {
            [] => Ok(None),
            [d] => Ok(Some((*d).clone())),
            _ => Err(fail(K::AmbiguousMethod(name.into()), span)),
        }
    }

    /// Auto-references the receiver, then unwraps pointer layers until a
    /// type providing `name` is found.
    fn call_method(&mut self, recv: Place, name: &str, args: Vec<Value>, span: SourceSpan) -> Eval<Value> {
        let mut place = recv;
        loop {
            let v = self.read(&place, span)?;
            if v.is_pointer() {
                match (name, &v, args.len()) {
                    ("deref", _, 0) => return pointee(&v).at(span),
                    ("clone", Value::Shared(_), 0) => return Ok(v),
                    _ => {
                        place = place.project(Proj::Deref);
                        continue;
                    }
                }
            }
            if let Some(r) = self.builtin_method(&place, &v, name, &args, span)? {
                return Ok(r);
            }
            let key = v.type_key();
            if let Some(def) = self.find_method(&key, name, span)? {
                let self_val = match def.receiver {
                    Some(Receiver::Ref) => Value::Ref { place, mutable: false },
                    Some(Receiver::RefMut) => Value::Ref { place, mutable: true },
                    Some(Receiver::Value { .. }) => v,
                    None => {
                        return Err(fail(
                            K::TypeMismatch(format!("`{}::{}` is not a method", key, name)),
                            span,
                        ))
                    }
                };
                return self.call_fn(&def, Some(self_val), args, span);
            }
            if name == "deref" && args.is_empty() {
                return Ok(v);
            }
            return Err(fail(K::NoMethodFound { ty: key, name: name.into() }, span));
        }
    }

    fn index_of(&self, i: &Value, len: usize, span: SourceSpan) -> Eval<usize> {
        match deref_full(i.clone()).at(span)? {
            Value::Int(i, _) if i >= 0 && (i as u128) < len as u128 => Ok(i as usize),
            Value::Int(i, _) => Err(fail(K::IndexOutOfBounds { index: i, len }, span)),
            v => Err(fail(K::TypeMismatch(format!("index of type `{}`", v.type_key())), span)),
        }
    }

    fn builtin_method(
        &mut self,
        place: &Place,
        v: &Value,
        name: &str,
        args: &[Value],
        span: SourceSpan,
    ) -> Eval<Option<Value>> {
        if v.is_primitive() {
            if let (Some(op), [b]) = (binop_for_method(name), args) {
                let b = deref_full(b.clone()).at(span)?;
                return ops::binary(op, v, &b).map(Some).at(span);
            }
            if let (Some(op), []) = (unop_for_method(name), args) {
                return ops::unary(op, v).map(Some).at(span);
            }
        }
        let r = match (v, name, args) {
            (_, "clone", []) => v.deep_clone(),
            (Value::Vector(xs), "len", []) => Value::Int(xs.len() as i128, IntTy::Uint),
            (Value::Vector(xs), "is_empty", []) => Value::Bool(xs.is_empty()),
            (Value::Vector(xs), "get" | "get_mut", [i]) => {
                let i = self.index_of(i, xs.len(), span)?;
                Value::Ref {
                    place: place.project(Proj::Index(i)),
                    mutable: name == "get_mut",
                }
            }
            (Value::Vector(xs), "iter", []) => Value::Iter {
                items: Rc::new(xs.clone()),
                pos: 0,
            },
            (Value::Vector(_), "push", [x]) => {
                let mut x = Some(x.clone());
                place::with_value_mut(place, &mut |v| {
                    if let Value::Vector(xs) = v {
                        let x = x.take().expect("pushed once");
                        let x = match xs.first() {
                            Some(like) => place::adopt(x, like),
                            None => x,
                        };
                        xs.push(x);
                    }
                    Ok(())
                })
                .at(span)?;
                Value::Unit
            }
            (Value::Vector(_), "pop", []) => place::with_value_mut(place, &mut |v| match v {
                Value::Vector(xs) => Ok(xs.pop().map(Value::some).unwrap_or_else(Value::none)),
                _ => Ok(Value::none()),
            })
            .at(span)?,
            (Value::Str(s), "len", []) => Value::Int(s.len() as i128, IntTy::Uint),
            (Value::Range { .. } | Value::Iter { .. }, "next", []) => {
                place::with_value_mut(place, &mut |v| match v {
                    Value::Range { cur, end, ty } if *cur < *end => {
                        let x = Value::Int(*cur, *ty);
                        *cur += 1;
                        Ok(Value::some(x))
                    }
                    Value::Iter { items, pos } if *pos < items.len() => {
                        let x = items[*pos].clone();
                        *pos += 1;
                        Ok(Value::some(x))
                    }
                    _ => Ok(Value::none()),
                })
                .at(span)?
            }
            (Value::Float(x, t), "sqrt", []) => Value::Float(t.round(x.sqrt()), *t),
            (Value::Float(x, t), "abs", []) => Value::Float(x.abs(), *t),
            (Value::Int(x, t), "abs", []) => Value::Int(t.normalize(x.abs()), *t),
            _ => return Ok(None),
        };
        Ok(Some(r))
    }

    // ----- expressions ----------------------------------------------------

    fn eval_all(&mut self, xs: &[Expr]) -> Eval<Vec<Value>> {
        xs.iter().map(|x| self.eval(x)).collect()
    }

    fn eval_bool(&mut self, e: &Expr) -> Eval<bool> {
        let v = self.eval(e)?;
        match deref_full(v).at(e.span)? {
            Value::Bool(b) => Ok(b),
            v => Err(fail(K::TypeMismatch(format!("expected `bool`, found `{}`", v.type_key())), e.span)),
        }
    }

    fn lit(&self, l: &Lit) -> Value {
        match l {
            Lit::Int { value, suffix } if suffix.is_float() => {
                let x = value.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
                let t = float_ty(*suffix);
                Value::Float(t.round(x), t)
            }
            Lit::Int { value, suffix } => {
                let digits = value.to_u64_digits();
                let low = digits.first().copied().unwrap_or(0) as u128 | (digits.get(1).copied().unwrap_or(0) as u128) << 64;
                let t = int_ty(*suffix);
                Value::Int(t.normalize(low as i128), t)
            }
            Lit::Float { value, suffix } => {
                let t = float_ty(*suffix);
                Value::Float(t.round(*value), t)
            }
            Lit::Bool(b) => Value::Bool(*b),
            Lit::Char(c) => Value::Char(*c),
            Lit::Byte(b) => Value::Int(*b as i128, IntTy::U8),
            Lit::Str(s) => Value::Str(s.clone()),
            Lit::ByteStr(bs) => Value::Vector(bs.iter().map(|b| Value::Int(*b as i128, IntTy::U8)).collect()),
            Lit::Unit => Value::Unit,
        }
    }

    fn eval(&mut self, e: &Expr) -> Eval<Value> {
        match &e.kind {
            ExprKind::Lit(l) => Ok(self.lit(l)),
            ExprKind::Path(p) => self.path_value(p, e.span),
            ExprKind::Record { path, fields, base } => self.eval_record(path, fields, base.as_deref(), e.span),
            ExprKind::Tuple(xs) => Ok(Value::Tuple(self.eval_all(xs)?)),
            ExprKind::Array(xs) => Ok(Value::Vector(unify_elements(self.eval_all(xs)?))),
            ExprKind::ArrayRepeat { value, count } => {
                let v = self.eval(value)?;
                let n = match deref_full(self.eval(count)?).at(count.span)? {
                    Value::Int(n, _) if n >= 0 => n as usize,
                    v => return Err(fail(K::TypeMismatch(format!("repeat count `{}`", v)), count.span)),
                };
                Ok(Value::Vector((0..n).map(|_| v.deep_clone()).collect()))
            }
            ExprKind::Field { .. } | ExprKind::Index { .. } | ExprKind::Unary { op: UnOp::Deref, .. } => {
                let p = self.eval_place(e)?;
                self.read(&p, e.span)
            }
            ExprKind::Block(b) => self.eval_block(b),
            ExprKind::If { cond, then, els } => {
                if self.eval_bool(cond)? {
                    self.eval_block(then)
                } else if let Some(x) = els {
                    self.eval(x)
                } else {
                    Ok(Value::Unit)
                }
            }
            ExprKind::Match { scrutinee, arms } => self.eval_match(scrutinee, arms, e.span),
            ExprKind::Call { callee, args } => self.eval_call(callee, args, e.span),
            ExprKind::MethodCall { receiver, method, args } => {
                let recv = self.eval_place(receiver)?;
                let args = self.eval_all(args)?;
                self.call_method(recv, method, args, e.span)
            }
            ExprKind::Lambda { params, body } => {
                let mut env = HashMap::new();
                for s in &self.scopes {
                    env.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
                }
                Ok(Value::Closure(Rc::new(Closure {
                    params: params.clone(),
                    body: (**body).clone(),
                    env,
                })))
            }
            ExprKind::Binary { op, lhs, rhs } => self.eval_binary(*op, lhs, rhs, e.span),
            ExprKind::Unary { op, operand } => match op {
                UnOp::Ref | UnOp::RefMut => {
                    let place = self.eval_place(operand)?;
                    Ok(Value::Ref {
                        place,
                        mutable: *op == UnOp::RefMut,
                    })
                }
                _ => {
                    let v = self.eval(operand)?;
                    let d = deref_full(v.clone()).at(e.span)?;
                    if d.is_primitive() {
                        ops::unary(*op, &d).at(e.span)
                    } else {
                        let m = crate::desugar::unary_method(*op).expect("unary operator method");
                        self.call_method(Place::temp(v), m, Vec::new(), e.span)
                    }
                }
            },
            ExprKind::Assign { place, value } => {
                let v = self.eval(value)?;
                let p = self.eval_place(place)?;
                place::write(&p, v).at(e.span)?;
                Ok(Value::Unit)
            }
            ExprKind::CompoundAssign { op, place, value } => {
                let v = self.eval(value)?;
                let p = self.eval_place(place)?;
                let cur = self.read(&p, e.span)?;
                let r = self.apply_binary(*op, cur, v, e.span)?;
                place::write(&p, r).at(e.span)?;
                Ok(Value::Unit)
            }
            ExprKind::For { pat, iter, body } => self.eval_for(pat, iter, body, e.span),
            ExprKind::Loop(b) => {
                loop {
                    match self.eval_block(b) {
                        Ok(_) | Err(Flow::Continue) => {}
                        Err(Flow::Break) => break,
                        Err(f) => return Err(f),
                    }
                }
                Ok(Value::Unit)
            }
            ExprKind::While { cond, body } => {
                while self.eval_bool(cond)? {
                    match self.eval_block(body) {
                        Ok(_) | Err(Flow::Continue) => {}
                        Err(Flow::Break) => break,
                        Err(f) => return Err(f),
                    }
                }
                Ok(Value::Unit)
            }
            ExprKind::Break => Err(Flow::Break),
            ExprKind::Continue => Err(Flow::Continue),
            ExprKind::Return(v) => {
                let v = match v {
                    Some(v) => self.eval(v)?,
                    None => Value::Unit,
                };
                Err(Flow::Return(v))
            }
            ExprKind::Box { operand, .. } => Ok(Value::Box(slot(self.eval(operand)?))),
            ExprKind::MacroCall { name, .. } => Err(fail(K::UnknownIdentifier(format!("{}!", name)), e.span)),
            ExprKind::Builtin { mac, args } => self.eval_builtin(*mac, args, e.span),
        }
    }

    fn path_value(&mut self, p: &Path, span: SourceSpan) -> Eval<Value> {
        if let Some(s) = p.as_single().and_then(|n| self.lookup(n)) {
            return s.try_borrow().map(|v| v.clone()).map_err(|_| K::BorrowConflict).at(span);
        }
        if let Some(info) = self.variant(p) {
            if info.payload.is_empty() {
                return Ok(Value::Variant {
                    enum_name: info.enum_name.clone(),
                    name: p.last().into(),
                    payload: Vec::new(),
                });
            }
        }
        match p.as_single() {
            Some(n) if self.fns.contains_key(n) => Ok(Value::Func(n.into())),
            _ => Err(fail(K::UnknownIdentifier(p.joined()), span)),
        }
    }

    fn eval_place(&mut self, e: &Expr) -> Eval<Place> {
        match &e.kind {
            ExprKind::Path(p) => match p.as_single().and_then(|n| self.lookup(n)) {
                Some(s) => Ok(Place::of(s)),
                None => Ok(Place::temp(self.eval(e)?)),
            },
            ExprKind::Field { base, name } => {
                let p = self.eval_place(base)?;
                let p = self.auto_deref(p, e.span)?;
                let proj = match name.parse::<usize>() {
                    Ok(i) => Proj::Elem(i),
                    Err(_) => Proj::Field(name.clone()),
                };
                Ok(p.project(proj))
            }
            ExprKind::Index { base, index } => {
                let p = self.eval_place(base)?;
                let p = self.auto_deref(p, e.span)?;
                let i = self.eval(index)?;
                let len = place::with_value(&p, &mut |v| match v {
                    Value::Vector(xs) => Some(xs.len()),
                    _ => None,
                })
                .at(e.span)?;
                let Some(len) = len else {
                    return Err(fail(K::TypeMismatch("indexing a non-vector".into()), e.span));
                };
                let i = self.index_of(&i, len, e.span)?;
                Ok(p.project(Proj::Index(i)))
            }
            ExprKind::Unary {
                op: UnOp::Deref,
                operand,
            } => Ok(self.eval_place(operand)?.project(Proj::Deref)),
            _ => Ok(Place::temp(self.eval(e)?)),
        }
    }

    fn auto_deref(&self, mut p: Place, span: SourceSpan) -> Eval<Place> {
        while place::with_value(&p, &mut |v| v.is_pointer()).at(span)? {
            p = p.project(Proj::Deref);
        }
        Ok(p)
    }

    fn apply_binary(&mut self, op: BinOp, a: Value, b: Value, span: SourceSpan) -> Eval<Value> {
        let da = deref_full(a.clone()).at(span)?;
        if da.is_primitive() {
            let db = deref_full(b).at(span)?;
            return ops::binary(op, &da, &db).at(span);
        }
        match crate::desugar::binary_method(op) {
            Some(m) => self.call_method(Place::temp(a), m, vec![b], span),
            None => Err(fail(
                K::TypeMismatch(format!("cannot apply `{}` to `{}`", op.symbol(), da.type_key())),
                span,
            )),
        }
    }

    fn eval_binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr, span: SourceSpan) -> Eval<Value> {
        match op {
            BinOp::And => Ok(Value::Bool(self.eval_bool(lhs)? && self.eval_bool(rhs)?)),
            BinOp::Or => Ok(Value::Bool(self.eval_bool(lhs)? || self.eval_bool(rhs)?)),
            _ => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                self.apply_binary(op, a, b, span)
            }
        }
    }

    fn eval_call(&mut self, callee: &Expr, args: &[Expr], span: SourceSpan) -> Eval<Value> {
        if let ExprKind::Path(p) = &callee.kind {
            if p.as_single().and_then(|n| self.lookup(n)).is_none() {
                let args = self.eval_all(args)?;
                return self.call_path(p, args, span);
            }
        }
        let f = self.eval(callee)?;
        let args = self.eval_all(args)?;
        self.call_value(f, args, span)
    }

    fn eval_record(&mut self, path: &Path, inits: &[FieldInit], base: Option<&Expr>, span: SourceSpan) -> Eval<Value> {
        let name = path.last().to_string();
        let mut given = Vec::new();
        for f in inits {
            given.push((f.name.clone(), self.eval(&f.value)?));
        }
        let base_fields = match base {
            Some(b) => match deref_full(self.eval(b)?).at(b.span)? {
                Value::Record { fields, .. } => fields,
                v => return Err(fail(K::TypeMismatch(format!("update base `{}` is not a record", v)), b.span)),
            },
            None => Vec::new(),
        };
        let Some(def) = self.structs.get(&name) else {
            let mut fields = given;
            for (n, v) in base_fields {
                if !fields.iter().any(|(f, _)| *f == n) {
                    fields.push((n, v));
                }
            }
            return Ok(Value::Record { name, fields });
        };
        let mut fields = Vec::new();
        for fd in &def.fields {
            let v = match given.iter().position(|(n, _)| *n == fd.name) {
                Some(i) => given.remove(i).1,
                None => match base_fields.iter().find(|(n, _)| *n == fd.name) {
                    Some((_, v)) => v.clone(),
                    None => {
                        return Err(fail(
                            K::TypeMismatch(format!("missing field `{}` in `{}`", fd.name, name)),
                            span,
                        ))
                    }
                },
            };
            fields.push((fd.name.clone(), self.coerce(v, &fd.ty)));
        }
        if let Some((n, _)) = given.first() {
            return Err(fail(K::TypeMismatch(format!("`{}` has no field `{}`", name, n)), span));
        }
        Ok(Value::Record { name, fields })
    }

    fn eval_builtin(&mut self, mac: BuiltinMacro, args: &[Expr], span: SourceSpan) -> Eval<Value> {
        let vals = self.eval_all(args)?;
        match mac {
            BuiltinMacro::Vec => Ok(Value::Vector(unify_elements(vals))),
            BuiltinMacro::Println | BuiltinMacro::Print => {
                let text = match vals.split_first() {
                    None => String::new(),
                    Some((t, rest)) => match deref_full(t.clone()).at(span)? {
                        Value::Str(t) => render(&t, rest).at(span)?,
                        v => return Err(fail(K::BadFormat(format!("template must be a string, found `{}`", v)), span)),
                    },
                };
                self.out.push_str(&text);
                if mac == BuiltinMacro::Println {
                    self.out.push('\n');
                }
                Ok(Value::Unit)
            }
        }
    }

    // ----- blocks, loops, patterns ---------------------------------------

    fn eval_block(&mut self, b: &Block) -> Eval<Value> {
        self.scopes.push(HashMap::new());
        let r = self.block_body(b);
        self.scopes.pop();
        r
    }

    fn block_body(&mut self, b: &Block) -> Eval<Value> {
        for s in &b.stmts {
            match &s.kind {
                StmtKind::Let { pat, ty, init } => {
                    let v = match init {
                        Some(i) => self.eval(i)?,
                        None => Value::Unit,
                    };
                    let v = match ty {
                        Some(t) => self.coerce(v, t),
                        None => v,
                    };
                    self.bind_irrefutable(pat, v, s.span)?;
                }
                StmtKind::Expr { expr, .. } => {
                    self.eval(expr)?;
                }
            }
        }
        match &b.tail {
            Some(t) => self.eval(t),
            None => Ok(Value::Unit),
        }
    }

    fn bind_irrefutable(&mut self, pat: &Pattern, v: Value, span: SourceSpan) -> Eval<()> {
        if let PatKind::Binding { name, by_ref: false, .. } = &pat.kind {
            if !self.is_unit_variant(name) {
                self.declare(name, v);
                return Ok(());
            }
        }
        let place = Place::temp(v.clone());
        let mut binds = Vec::new();
        if !self.match_pattern(pat, &v, &place, &mut binds).at(span)? {
            return Err(fail(K::RefutablePattern(v.to_string()), span));
        }
        for (n, v) in binds {
            self.declare(&n, v);
        }
        Ok(())
    }

    fn eval_for(&mut self, pat: &Pattern, iter: &Expr, body: &Block, span: SourceSpan) -> Eval<Value> {
        let it = Place::temp(self.eval(iter)?);
        loop {
            let next = self.call_method(it.clone(), "next", Vec::new(), span)?;
            let item = match deref_full(next).at(span)? {
                Value::Variant { name, payload, .. } if name == "None" && payload.is_empty() => break,
                Value::Variant { name, mut payload, .. } if name == "Some" && payload.len() == 1 => payload.remove(0),
                v => return Err(fail(K::BadIterator(v.to_string()), span)),
            };
            self.scopes.push(HashMap::new());
            let r = self.bind_irrefutable(pat, item, span).and_then(|_| self.eval_block(body));
            self.scopes.pop();
            match r {
                Ok(_) | Err(Flow::Continue) => {}
                Err(Flow::Break) => break,
                Err(f) => return Err(f),
            }
        }
        Ok(Value::Unit)
    }

    fn eval_match(&mut self, scrutinee: &Expr, arms: &[Arm], span: SourceSpan) -> Eval<Value> {
        let place = self.eval_place(scrutinee)?;
        let v = self.read(&place, scrutinee.span)?;
        for arm in arms {
            let mut binds = Vec::new();
            if !self.match_pattern(&arm.pat, &v, &place, &mut binds).at(arm.span)? {
                continue;
            }
            self.scopes.push(binds.into_iter().map(|(n, v)| (n, slot(v))).collect());
            let guard_ok = match &arm.guard {
                Some(g) => self.eval_bool(g),
                None => Ok(true),
            };
            let r = match guard_ok {
                Ok(true) => Some(self.eval(&arm.body)),
                Ok(false) => None,
                Err(f) => Some(Err(f)),
            };
            self.scopes.pop();
            if let Some(r) = r {
                return r;
            }
        }
        Err(fail(K::NonExhaustiveMatch(v.to_string()), span))
    }

    fn match_pattern(&self, pat: &Pattern, v: &Value, place: &Place, out: &mut Vec<(String, Value)>) -> Result<bool, K> {
        let strip = |v: &Value, place: &Place| -> Result<(Value, Place), K> {
            let mut v = v.clone();
            let mut place = place.clone();
            while v.is_pointer() {
                v = pointee(&v)?;
                place = place.project(Proj::Deref);
            }
            Ok((v, place))
        };
        match &pat.kind {
            PatKind::Wild => Ok(true),
            PatKind::Lit { lit, negative } => {
                let mut l = self.lit(lit);
                if *negative {
                    l = ops::unary(UnOp::Neg, &l)?;
                }
                Ok(values_equal(&l, &deref_full(v.clone())?))
            }
            PatKind::Binding { name, mutable, by_ref } => {
                if !by_ref && !mutable && self.is_unit_variant(name) {
                    let (v, _) = strip(v, place)?;
                    return Ok(matches!(&v, Value::Variant { name: n, .. } if n == name));
                }
                let bound = if *by_ref {
                    Value::Ref {
                        place: place.clone(),
                        mutable: *mutable,
                    }
                } else {
                    v.clone()
                };
                out.push((name.clone(), bound));
                Ok(true)
            }
            PatKind::At { name, sub } => {
                if !self.match_pattern(sub, v, place, out)? {
                    return Ok(false);
                }
                out.push((name.clone(), v.clone()));
                Ok(true)
            }
            PatKind::Tuple(ps) => {
                let (v, place) = strip(v, place)?;
                match &v {
                    Value::Tuple(xs) if xs.len() == ps.len() => self.match_all(ps, xs, &place, out),
                    _ => Ok(false),
                }
            }
            PatKind::Variant { path, subpats } => {
                let (v, place) = strip(v, place)?;
                match &v {
                    Value::Variant { name, payload, .. } if name == path.last() && payload.len() == subpats.len() => {
                        self.match_all(subpats, payload, &place, out)
                    }
                    _ => Ok(false),
                }
            }
            PatKind::Record { path, fields, .. } => {
                let (v, place) = strip(v, place)?;
                let Value::Record { name, fields: fs } = &v else {
                    return Ok(false);
                };
                if name != path.last() {
                    return Ok(false);
                }
                for (fname, fp) in fields {
                    let Some((_, fv)) = fs.iter().find(|(n, _)| n == fname) else {
                        return Ok(false);
                    };
                    if !self.match_pattern(fp, fv, &place.project(Proj::Field(fname.clone())), out)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            PatKind::Ref { sub, .. } => {
                if v.is_pointer() {
                    self.match_pattern(sub, &pointee(v)?, &place.project(Proj::Deref), out)
                } else {
                    self.match_pattern(sub, v, place, out)
                }
            }
            PatKind::Or(alts) => {
                for a in alts {
                    let mark = out.len();
                    if self.match_pattern(a, v, place, out)? {
                        return Ok(true);
                    }
                    out.truncate(mark);
                }
                Ok(false)
            }
        }
    }

    fn match_all(&self, ps: &[Pattern], xs: &[Value], place: &Place, out: &mut Vec<(String, Value)>) -> Result<bool, K> {
        for (i, (p, x)) in ps.iter().zip(xs).enumerate() {
            if !self.match_pattern(p, x, &place.project(Proj::Elem(i)), out)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
