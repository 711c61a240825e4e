//! Runtime values and places.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::syntax::{Expr, LambdaParam};

/// A mutable storage location: a variable, a box interior or a temporary.
pub type Slot = Rc<RefCell<Value>>;

pub fn slot(v: Value) -> Slot {
    Rc::new(RefCell::new(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntTy {
    I8,
    I16,
    I32,
    I64,
    U8,
    U16,
    U32,
    U64,
    /// Machine-width signed (`int`, suffix `i`).
    Int,
    /// Machine-width unsigned (`uint`, suffix `u`).
    Uint,
    /// A literal without suffix; behaves as `int` until it meets a typed operand.
    Untyped,
}

impl IntTy {
    pub fn bits(self) -> u32 {
        match self {
            IntTy::I8 | IntTy::U8 => 8,
            IntTy::I16 | IntTy::U16 => 16,
            IntTy::I32 | IntTy::U32 => 32,
            _ => 64,
        }
    }

    pub fn signed(self) -> bool {
        matches!(self, IntTy::I8 | IntTy::I16 | IntTy::I32 | IntTy::I64 | IntTy::Int | IntTy::Untyped)
    }

    pub fn from_name(name: &str) -> Option<IntTy> {
        Some(match name {
            "i8" => IntTy::I8,
            "i16" => IntTy::I16,
            "i32" => IntTy::I32,
            "i64" => IntTy::I64,
            "u8" => IntTy::U8,
            "u16" => IntTy::U16,
            "u32" => IntTy::U32,
            "u64" => IntTy::U64,
            "int" | "isize" => IntTy::Int,
            "uint" | "usize" => IntTy::Uint,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            IntTy::I8 => "i8",
            IntTy::I16 => "i16",
            IntTy::I32 => "i32",
            IntTy::I64 => "i64",
            IntTy::U8 => "u8",
            IntTy::U16 => "u16",
            IntTy::U32 => "u32",
            IntTy::U64 => "u64",
            IntTy::Int | IntTy::Untyped => "int",
            IntTy::Uint => "uint",
        }
    }

    /// Reduces `v` modulo 2^bits into this type's two's-complement range.
    pub fn normalize(self, v: i128) -> i128 {
        let bits = self.bits();
        let mask = (1u128 << bits) - 1;
        let u = (v as u128) & mask;
        if self.signed() && (u >> (bits - 1)) & 1 == 1 {
            u as i128 - (1i128 << bits)
        } else {
            u as i128
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloatTy {
    F32,
    F64,
    Untyped,
}

impl FloatTy {
    pub fn from_name(name: &str) -> Option<FloatTy> {
        match name {
            "f32" => Some(FloatTy::F32),
            "f64" | "float" => Some(FloatTy::F64),
            _ => None,
        }
    }

    /// Rounds to the representable set of this width.
    pub fn round(self, v: f64) -> f64 {
        match self {
            FloatTy::F32 => v as f32 as f64,
            _ => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proj {
    Field(String),
    /// Tuple element or variant payload position.
    Elem(usize),
    /// Vector element.
    Index(usize),
    Deref,
}

#[derive(Debug, Clone)]
pub struct Place {
    pub root: Slot,
    pub path: Vec<Proj>,
}

impl Place {
    pub fn of(root: Slot) -> Place {
        Place { root, path: Vec::new() }
    }

    pub fn temp(v: Value) -> Place {
        Place::of(slot(v))
    }

    pub fn project(&self, p: Proj) -> Place {
        let mut path = self.path.clone();
        path.push(p);
        Place {
            root: self.root.clone(),
            path,
        }
    }
}

#[derive(Debug)]
pub struct Closure {
    pub params: Vec<LambdaParam>,
    pub body: Expr,
    pub env: HashMap<String, Slot>,
}

#[derive(Debug, Clone)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i128, IntTy),
    Float(f64, FloatTy),
    Char(char),
    Str(String),
    Tuple(Vec<Value>),
    Record {
        name: String,
        fields: Vec<(String, Value)>,
    },
    Variant {
        enum_name: String,
        name: String,
        payload: Vec<Value>,
    },
    Vector(Vec<Value>),
    Closure(Rc<Closure>),
    /// A named top-level function used as a value.
    Func(String),
    /// Uniquely owned heap cell.
    Box(Slot),
    /// Reference-counted immutable cell.
    Shared(Rc<Value>),
    Ref {
        place: Place,
        mutable: bool,
    },
    Range {
        cur: i128,
        end: i128,
        ty: IntTy,
    },
    Iter {
        items: Rc<Vec<Value>>,
        pos: usize,
    },
}

impl Value {
    pub fn is_pointer(&self) -> bool {
        matches!(self, Value::Box(_) | Value::Shared(_) | Value::Ref { .. })
    }

    /// Primitive values get builtin operator implementations.
    pub fn is_primitive(&self) -> bool {
        matches!(
            self,
            Value::Unit
                | Value::Bool(_)
                | Value::Int(..)
                | Value::Float(..)
                | Value::Char(_)
                | Value::Str(_)
                | Value::Tuple(_)
                | Value::Vector(_)
        )
    }

    pub fn int(v: i128) -> Value {
        Value::Int(v, IntTy::Untyped)
    }

    pub fn some(v: Value) -> Value {
        Value::Variant {
            enum_name: "Option".into(),
            name: "Some".into(),
            payload: vec![v],
        }
    }

    pub fn none() -> Value {
        Value::Variant {
            enum_name: "Option".into(),
            name: "None".into(),
            payload: Vec::new(),
        }
    }

    /// Name under which impl blocks for this value's type are registered.
    pub fn type_key(&self) -> String {
        match self {
            Value::Unit => "()".into(),
            Value::Bool(_) => "bool".into(),
            Value::Int(_, t) => match t {
                IntTy::I64 => "int".into(),
                IntTy::U64 => "uint".into(),
                t => t.name().into(),
            },
            Value::Float(_, FloatTy::F32) => "f32".into(),
            Value::Float(..) => "f64".into(),
            Value::Char(_) => "char".into(),
            Value::Str(_) => "str".into(),
            Value::Tuple(_) => "tuple".into(),
            Value::Record { name, .. } => name.clone(),
            Value::Variant { enum_name, .. } => enum_name.clone(),
            Value::Vector(_) => "Vec".into(),
            Value::Closure(_) | Value::Func(_) => "fn".into(),
            Value::Box(_) => "Box".into(),
            Value::Shared(_) => "Rc".into(),
            Value::Ref { .. } => "&".into(),
            Value::Range { .. } => "Range".into(),
            Value::Iter { .. } => "Iter".into(),
        }
    }

    /// Copy with fresh box cells, as `clone()` on an owned tree.
    pub fn deep_clone(&self) -> Value {
        match self {
            Value::Box(cell) => Value::Box(slot(cell.borrow().deep_clone())),
            Value::Tuple(xs) => Value::Tuple(xs.iter().map(Value::deep_clone).collect()),
            Value::Vector(xs) => Value::Vector(xs.iter().map(Value::deep_clone).collect()),
            Value::Record { name, fields } => Value::Record {
                name: name.clone(),
                fields: fields.iter().map(|(n, v)| (n.clone(), v.deep_clone())).collect(),
            },
            Value::Variant {
                enum_name,
                name,
                payload,
            } => Value::Variant {
                enum_name: enum_name.clone(),
                name: name.clone(),
                payload: payload.iter().map(Value::deep_clone).collect(),
            },
            v => v.clone(),
        }
    }
}

/// Structural equality that looks through pointers and ignores integer width.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    use Value::*;
    match (a, b) {
        (Box(c), _) => values_equal(&c.borrow(), b),
        (_, Box(c)) => values_equal(a, &c.borrow()),
        (Shared(r), _) => values_equal(r, b),
        (_, Shared(r)) => values_equal(a, r),
        (Unit, Unit) => true,
        (Bool(x), Bool(y)) => x == y,
        (Int(x, _), Int(y, _)) => x == y,
        (Float(x, _), Float(y, _)) => x == y,
        (Char(x), Char(y)) => x == y,
        (Str(x), Str(y)) => x == y,
        (Tuple(xs), Tuple(ys)) | (Vector(xs), Vector(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_equal(x, y))
        }
        (Record { name: n1, fields: f1 }, Record { name: n2, fields: f2 }) => {
            n1 == n2 && f1.len() == f2.len() && f1.iter().zip(f2).all(|(x, y)| x.0 == y.0 && values_equal(&x.1, &y.1))
        }
        (
            Variant {
                name: n1, payload: p1, ..
            },
            Variant {
                name: n2, payload: p2, ..
            },
        ) => n1 == n2 && p1.len() == p2.len() && p1.iter().zip(p2).all(|(x, y)| values_equal(x, y)),
        (Range { cur: c1, end: e1, .. }, Range { cur: c2, end: e2, .. }) => c1 == c2 && e1 == e2,
        _ => false,
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[Value]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", x)?;
    }
    Ok(())
}

/// The `{}` rendering used by `println!`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{}", b),
            Value::Int(v, _) => write!(f, "{}", v),
            Value::Float(v, FloatTy::F32) => write!(f, "{}", *v as f32),
            Value::Float(v, _) => write!(f, "{}", v),
            Value::Char(c) => write!(f, "{}", c),
            Value::Str(s) => write!(f, "{}", s),
            Value::Tuple(xs) => {
                write!(f, "(")?;
                write_list(f, xs)?;
                if xs.len() == 1 {
                    write!(f, ",")?;
                }
                write!(f, ")")
            }
            Value::Record { name, fields } => {
                write!(f, "{} {{ ", name)?;
                for (i, (n, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}: {}", n, v)?;
                }
                write!(f, " }}")
            }
            Value::Variant { name, payload, .. } => {
                write!(f, "{}", name)?;
                if !payload.is_empty() {
                    write!(f, "(")?;
                    write_list(f, payload)?;
                    write!(f, ")")?;
                }
                Ok(())
            }
            Value::Vector(xs) => {
                write!(f, "[")?;
                write_list(f, xs)?;
                write!(f, "]")
            }
            Value::Closure(_) => write!(f, "<closure>"),
            Value::Func(n) => write!(f, "<fn {}>", n),
            Value::Box(c) => write!(f, "{}", c.borrow()),
            Value::Shared(v) => write!(f, "{}", v),
            Value::Ref { place, .. } => match super::place::read(place) {
                Ok(v) => write!(f, "{}", v),
                Err(_) => write!(f, "<dangling>"),
            },
            Value::Range { cur, end, .. } => write!(f, "range({}, {})", cur, end),
            Value::Iter { .. } => write!(f, "<iter>"),
        }
    }
}
