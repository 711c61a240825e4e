//! Program tree.
//!
//! Every node carries a span, but equality is structural: spans are ignored
//! by `PartialEq` so that a tree and its pretty-printed re-parse compare equal.

use num_bigint::BigUint;

use crate::lexer::{Suffix, Token};
use crate::span::SourceSpan;

macro_rules! spanned_eq {
    ($ty:ident, $($field:ident),+) => {
        impl PartialEq for $ty {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)+
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Fn(FnDef),
    Struct(StructDef),
    Enum(EnumDef),
    Trait(TraitDef),
    Impl(ImplBlock),
    Macro(MacroItem),
    TypeAlias(TypeAlias),
    Use(UseItem),
}

impl Item {
    pub fn span(&self) -> SourceSpan {
        match self {
            Item::Fn(f) => f.span,
            Item::Struct(s) => s.span,
            Item::Enum(e) => e.span,
            Item::Trait(t) => t.span,
            Item::Impl(i) => i.span,
            Item::Macro(m) => m.span,
            Item::TypeAlias(t) => t.span,
            Item::Use(u) => u.span,
        }
    }
}

/// How a method takes `self`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Value { mutable: bool },
    Ref,
    RefMut,
}

#[derive(Debug, Clone)]
pub struct FnDef {
    pub name: String,
    pub type_params: Vec<String>,
    pub receiver: Option<Receiver>,
    pub params: Vec<Param>,
    pub ret: Option<TypeTerm>,
    /// `None` for a trait method signature without a default body.
    pub body: Option<Block>,
    pub span: SourceSpan,
}
spanned_eq!(FnDef, name, type_params, receiver, params, ret, body);

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub mutable: bool,
    pub ty: TypeTerm,
    pub span: SourceSpan,
}
spanned_eq!(Param, name, mutable, ty);

#[derive(Debug, Clone)]
pub struct StructDef {
    pub name: String,
    pub type_params: Vec<String>,
    pub fields: Vec<FieldDef>,
    pub span: SourceSpan,
}
spanned_eq!(StructDef, name, type_params, fields);

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDef {
    pub name: String,
    pub ty: TypeTerm,
}

#[derive(Debug, Clone)]
pub struct EnumDef {
    pub name: String,
    pub type_params: Vec<String>,
    pub variants: Vec<VariantDef>,
    pub span: SourceSpan,
}
spanned_eq!(EnumDef, name, type_params, variants);

#[derive(Debug, Clone, PartialEq)]
pub struct VariantDef {
    pub name: String,
    pub payload: Vec<TypeTerm>,
}

#[derive(Debug, Clone)]
pub struct TraitDef {
    pub name: String,
    pub type_params: Vec<String>,
    pub methods: Vec<FnDef>,
    pub span: SourceSpan,
}
spanned_eq!(TraitDef, name, type_params, methods);

#[derive(Debug, Clone)]
pub struct ImplBlock {
    pub type_params: Vec<String>,
    pub trait_ref: Option<TypeTerm>,
    pub target: TypeTerm,
    pub methods: Vec<FnDef>,
    pub span: SourceSpan,
}
spanned_eq!(ImplBlock, type_params, trait_ref, target, methods);

impl ImplBlock {
    pub fn trait_name(&self) -> Option<&str> {
        self.trait_ref.as_ref().and_then(TypeTerm::head_name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delim {
    Paren,
    Bracket,
    Brace,
}

impl Delim {
    pub fn open(self) -> &'static str {
        match self {
            Delim::Paren => "(",
            Delim::Bracket => "[",
            Delim::Brace => "{",
        }
    }

    pub fn close(self) -> &'static str {
        match self {
            Delim::Paren => ")",
            Delim::Bracket => "]",
            Delim::Brace => "}",
        }
    }

    pub fn from_open(text: &str) -> Option<Delim> {
        match text {
            "(" => Some(Delim::Paren),
            "[" => Some(Delim::Bracket),
            "{" => Some(Delim::Brace),
            _ => None,
        }
    }
}

/// `macro_rules! name ( ... )`; the rule body is kept as raw tokens and
/// interpreted by the macro engine.
#[derive(Debug, Clone)]
pub struct MacroItem {
    pub name: String,
    pub delim: Delim,
    pub body: Vec<Token>,
    pub span: SourceSpan,
}
spanned_eq!(MacroItem, name, delim, body);

#[derive(Debug, Clone)]
pub struct TypeAlias {
    pub name: String,
    pub type_params: Vec<String>,
    pub target: TypeTerm,
    pub span: SourceSpan,
}
spanned_eq!(TypeAlias, name, type_params, target);

#[derive(Debug, Clone)]
pub struct UseItem {
    pub path: Vec<String>,
    pub span: SourceSpan,
}
spanned_eq!(UseItem, path);

/// Uninterpreted type annotation.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeTerm {
    Path { segments: Vec<String>, args: Vec<TypeTerm> },
    Ref { mutable: bool, inner: Box<TypeTerm> },
    Tuple(Vec<TypeTerm>),
    Slice(Box<TypeTerm>),
    Closure { params: Vec<TypeTerm>, ret: Option<Box<TypeTerm>> },
}

impl TypeTerm {
    pub fn named(name: &str) -> TypeTerm {
        TypeTerm::Path {
            segments: vec![name.to_string()],
            args: Vec::new(),
        }
    }

    /// Last path segment, for path types.
    pub fn head_name(&self) -> Option<&str> {
        match self {
            TypeTerm::Path { segments, .. } => segments.last().map(String::as_str),
            _ => None,
        }
    }

    pub fn is_box(&self) -> bool {
        self.head_name() == Some("Box")
    }

    pub fn is_rc(&self) -> bool {
        matches!(self.head_name(), Some("Rc" | "Arc"))
    }

    /// `Some(mutable)` for `&T` / `&mut T`.
    pub fn ref_mutability(&self) -> Option<bool> {
        match self {
            TypeTerm::Ref { mutable, .. } => Some(*mutable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub tail: Option<Box<Expr>>,
    pub span: SourceSpan,
}
spanned_eq!(Block, stmts, tail);

impl Block {
    pub fn empty(span: SourceSpan) -> Block {
        Block {
            stmts: Vec::new(),
            tail: None,
            span,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}
spanned_eq!(Stmt, kind);

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Let {
        pat: Pattern,
        ty: Option<TypeTerm>,
        init: Option<Expr>,
    },
    /// `semi` records whether the statement ended with `;`. Block-like
    /// expressions may appear without one.
    Expr { expr: Expr, semi: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub segments: Vec<String>,
}

impl Path {
    pub fn single(name: impl Into<String>) -> Path {
        Path {
            segments: vec![name.into()],
        }
    }

    pub fn as_single(&self) -> Option<&str> {
        match self.segments.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }

    pub fn last(&self) -> &str {
        self.segments.last().map(String::as_str).unwrap_or("")
    }

    pub fn joined(&self) -> String {
        self.segments.join("::")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lit {
    Int { value: BigUint, suffix: Suffix },
    Float { value: f64, suffix: Suffix },
    Bool(bool),
    Char(char),
    Byte(u8),
    Str(String),
    ByteStr(Vec<u8>),
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 18] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Rem,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Le,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    /// Left and right binding power; higher binds tighter.
    pub fn binding_power(self) -> (u8, u8) {
        match self {
            BinOp::Or => (3, 4),
            BinOp::And => (5, 6),
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => (7, 8),
            BinOp::BitOr => (9, 10),
            BinOp::BitXor => (11, 12),
            BinOp::BitAnd => (13, 14),
            BinOp::Shl | BinOp::Shr => (15, 16),
            BinOp::Add | BinOp::Sub => (17, 18),
            BinOp::Mul | BinOp::Div | BinOp::Rem => (19, 20),
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge)
    }

    pub fn is_arithmetic(self) -> bool {
        !self.is_comparison() && !matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Deref,
    Ref,
    RefMut,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
            UnOp::Deref => "*",
            UnOp::Ref => "&",
            UnOp::RefMut => "&mut ",
        }
    }
}

/// Macros the interpreter implements directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinMacro {
    Println,
    Print,
    Vec,
}

impl BuiltinMacro {
    pub fn from_name(name: &str) -> Option<BuiltinMacro> {
        match name {
            "println" => Some(BuiltinMacro::Println),
            "print" => Some(BuiltinMacro::Print),
            "vec" => Some(BuiltinMacro::Vec),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BuiltinMacro::Println => "println",
            BuiltinMacro::Print => "print",
            BuiltinMacro::Vec => "vec",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}
spanned_eq!(Expr, kind);

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Expr {
        Expr { kind, span }
    }

    /// Expressions that end in a block and may stand as statements without `;`.
    pub fn is_block_like(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Block(_)
                | ExprKind::If { .. }
                | ExprKind::Match { .. }
                | ExprKind::Loop(_)
                | ExprKind::While { .. }
                | ExprKind::For { .. }
        )
    }

    pub fn path_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Path(p) => p.as_single(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Lit(Lit),
    Path(Path),
    Record {
        path: Path,
        fields: Vec<FieldInit>,
        base: Option<Box<Expr>>,
    },
    Tuple(Vec<Expr>),
    Field {
        base: Box<Expr>,
        name: String,
    },
    Array(Vec<Expr>),
    ArrayRepeat {
        value: Box<Expr>,
        count: Box<Expr>,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
    Block(Block),
    If {
        cond: Box<Expr>,
        then: Block,
        els: Option<Box<Expr>>,
    },
    Match {
        scrutinee: Box<Expr>,
        arms: Vec<Arm>,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    MethodCall {
        receiver: Box<Expr>,
        method: String,
        args: Vec<Expr>,
    },
    Lambda {
        params: Vec<LambdaParam>,
        body: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnOp,
        operand: Box<Expr>,
    },
    Assign {
        place: Box<Expr>,
        value: Box<Expr>,
    },
    CompoundAssign {
        op: BinOp,
        place: Box<Expr>,
        value: Box<Expr>,
    },
    For {
        pat: Pattern,
        iter: Box<Expr>,
        body: Block,
    },
    Loop(Block),
    While {
        cond: Box<Expr>,
        body: Block,
    },
    Break,
    Continue,
    Return(Option<Box<Expr>>),
    Box {
        allocator: Option<String>,
        operand: Box<Expr>,
    },
    /// Unexpanded invocation; the interior is kept as raw tokens.
    MacroCall {
        name: String,
        delim: Delim,
        tokens: Vec<Token>,
    },
    /// A builtin macro after expansion, with parsed arguments.
    Builtin {
        mac: BuiltinMacro,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone)]
pub struct FieldInit {
    pub name: String,
    pub value: Expr,
    pub span: SourceSpan,
}
spanned_eq!(FieldInit, name, value);

#[derive(Debug, Clone)]
pub struct Arm {
    pub pat: Pattern,
    pub guard: Option<Expr>,
    pub body: Expr,
    pub span: SourceSpan,
}
spanned_eq!(Arm, pat, guard, body);

#[derive(Debug, Clone)]
pub struct LambdaParam {
    pub name: String,
    pub ty: Option<TypeTerm>,
    pub span: SourceSpan,
}
spanned_eq!(LambdaParam, name, ty);

#[derive(Debug, Clone)]
pub struct Pattern {
    pub kind: PatKind,
    pub span: SourceSpan,
}
spanned_eq!(Pattern, kind);

impl Pattern {
    pub fn new(kind: PatKind, span: SourceSpan) -> Pattern {
        Pattern { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatKind {
    Wild,
    Lit { lit: Lit, negative: bool },
    /// A bare identifier. When the name is a unit variant in scope the
    /// pattern matches that variant instead of binding.
    Binding { name: String, mutable: bool, by_ref: bool },
    At { name: String, sub: Box<Pattern> },
    Tuple(Vec<Pattern>),
    Variant { path: Path, subpats: Vec<Pattern> },
    Record { path: Path, fields: Vec<(String, Pattern)>, rest: bool },
    Ref { mutable: bool, sub: Box<Pattern> },
    Or(Vec<Pattern>),
}
