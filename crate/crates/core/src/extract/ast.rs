//! Syntax tree for the supported Java subset.
//!
//! The tree keeps exactly what dependence counting needs: declarations with
//! their declared types, and statement/expression structure detailed enough
//! to find method calls and resolve their receivers from declared types.
//! Everything else (operators, literal values, generic type arguments) is
//! deliberately flattened.

use crate::graph::ModuleKind;

/// A parsed source file.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    /// Label used in diagnostics, usually the file path.
    pub path: String,
    pub package: Option<String>,
    /// Raw import lines, kept for information only; name resolution follows
    /// the qualified-then-unique-simple-name rule and does not consult them.
    pub imports: Vec<String>,
    /// Top-level type declarations.
    pub types: Vec<TypeDecl>,
}

impl SourceUnit {
    /// Qualified name of a top-level declaration in this unit.
    pub fn qualified_name(&self, decl: &TypeDecl) -> String {
        match &self.package {
            Some(pkg) => format!("{pkg}.{}", decl.name),
            None => decl.name.clone(),
        }
    }
}

/// A class or interface declaration (top-level, nested, or local).
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub kind: ModuleKind,
    /// Type parameter names; they shadow project types inside the body.
    pub type_params: Vec<String>,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub members: Vec<Member>,
    pub line: u32,
}

impl TypeDecl {
    /// All supertype references, `extends` first.
    pub fn supertypes(&self) -> impl Iterator<Item = &TypeRef> {
        self.extends.iter().chain(self.implements.iter())
    }
}

/// Reference to a type as written, stripped of generic arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    /// Dotted base name (`D`, `java.util.List`). Empty for primitives/void.
    pub name: String,
    /// Array dimensions; counting resolves the element type.
    pub dims: u8,
    /// Primitive or `void`; never resolves to a module.
    pub primitive: bool,
}

impl TypeRef {
    pub fn primitive() -> Self {
        TypeRef {
            name: String::new(),
            dims: 0,
            primitive: true,
        }
    }

    pub fn named(name: impl Into<String>) -> Self {
        TypeRef {
            name: name.into(),
            dims: 0,
            primitive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Constructor(MethodDecl),
    /// Static or instance initializer block.
    Initializer(Vec<Stmt>),
    Nested(TypeDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub ty: TypeRef,
    /// `(name, extra array dims from C-style brackets, initializer)`.
    pub declarators: Vec<(String, u8, Option<Expr>)>,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub type_params: Vec<String>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub params: Vec<Param>,
    /// `None` for abstract and interface methods.
    pub body: Option<Vec<Stmt>>,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
    /// Varargs parameter; counts once, like a plain parameter.
    pub varargs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catch {
    /// Multi-catch lists every alternative.
    pub types: Vec<TypeRef>,
    pub name: String,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Block(Vec<Stmt>),
    LocalVar {
        ty: TypeRef,
        declarators: Vec<(String, u8, Option<Expr>)>,
    },
    /// Local class/interface declaration inside a body.
    LocalType(TypeDecl),
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        ty: TypeRef,
        name: String,
        iterable: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Try {
        resources: Vec<Stmt>,
        body: Vec<Stmt>,
        catches: Vec<Catch>,
        finally: Option<Vec<Stmt>>,
    },
    Switch {
        scrutinee: Expr,
        /// Case labels are irrelevant for counting; only the bodies matter.
        bodies: Vec<Stmt>,
        case_exprs: Vec<Expr>,
    },
    Synchronized {
        lock: Expr,
        body: Vec<Stmt>,
    },
    Assert {
        cond: Expr,
        message: Option<Expr>,
    },
    Break,
    Continue,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Any literal; the value is irrelevant.
    Literal,
    /// Dotted name not yet classified as variable chain or type reference.
    Name(Vec<String>),
    This,
    /// `Type.class`.
    ClassLiteral,
    FieldAccess {
        receiver: Box<Expr>,
        name: String,
    },
    Call {
        /// `None` for unqualified calls (implicit `this`).
        receiver: Option<Box<Expr>>,
        /// `super.name(...)` calls.
        on_super: bool,
        name: String,
        args: Vec<Expr>,
    },
    /// Constructor delegation `this(...)` / `super(...)`; creation-like and
    /// never counted as a method call.
    ConstructorDelegate {
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        /// Anonymous class body, when present.
        body: Option<Vec<Member>>,
    },
    NewArray {
        ty: TypeRef,
        sizes: Vec<Expr>,
        init: Option<Vec<Expr>>,
    },
    ArrayInit(Vec<Expr>),
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
    },
    Unary(Box<Expr>),
    Binary {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then_value: Box<Expr>,
        else_value: Box<Expr>,
    },
}
