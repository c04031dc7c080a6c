//! Dependence counting over parsed units.
//!
//! For each top-level module `u` the walker collects:
//!
//! * inheritance pairs (`extends`/`implements` of `u` and of its named nested
//!   and local types, deduplicated);
//! * attribute counts, one per field declarator whose declared type resolves
//!   to a project module (array element types count, generic arguments do
//!   not);
//! * method-signature counts, one per resolved parameter type and one per
//!   resolved return type of every method and constructor (varargs count
//!   once, a type used as both parameter and return counts twice);
//! * call counts, one per call expression whose receiver resolves to a
//!   project module.
//!
//! Receiver resolution is purely declared-type based: locals, parameters and
//! fields carry their declared types, static calls name the type directly,
//! and the return type of a project-internal method is tracked through one
//! level of chaining. Field accesses, object creations and constructor
//! delegations contribute no call counts. Contents of nested, local and
//! anonymous classes are attributed to the enclosing top-level module, and
//! self-dependences are discarded.

use super::ast::*;
use super::resolve::ResolutionTable;
use std::collections::{BTreeMap, BTreeSet};

/// Per-kind counts of one unit, keyed by `(source, target)` module names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnitCounts {
    pub ci: BTreeSet<(String, String)>,
    pub ca: BTreeMap<(String, String), u32>,
    pub cm: BTreeMap<(String, String), u32>,
    pub mm: BTreeMap<(String, String), u32>,
}

impl UnitCounts {
    fn merge(&mut self, other: UnitCounts) {
        self.ci.extend(other.ci);
        for (k, v) in other.ca {
            *self.ca.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.cm {
            *self.cm.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.mm {
            *self.mm.entry(k).or_insert(0) += v;
        }
    }
}

/// Counts all four dependence kinds of one unit.
pub fn count_unit(unit: &SourceUnit, table: &ResolutionTable) -> UnitCounts {
    let mut total = UnitCounts::default();
    for decl in &unit.types {
        let module = unit.qualified_name(decl);
        let mut walker = Walker {
            table,
            module,
            counts: UnitCounts::default(),
            scopes: Vec::new(),
            frames: Vec::new(),
            shadows: Vec::new(),
        };
        walker.walk_type(decl);
        total.merge(walker.counts);
    }
    total
}

/// Inheritance pairs of a unit.
pub fn count_ci(unit: &SourceUnit, table: &ResolutionTable) -> BTreeSet<(String, String)> {
    count_unit(unit, table).ci
}

/// Attribute-type counts of a unit.
pub fn count_ca(unit: &SourceUnit, table: &ResolutionTable) -> BTreeMap<(String, String), u32> {
    count_unit(unit, table).ca
}

/// Method-signature counts of a unit.
pub fn count_cm(unit: &SourceUnit, table: &ResolutionTable) -> BTreeMap<(String, String), u32> {
    count_unit(unit, table).cm
}

/// Method-call counts of a unit.
pub fn count_mm(unit: &SourceUnit, table: &ResolutionTable) -> BTreeMap<(String, String), u32> {
    count_unit(unit, table).mm
}

/// Resolved declared type: the module of the base type (if project-internal)
/// plus remaining array dimensions.
#[derive(Debug, Clone, PartialEq)]
struct ValueType {
    module: Option<String>,
    dims: u8,
}

impl ValueType {
    fn unresolved() -> Self {
        ValueType {
            module: None,
            dims: 0,
        }
    }

    fn scalar_module(&self) -> Option<&str> {
        if self.dims == 0 {
            self.module.as_deref()
        } else {
            None
        }
    }
}

enum Frame<'a> {
    Named(&'a TypeDecl),
    Anonymous(&'a [Member]),
}

struct Walker<'a> {
    table: &'a ResolutionTable,
    /// Top-level module everything in this walk is attributed to.
    module: String,
    counts: UnitCounts,
    scopes: Vec<BTreeMap<String, ValueType>>,
    frames: Vec<Frame<'a>>,
    shadows: Vec<Vec<String>>,
}

impl<'a> Walker<'a> {
    // --------------------------------------------------------------
    // Declarations
    // --------------------------------------------------------------

    fn walk_type(&mut self, decl: &'a TypeDecl) {
        self.frames.push(Frame::Named(decl));
        self.shadows.push(decl.type_params.clone());

        for sup in decl.supertypes() {
            if let Some(parent) = self.resolve_type_name(&sup.name, sup.primitive) {
                self.record_ci(parent);
            }
        }
        self.walk_members(&decl.members);

        self.shadows.pop();
        self.frames.pop();
    }

    fn walk_members(&mut self, members: &'a [Member]) {
        for member in members {
            match member {
                Member::Field(field) => self.walk_field(field),
                Member::Method(method) | Member::Constructor(method) => self.walk_method(method),
                Member::Initializer(body) => {
                    self.scopes.push(BTreeMap::new());
                    self.walk_stmts(body);
                    self.scopes.pop();
                }
                Member::Nested(nested) => self.walk_type(nested),
            }
        }
    }

    fn walk_field(&mut self, field: &'a FieldDecl) {
        for (_, _, init) in &field.declarators {
            // One attribute count per declarator; the initializer itself
            // contributes nothing beyond any calls inside it.
            if let Some(target) = self.value_type_of_ref(&field.ty, 0).module {
                self.record(Kind::Ca, target);
            }
            if let Some(expr) = init {
                self.walk_expr(expr);
            }
        }
    }

    fn walk_method(&mut self, method: &'a MethodDecl) {
        self.shadows.push(method.type_params.clone());

        for param in &method.params {
            if let Some(target) = self.value_type_of_ref(&param.ty, 0).module {
                self.record(Kind::Cm, target);
            }
        }
        if let Some(ret) = &method.return_type {
            if let Some(target) = self.value_type_of_ref(ret, 0).module {
                self.record(Kind::Cm, target);
            }
        }

        if let Some(body) = &method.body {
            self.scopes.push(BTreeMap::new());
            for param in &method.params {
                // A varargs parameter is an array of its declared type.
                let extra = u8::from(param.varargs);
                let vt = self.value_type_of_ref(&param.ty, extra);
                self.declare(param.name.clone(), vt);
            }
            self.walk_stmts(body);
            self.scopes.pop();
        }

        self.shadows.pop();
    }

    // --------------------------------------------------------------
    // Statements
    // --------------------------------------------------------------

    fn walk_stmts(&mut self, stmts: &'a [Stmt]) {
        for stmt in stmts {
            self.walk_stmt(stmt);
        }
    }

    fn walk_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            Stmt::Block(body) => {
                self.scopes.push(BTreeMap::new());
                self.walk_stmts(body);
                self.scopes.pop();
            }
            Stmt::LocalVar { ty, declarators } => {
                for (name, extra_dims, init) in declarators {
                    if let Some(expr) = init {
                        self.walk_expr(expr);
                    }
                    let vt = self.value_type_of_ref(ty, *extra_dims);
                    self.declare(name.clone(), vt);
                }
            }
            Stmt::LocalType(decl) => self.walk_type(decl),
            Stmt::Expr(expr) => self.walk_expr(expr),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.walk_expr(cond);
                self.walk_stmt(then_branch);
                if let Some(els) = else_branch {
                    self.walk_stmt(els);
                }
            }
            Stmt::While { cond, body } => {
                self.walk_expr(cond);
                self.walk_stmt(body);
            }
            Stmt::DoWhile { body, cond } => {
                self.walk_stmt(body);
                self.walk_expr(cond);
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => {
                self.scopes.push(BTreeMap::new());
                self.walk_stmts(init);
                if let Some(cond) = cond {
                    self.walk_expr(cond);
                }
                for expr in update {
                    self.walk_expr(expr);
                }
                self.walk_stmt(body);
                self.scopes.pop();
            }
            Stmt::ForEach {
                ty,
                name,
                iterable,
                body,
            } => {
                self.walk_expr(iterable);
                self.scopes.push(BTreeMap::new());
                let vt = self.value_type_of_ref(ty, 0);
                self.declare(name.clone(), vt);
                self.walk_stmt(body);
                self.scopes.pop();
            }
            Stmt::Return(value) => {
                if let Some(expr) = value {
                    self.walk_expr(expr);
                }
            }
            Stmt::Throw(expr) => self.walk_expr(expr),
            Stmt::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                self.scopes.push(BTreeMap::new());
                self.walk_stmts(resources);
                self.walk_stmts(body);
                self.scopes.pop();
                for catch in catches {
                    self.scopes.push(BTreeMap::new());
                    // Multi-catch parameters resolve only when unambiguous.
                    let vt = if catch.types.len() == 1 {
                        self.value_type_of_ref(&catch.types[0], 0)
                    } else {
                        ValueType::unresolved()
                    };
                    self.declare(catch.name.clone(), vt);
                    self.walk_stmts(&catch.body);
                    self.scopes.pop();
                }
                if let Some(body) = finally {
                    self.scopes.push(BTreeMap::new());
                    self.walk_stmts(body);
                    self.scopes.pop();
                }
            }
            Stmt::Switch {
                scrutinee,
                bodies,
                case_exprs,
            } => {
                self.walk_expr(scrutinee);
                for expr in case_exprs {
                    self.walk_expr(expr);
                }
                self.scopes.push(BTreeMap::new());
                self.walk_stmts(bodies);
                self.scopes.pop();
            }
            Stmt::Synchronized { lock, body } => {
                self.walk_expr(lock);
                self.scopes.push(BTreeMap::new());
                self.walk_stmts(body);
                self.scopes.pop();
            }
            Stmt::Assert { cond, message } => {
                self.walk_expr(cond);
                if let Some(expr) = message {
                    self.walk_expr(expr);
                }
            }
            Stmt::Break | Stmt::Continue | Stmt::Empty => {}
        }
    }

    // --------------------------------------------------------------
    // Expressions
    // --------------------------------------------------------------

    fn walk_expr(&mut self, expr: &'a Expr) {
        match expr {
            Expr::Literal | Expr::This | Expr::ClassLiteral | Expr::Name(_) => {}
            Expr::FieldAccess { receiver, .. } => self.walk_expr(receiver),
            Expr::Call {
                receiver,
                on_super,
                args,
                ..
            } => {
                if let Some(recv) = receiver {
                    self.walk_expr(recv);
                }
                for arg in args {
                    self.walk_expr(arg);
                }
                let target = self.call_target(receiver.as_deref(), *on_super);
                if let Some(target) = target {
                    self.record(Kind::Mm, target);
                }
            }
            Expr::ConstructorDelegate { args } => {
                for arg in args {
                    self.walk_expr(arg);
                }
            }
            Expr::New { args, body, .. } => {
                for arg in args {
                    self.walk_expr(arg);
                }
                if let Some(members) = body {
                    self.frames.push(Frame::Anonymous(members));
                    self.shadows.push(Vec::new());
                    self.walk_members(members);
                    self.shadows.pop();
                    self.frames.pop();
                }
            }
            Expr::NewArray { sizes, init, .. } => {
                for size in sizes {
                    self.walk_expr(size);
                }
                if let Some(values) = init {
                    for value in values {
                        self.walk_expr(value);
                    }
                }
            }
            Expr::ArrayInit(values) => {
                for value in values {
                    self.walk_expr(value);
                }
            }
            Expr::ArrayAccess { array, index } => {
                self.walk_expr(array);
                self.walk_expr(index);
            }
            Expr::Cast { expr, .. } => self.walk_expr(expr),
            Expr::InstanceOf { expr, .. } => self.walk_expr(expr),
            Expr::Unary(inner) => self.walk_expr(inner),
            Expr::Binary { lhs, rhs } => {
                self.walk_expr(lhs);
                self.walk_expr(rhs);
            }
            Expr::Ternary {
                cond,
                then_value,
                else_value,
            } => {
                self.walk_expr(cond);
                self.walk_expr(then_value);
                self.walk_expr(else_value);
            }
        }
    }

    /// Module whose method a call invokes, resolved from declared types.
    fn call_target(&self, receiver: Option<&Expr>, on_super: bool) -> Option<String> {
        if on_super {
            let decl = self.frames.iter().rev().find_map(|f| match f {
                Frame::Named(d) => Some(*d),
                Frame::Anonymous(_) => None,
            })?;
            let sup = decl.extends.first()?;
            return self.resolve_type_name(&sup.name, sup.primitive);
        }
        match receiver {
            // Unqualified call: the receiver is this module itself; the
            // self-pair is discarded by `record`.
            None => Some(self.module.clone()),
            Some(expr) => {
                let mut budget = 1u32;
                let vt = self.type_of_expr(expr, &mut budget)?;
                vt.scalar_module().map(str::to_string)
            }
        }
    }

    /// Declared type of an expression, for receiver resolution. `budget`
    /// limits how many method-return lookups a chain may consume.
    fn type_of_expr(&self, expr: &Expr, budget: &mut u32) -> Option<ValueType> {
        match expr {
            Expr::This => Some(ValueType {
                module: Some(self.module.clone()),
                dims: 0,
            }),
            Expr::Name(parts) => self.type_of_name(parts),
            Expr::FieldAccess { receiver, name } => {
                if matches!(receiver.as_ref(), Expr::This) {
                    return self.lookup_field_in_context(name);
                }
                let recv = self.type_of_expr(receiver, budget)?;
                let module = recv.scalar_module()?;
                let member = self.table.lookup_field(module, name)?;
                let (module, dims) = self.table.resolve_member(member)?;
                Some(ValueType {
                    module: Some(module),
                    dims,
                })
            }
            Expr::Call {
                receiver,
                on_super,
                name,
                ..
            } => {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                let recv_module = match receiver {
                    None => {
                        if *on_super {
                            return None;
                        }
                        self.module.clone()
                    }
                    Some(recv) => self
                        .type_of_expr(recv, budget)?
                        .scalar_module()?
                        .to_string(),
                };
                let member = self.table.lookup_method_return(&recv_module, name)?;
                let (module, dims) = self.table.resolve_member(member)?;
                Some(ValueType {
                    module: Some(module),
                    dims,
                })
            }
            Expr::New { ty, body, .. } => {
                // Anonymous subclasses still expose the named type's surface.
                let _ = body;
                Some(ValueType {
                    module: self.resolve_type_name(&ty.name, ty.primitive),
                    dims: 0,
                })
            }
            Expr::Cast { ty, expr: _ } => Some(ValueType {
                module: self.resolve_type_name(&ty.name, ty.primitive),
                dims: ty.dims,
            }),
            Expr::ArrayAccess { array, .. } => {
                let arr = self.type_of_expr(array, budget)?;
                if arr.dims == 0 {
                    return None;
                }
                Some(ValueType {
                    module: arr.module,
                    dims: arr.dims - 1,
                })
            }
            _ => None,
        }
    }

    /// Resolves a dotted name chain: variable first, then the longest type
    /// prefix, walking any remaining segments as field accesses.
    fn type_of_name(&self, parts: &[String]) -> Option<ValueType> {
        if parts.is_empty() {
            return None;
        }
        if let Some(vt) = self
            .lookup_var(&parts[0])
            .or_else(|| self.lookup_field_in_context(&parts[0]))
        {
            return self.walk_field_chain(vt, &parts[1..]);
        }
        for len in (1..=parts.len()).rev() {
            let candidate = parts[..len].join(".");
            if let Some(module) = self.resolve_type_name(&candidate, false) {
                let start = ValueType {
                    module: Some(module),
                    dims: 0,
                };
                return self.walk_field_chain(start, &parts[len..]);
            }
        }
        None
    }

    fn walk_field_chain(&self, mut current: ValueType, parts: &[String]) -> Option<ValueType> {
        for part in parts {
            let module = current.scalar_module()?.to_string();
            let member = self.table.lookup_field(&module, part)?;
            let (module, dims) = self.table.resolve_member(member)?;
            current = ValueType {
                module: Some(module),
                dims,
            };
        }
        Some(current)
    }

    // --------------------------------------------------------------
    // Scopes and context lookups
    // --------------------------------------------------------------

    fn declare(&mut self, name: String, vt: ValueType) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name, vt);
        }
    }

    fn lookup_var(&self, name: &str) -> Option<ValueType> {
        self.scopes
            .iter()
            .rev()
            .find_map(|scope| scope.get(name).cloned())
    }

    /// Declared type of a field visible from the current lexical position:
    /// fields of the innermost enclosing type first, then its project-internal
    /// supertypes, then outer enclosing types.
    fn lookup_field_in_context(&self, name: &str) -> Option<ValueType> {
        for frame in self.frames.iter().rev() {
            let members: &[Member] = match frame {
                Frame::Named(decl) => &decl.members,
                Frame::Anonymous(members) => members,
            };
            for member in members {
                if let Member::Field(field) = member {
                    for (field_name, extra_dims, _) in &field.declarators {
                        if field_name == name {
                            return Some(self.value_type_of_ref(&field.ty, *extra_dims));
                        }
                    }
                }
            }
            if let Frame::Named(decl) = frame {
                for sup in decl.supertypes() {
                    let Some(parent) = self.resolve_type_name(&sup.name, sup.primitive) else {
                        continue;
                    };
                    if let Some(member) = self.table.lookup_field(&parent, name) {
                        // The field exists even if its type is unresolvable;
                        // stop searching outer frames either way.
                        return Some(match self.table.resolve_member(member) {
                            Some((module, dims)) => ValueType {
                                module: Some(module),
                                dims,
                            },
                            None => ValueType::unresolved(),
                        });
                    }
                }
            }
        }
        None
    }

    fn value_type_of_ref(&self, ty: &TypeRef, extra_dims: u8) -> ValueType {
        ValueType {
            module: self.resolve_type_name(&ty.name, ty.primitive),
            dims: ty.dims + extra_dims,
        }
    }

    /// Resolves a raw type name in the current shadow context.
    fn resolve_type_name(&self, name: &str, primitive: bool) -> Option<String> {
        if primitive || name.is_empty() {
            return None;
        }
        if !name.contains('.')
            && self
                .shadows
                .iter()
                .any(|frame| frame.iter().any(|p| p == name))
        {
            return None;
        }
        self.table.resolve(name).map(|m| m.name.clone())
    }

    fn record_ci(&mut self, target: String) {
        if target != self.module {
            self.counts.ci.insert((self.module.clone(), target));
        }
    }

    fn record(&mut self, kind: Kind, target: String) {
        if target == self.module {
            return;
        }
        let key = (self.module.clone(), target);
        match kind {
            Kind::Ca => *self.counts.ca.entry(key).or_insert(0) += 1,
            Kind::Cm => *self.counts.cm.entry(key).or_insert(0) += 1,
            Kind::Mm => *self.counts.mm.entry(key).or_insert(0) += 1,
        }
    }
}

enum Kind {
    Ca,
    Cm,
    Mm,
}
