//! Project-wide type name resolution.
//!
//! Only top-level classes and interfaces become modules. A dotted name
//! resolves by exact qualified match first, then, for plain names, by a
//! project-unique simple name; anything else (externals, ambiguous simple
//! names, nested types, type variables) stays unresolved and never produces
//! graph nodes or edges. Imports are deliberately not consulted, keeping the
//! rule context-free and conservative.
//!
//! The table also carries per-module member summaries (field types, first
//! declared return type per method name, supertype names) so receiver
//! resolution can walk declared types across classes.

use super::ast::{Member, SourceUnit, TypeDecl, TypeRef};
use super::ExtractError;
use crate::graph::{ModuleId, ModuleKind};
use std::collections::{BTreeMap, BTreeSet};

/// Declared type of one member, ready for lazy resolution.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MemberType {
    pub raw: String,
    pub dims: u8,
    /// False for primitives and names shadowed by type parameters at the
    /// declaration site.
    pub resolvable: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct TypeSummary {
    pub supers: Vec<MemberType>,
    pub fields: BTreeMap<String, MemberType>,
    /// Return type of the first declared overload per method name.
    pub methods: BTreeMap<String, MemberType>,
}

#[derive(Debug, Clone)]
enum SimpleEntry {
    Unique(String),
    Ambiguous,
}

/// Map from type names to modules, plus member summaries.
#[derive(Debug, Clone)]
pub struct ResolutionTable {
    by_qualified: BTreeMap<String, ModuleId>,
    by_simple: BTreeMap<String, SimpleEntry>,
    summaries: BTreeMap<String, TypeSummary>,
}

impl ResolutionTable {
    /// Builds the table over all units, rejecting duplicate module names.
    pub fn build(units: &[SourceUnit]) -> Result<Self, ExtractError> {
        let mut by_qualified: BTreeMap<String, ModuleId> = BTreeMap::new();
        let mut declared_in: BTreeMap<String, String> = BTreeMap::new();
        let mut by_simple: BTreeMap<String, SimpleEntry> = BTreeMap::new();
        let mut summaries = BTreeMap::new();

        for unit in units {
            for decl in &unit.types {
                let qualified = unit.qualified_name(decl);
                if let Some(first) = declared_in.get(&qualified) {
                    return Err(ExtractError::DuplicateModule {
                        name: qualified,
                        first: first.clone(),
                        second: unit.path.clone(),
                    });
                }
                declared_in.insert(qualified.clone(), unit.path.clone());
                by_qualified.insert(
                    qualified.clone(),
                    ModuleId {
                        name: qualified.clone(),
                        kind: decl.kind,
                    },
                );
                by_simple
                    .entry(decl.name.clone())
                    .and_modify(|e| *e = SimpleEntry::Ambiguous)
                    .or_insert_with(|| SimpleEntry::Unique(qualified.clone()));
                summaries.insert(qualified, summarize(decl));
            }
        }

        Ok(ResolutionTable {
            by_qualified,
            by_simple,
            summaries,
        })
    }

    /// All modules, name-sorted.
    pub fn modules(&self) -> impl Iterator<Item = &ModuleId> {
        self.by_qualified.values()
    }

    pub fn len(&self) -> usize {
        self.by_qualified.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_qualified.is_empty()
    }

    /// Resolves a dotted type name to a module.
    pub fn resolve(&self, dotted: &str) -> Option<&ModuleId> {
        if let Some(module) = self.by_qualified.get(dotted) {
            return Some(module);
        }
        if dotted.contains('.') {
            return None;
        }
        match self.by_simple.get(dotted) {
            Some(SimpleEntry::Unique(qualified)) => self.by_qualified.get(qualified),
            _ => None,
        }
    }

    pub fn kind_of(&self, qualified: &str) -> Option<ModuleKind> {
        self.by_qualified.get(qualified).map(|m| m.kind)
    }

    /// Resolves a member's declared type: `(module, dims)` when the base name
    /// names a project module.
    pub(crate) fn resolve_member(&self, member: &MemberType) -> Option<(String, u8)> {
        if !member.resolvable {
            return None;
        }
        self.resolve(&member.raw)
            .map(|m| (m.name.clone(), member.dims))
    }

    /// Declared type of `field` in `module`, searching internal supertypes.
    pub(crate) fn lookup_field(&self, module: &str, field: &str) -> Option<&MemberType> {
        self.lookup_member(module, field, &mut BTreeSet::new(), |s| &s.fields)
    }

    /// Declared return type of `method` in `module`, searching internal
    /// supertypes.
    pub(crate) fn lookup_method_return(&self, module: &str, method: &str) -> Option<&MemberType> {
        self.lookup_member(module, method, &mut BTreeSet::new(), |s| &s.methods)
    }

    fn lookup_member<'a>(
        &'a self,
        module: &str,
        name: &str,
        visited: &mut BTreeSet<String>,
        select: fn(&'a TypeSummary) -> &'a BTreeMap<String, MemberType>,
    ) -> Option<&'a MemberType> {
        if !visited.insert(module.to_string()) {
            return None;
        }
        let summary = self.summaries.get(module)?;
        if let Some(member) = select(summary).get(name) {
            return Some(member);
        }
        for sup in &summary.supers {
            if let Some((parent, 0)) = self.resolve_member(sup) {
                if let Some(member) = self.lookup_member(&parent, name, visited, select) {
                    return Some(member);
                }
            }
        }
        None
    }
}

fn summarize(decl: &TypeDecl) -> TypeSummary {
    let class_shadows = &decl.type_params;
    let member_type = |ty: &TypeRef, extra: u8, shadows: &[&[String]]| {
        let shadowed = !ty.name.contains('.') && shadows.iter().any(|set| set.contains(&ty.name));
        MemberType {
            raw: ty.name.clone(),
            dims: ty.dims + extra,
            resolvable: !ty.primitive && !shadowed,
        }
    };

    let mut fields = BTreeMap::new();
    let mut methods = BTreeMap::new();
    for member in &decl.members {
        match member {
            Member::Field(f) => {
                for (name, extra_dims, _) in &f.declarators {
                    fields
                        .entry(name.clone())
                        .or_insert_with(|| member_type(&f.ty, *extra_dims, &[class_shadows]));
                }
            }
            Member::Method(m) => {
                if let Some(ret) = &m.return_type {
                    methods
                        .entry(m.name.clone())
                        .or_insert_with(|| member_type(ret, 0, &[class_shadows, &m.type_params]));
                }
            }
            _ => {}
        }
    }
    let supers = decl
        .supertypes()
        .map(|ty| member_type(ty, 0, &[class_shadows]))
        .collect();
    TypeSummary {
        supers,
        fields,
        methods,
    }
}
