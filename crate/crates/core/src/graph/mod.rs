//! Edge-weighted module dependence graphs.
//!
//! A module is a top-level class or interface of an object-oriented system.
//! The graph records, per ordered module pair `(u, v)` with `u != v`, how many
//! times `u` depends on `v` through each of four dependence kinds:
//!
//! * `ci`: class inheritance, `v` is a superclass or superinterface of `u`
//!   (0 or 1 per pair);
//! * `ca`: class attribute, attributes of `u` whose declared type is `v`;
//! * `cm`: class method, parameters or return types of `u`'s methods and
//!   constructors declared as `v`;
//! * `mm`: method call, calls in `u`'s bodies whose receiver resolves to `v`.
//!
//! The scalar weight of an edge is derived from the counts according to the
//! graph's [`WeightMode`]: either the plain sum, or the empirically weighted
//! sum `3*ci + 3*ca + 2*cm + 4*mm`. The back-recommendation modes additionally
//! mirror a configurable fraction of every edge onto the reverse direction
//! when the [`WeightMatrix`] is formed.
//!
//! Graphs are immutable once construction finishes and can be shared freely
//! across threads.

mod matrix;

pub mod io;

pub use matrix::WeightMatrix;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Per-kind multipliers applied to `(ci, ca, cm, mm)` under
/// [`WeightMode::Empirical`] and [`WeightMode::EmpiricalBack`].
pub const EMPIRICAL_COEFFICIENTS: [u32; 4] = [3, 3, 2, 4];

/// Default fraction of an edge weight mirrored onto the reverse edge by the
/// back-recommendation modes.
pub const DEFAULT_BACK_FRACTION: f64 = 0.5;

/// Whether a module is a class or an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleKind {
    Class,
    Interface,
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleKind::Class => f.write_str("class"),
            ModuleKind::Interface => f.write_str("interface"),
        }
    }
}

/// Identity of one module: its fully qualified name plus its kind.
///
/// Names are unique within a graph; two modules with the same name and
/// different kinds cannot coexist.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleId {
    pub name: String,
    pub kind: ModuleKind,
}

impl ModuleId {
    pub fn class(name: impl Into<String>) -> Self {
        ModuleId {
            name: name.into(),
            kind: ModuleKind::Class,
        }
    }

    pub fn interface(name: impl Into<String>) -> Self {
        ModuleId {
            name: name.into(),
            kind: ModuleKind::Interface,
        }
    }
}

/// The four dependence kinds tracked on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DependenceKind {
    /// Class inheritance (`extends`/`implements`).
    Ci,
    /// Attribute (field) declared type.
    Ca,
    /// Method signature (parameter or return) type.
    Cm,
    /// Method call on a receiver of the target type.
    Mm,
}

/// Counts of the four dependence kinds on one ordered module pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DependenceCounts {
    /// Inheritance dependences; 0 or 1 for any ordered pair.
    pub ci: u32,
    pub ca: u32,
    pub cm: u32,
    pub mm: u32,
}

impl DependenceCounts {
    pub fn new(ci: u32, ca: u32, cm: u32, mm: u32) -> Self {
        DependenceCounts { ci, ca, cm, mm }
    }

    /// Sum of all four counts (the uniform edge weight).
    pub fn total(&self) -> u32 {
        self.ci + self.ca + self.cm + self.mm
    }

    /// Weighted sum under the empirical per-kind coefficients.
    pub fn empirical_total(&self) -> u32 {
        let [wci, wca, wcm, wmm] = EMPIRICAL_COEFFICIENTS;
        wci * self.ci + wca * self.ca + wcm * self.cm + wmm * self.mm
    }
}

/// How edge counts are turned into scalar weights.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum WeightMode {
    /// `W(u,v) = ci + ca + cm + mm`.
    #[default]
    Uniform,
    /// `W(u,v) = 3*ci + 3*ca + 2*cm + 4*mm`.
    Empirical,
    /// Uniform weights, then every edge mirrors `back_fraction` of its weight
    /// onto the reverse direction (`R + back_fraction * R^T`).
    BackRecommendation { back_fraction: f64 },
    /// Empirical weights combined with back recommendation; the coefficient
    /// formula is applied first, then the transpose term.
    EmpiricalBack { back_fraction: f64 },
}

impl WeightMode {
    /// Back fraction in effect, if this mode mirrors reverse edges.
    pub fn back_fraction(&self) -> Option<f64> {
        match self {
            WeightMode::Uniform | WeightMode::Empirical => None,
            WeightMode::BackRecommendation { back_fraction }
            | WeightMode::EmpiricalBack { back_fraction } => Some(*back_fraction),
        }
    }

    /// Scalar weight of an edge before any transpose term.
    pub fn base_weight(&self, counts: &DependenceCounts) -> f64 {
        match self {
            WeightMode::Uniform | WeightMode::BackRecommendation { .. } => counts.total() as f64,
            WeightMode::Empirical | WeightMode::EmpiricalBack { .. } => {
                counts.empirical_total() as f64
            }
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        if let Some(f) = self.back_fraction() {
            if !f.is_finite() || f < 0.0 {
                return Err(GraphError::InvalidBackFraction(f));
            }
        }
        Ok(())
    }
}

/// Errors raised by graph construction and queries.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-dependence on module `{0}` is not allowed")]
    SelfEdge(String),
    #[error("inheritance count for `{from}` -> `{to}` would exceed 1")]
    InheritanceOverflow { from: String, to: String },
    #[error("dependence count must be at least 1")]
    ZeroCount,
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("module `{name}` already registered as {existing}, cannot re-register as {requested}")]
    KindConflict {
        name: String,
        existing: ModuleKind,
        requested: ModuleKind,
    },
    #[error("back fraction must be finite and non-negative, got {0}")]
    InvalidBackFraction(f64),
}

/// Directed multigraph of modules with per-edge dependence counts.
///
/// Nodes and edges iterate in lexicographic name order, which makes every
/// derived artifact (weight matrices, serialized files) deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceGraph {
    nodes: BTreeMap<String, ModuleKind>,
    edges: BTreeMap<(String, String), DependenceCounts>,
    mode: WeightMode,
}

impl Default for DependenceGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl DependenceGraph {
    /// Empty graph with uniform weights.
    pub fn new() -> Self {
        DependenceGraph {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            mode: WeightMode::Uniform,
        }
    }

    /// Empty graph with the given weight mode.
    pub fn with_mode(mode: WeightMode) -> Result<Self, GraphError> {
        mode.validate()?;
        Ok(DependenceGraph {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            mode,
        })
    }

    /// Returns a copy of this graph under a different weight mode.
    ///
    /// Counts are mode-independent, so this is cheap and lossless.
    pub fn in_mode(&self, mode: WeightMode) -> Result<Self, GraphError> {
        mode.validate()?;
        let mut g = self.clone();
        g.mode = mode;
        Ok(g)
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.nodes.contains_key(name)
    }

    pub fn kind_of(&self, name: &str) -> Option<ModuleKind> {
        self.nodes.get(name).copied()
    }

    /// Modules in lexicographic name order.
    pub fn modules(&self) -> impl Iterator<Item = ModuleId> + '_ {
        self.nodes.iter().map(|(name, kind)| ModuleId {
            name: name.clone(),
            kind: *kind,
        })
    }

    /// Module names in lexicographic order.
    pub fn module_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    /// Edges in lexicographic `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, &DependenceCounts)> {
        self.edges
            .iter()
            .map(|((u, v), c)| (u.as_str(), v.as_str(), c))
    }

    /// Registers a module, inserting it if absent.
    ///
    /// Re-registering an existing name with the same kind is a no-op;
    /// a different kind is rejected.
    pub fn add_module(&mut self, module: ModuleId) -> Result<(), GraphError> {
        match self.nodes.get(&module.name) {
            Some(existing) if *existing != module.kind => Err(GraphError::KindConflict {
                name: module.name,
                existing: *existing,
                requested: module.kind,
            }),
            Some(_) => Ok(()),
            None => {
                self.nodes.insert(module.name, module.kind);
                Ok(())
            }
        }
    }

    /// Increments the count of `kind` on the edge `(u, v)` by `count`.
    ///
    /// Endpoints are inserted as classes when absent. Self-dependences are
    /// rejected, as is raising the inheritance count of a pair above 1.
    pub fn add_dependence(
        &mut self,
        u: &str,
        v: &str,
        kind: DependenceKind,
        count: u32,
    ) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfEdge(u.to_string()));
        }
        if count == 0 {
            return Err(GraphError::ZeroCount);
        }
        let counts = self
            .edges
            .get(&(u.to_string(), v.to_string()))
            .copied()
            .unwrap_or_default();
        if kind == DependenceKind::Ci && counts.ci + count > 1 {
            return Err(GraphError::InheritanceOverflow {
                from: u.to_string(),
                to: v.to_string(),
            });
        }
        self.nodes.entry(u.to_string()).or_insert(ModuleKind::Class);
        self.nodes.entry(v.to_string()).or_insert(ModuleKind::Class);
        let entry = self
            .edges
            .entry((u.to_string(), v.to_string()))
            .or_default();
        match kind {
            DependenceKind::Ci => entry.ci += count,
            DependenceKind::Ca => entry.ca += count,
            DependenceKind::Cm => entry.cm += count,
            DependenceKind::Mm => entry.mm += count,
        }
        Ok(())
    }

    /// Inserts an edge with explicit counts, replacing nothing.
    ///
    /// Used by deserialization; rejects self-edges, all-zero counts and
    /// duplicate pairs.
    pub(crate) fn insert_edge(
        &mut self,
        u: &str,
        v: &str,
        counts: DependenceCounts,
    ) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfEdge(u.to_string()));
        }
        if counts.total() == 0 {
            return Err(GraphError::ZeroCount);
        }
        if counts.ci > 1 {
            return Err(GraphError::InheritanceOverflow {
                from: u.to_string(),
                to: v.to_string(),
            });
        }
        self.nodes.entry(u.to_string()).or_insert(ModuleKind::Class);
        self.nodes.entry(v.to_string()).or_insert(ModuleKind::Class);
        self.edges.insert((u.to_string(), v.to_string()), counts);
        Ok(())
    }

    /// Dependence counts stored on `(u, v)`, if the edge exists.
    pub fn counts(&self, u: &str, v: &str) -> Option<&DependenceCounts> {
        self.edges.get(&(u.to_string(), v.to_string()))
    }

    /// Scalar weight of `(u, v)` before any back-recommendation term:
    /// the count sum under uniform modes, the coefficient-weighted sum under
    /// empirical modes, and 0 for absent edges.
    pub fn edge_weight(&self, u: &str, v: &str) -> Result<f64, GraphError> {
        if !self.nodes.contains_key(u) {
            return Err(GraphError::UnknownModule(u.to_string()));
        }
        if !self.nodes.contains_key(v) {
            return Err(GraphError::UnknownModule(v.to_string()));
        }
        Ok(self
            .counts(u, v)
            .map(|c| self.mode.base_weight(c))
            .unwrap_or(0.0))
    }

    /// Weight matrix under the graph's mode, including the transpose term for
    /// the back-recommendation modes.
    pub fn weight_matrix(&self) -> WeightMatrix {
        WeightMatrix::from_graph(self)
    }

    /// Incoming `(source, weight)` pairs of `u` in the weight matrix,
    /// source-sorted.
    pub fn in_edges(&self, u: &str) -> Result<Vec<(ModuleId, f64)>, GraphError> {
        if !self.nodes.contains_key(u) {
            return Err(GraphError::UnknownModule(u.to_string()));
        }
        let m = self.weight_matrix();
        let idx = m.index_of(u).expect("node present in own matrix");
        Ok(m.in_edges(idx)
            .iter()
            .map(|&(v, w)| (m.module(v).clone(), w))
            .collect())
    }

    /// Outgoing `(target, weight)` pairs of `u` in the weight matrix,
    /// target-sorted.
    pub fn out_edges(&self, u: &str) -> Result<Vec<(ModuleId, f64)>, GraphError> {
        if !self.nodes.contains_key(u) {
            return Err(GraphError::UnknownModule(u.to_string()));
        }
        let m = self.weight_matrix();
        let idx = m.index_of(u).expect("node present in own matrix");
        Ok(m.out_edges(idx)
            .iter()
            .map(|&(v, w)| (m.module(v).clone(), w))
            .collect())
    }

    /// Subgraph induced on `keep`: the listed nodes plus every edge whose
    /// endpoints both remain. Counts and weight mode carry over.
    pub fn induced<'a, I>(&self, keep: I) -> DependenceGraph
    where
        I: IntoIterator<Item = &'a str>,
    {
        let keep: std::collections::BTreeSet<&str> = keep.into_iter().collect();
        let nodes = self
            .nodes
            .iter()
            .filter(|(name, _)| keep.contains(name.as_str()))
            .map(|(name, kind)| (name.clone(), *kind))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|((u, v), _)| keep.contains(u.as_str()) && keep.contains(v.as_str()))
            .map(|(k, c)| (k.clone(), *c))
            .collect();
        DependenceGraph {
            nodes,
            edges,
            mode: self.mode,
        }
    }
}
