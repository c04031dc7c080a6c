//! Dependence-graph extraction from Java-subset source trees.
//!
//! A project directory is scanned for `.java` files; each parses into a
//! [`SourceUnit`], the units build a [`ResolutionTable`] over the top-level
//! classes and interfaces, and per-unit dependence counts merge into one
//! [`DependenceGraph`]. Counting merges are plain additions, so the result is
//! independent of the order files are visited in.
//!
//! Files that fail to parse are skipped with a report entry by default;
//! strict mode turns the first failure into an error. A module declared twice
//! across the project is always an error.

mod ast;
mod counter;
mod lexer;
mod parser;
mod resolve;

pub use ast::{FieldDecl, Member, MethodDecl, Param, SourceUnit, Stmt, TypeDecl, TypeRef};
pub use counter::{count_ca, count_ci, count_cm, count_mm, count_unit, UnitCounts};
pub use parser::parse_unit;
pub use resolve::ResolutionTable;

use crate::graph::{DependenceGraph, DependenceKind, ModuleId};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Syntax error with its position in the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("parse error in `{path}`: {error}")]
    Parse { path: String, error: ParseError },
    #[error("module `{name}` declared in both `{first}` and `{second}`")]
    DuplicateModule {
        name: String,
        first: String,
        second: String,
    },
    #[error("graph construction failed: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// Extraction options.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtractOptions {
    /// Abort on the first unreadable or unparseable file instead of skipping.
    pub strict: bool,
}

/// A file skipped during non-strict extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for SkippedFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

/// Extraction summary alongside the graph.
#[derive(Debug, Clone, Default)]
pub struct ExtractStats {
    pub files_scanned: usize,
    pub files_parsed: usize,
    pub skipped: Vec<SkippedFile>,
}

#[derive(Debug)]
pub struct ExtractOutcome {
    pub graph: DependenceGraph,
    pub stats: ExtractStats,
}

/// Extracts the dependence graph of all `.java` files under `root`.
pub fn extract_project(
    root: &Path,
    options: &ExtractOptions,
) -> Result<ExtractOutcome, ExtractError> {
    let mut paths = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| ExtractError::Io {
            path: e
                .path()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| root.display().to_string()),
            message: e.to_string(),
        })?;
        if entry.file_type().is_file()
            && entry.path().extension().and_then(|e| e.to_str()) == Some("java")
        {
            paths.push(entry.into_path());
        }
    }
    paths.sort();

    let mut stats = ExtractStats {
        files_scanned: paths.len(),
        ..ExtractStats::default()
    };
    let mut units = Vec::new();
    for path in &paths {
        let display = path.display().to_string();
        let source = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                if options.strict {
                    return Err(ExtractError::Io {
                        path: display,
                        message: e.to_string(),
                    });
                }
                stats.skipped.push(SkippedFile {
                    path: display,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match parse_unit(&display, &source) {
            Ok(unit) => {
                stats.files_parsed += 1;
                units.push(unit);
            }
            Err(error) => {
                if options.strict {
                    return Err(ExtractError::Parse {
                        path: display,
                        error,
                    });
                }
                stats.skipped.push(SkippedFile {
                    path: display,
                    reason: error.to_string(),
                });
            }
        }
    }

    let graph = build_graph(&units)?;
    Ok(ExtractOutcome { graph, stats })
}

/// Extracts from in-memory `(path, source)` pairs; parse failures follow the
/// same strict/skip policy as directory extraction.
pub fn extract_sources(
    sources: &[(&str, &str)],
    options: &ExtractOptions,
) -> Result<ExtractOutcome, ExtractError> {
    let mut stats = ExtractStats {
        files_scanned: sources.len(),
        ..ExtractStats::default()
    };
    let mut units = Vec::new();
    for (path, source) in sources {
        match parse_unit(path, source) {
            Ok(unit) => {
                stats.files_parsed += 1;
                units.push(unit);
            }
            Err(error) => {
                if options.strict {
                    return Err(ExtractError::Parse {
                        path: path.to_string(),
                        error,
                    });
                }
                stats.skipped.push(SkippedFile {
                    path: path.to_string(),
                    reason: error.to_string(),
                });
            }
        }
    }
    let graph = build_graph(&units)?;
    Ok(ExtractOutcome { graph, stats })
}

/// Merges per-unit counts over a set of parsed units into one graph.
///
/// Every declared module becomes a node even when isolated; self-dependences
/// have already been discarded by counting.
pub fn build_graph(units: &[SourceUnit]) -> Result<DependenceGraph, ExtractError> {
    let table = ResolutionTable::build(units)?;
    let mut graph = DependenceGraph::new();
    for module in table.modules() {
        graph.add_module(ModuleId {
            name: module.name.clone(),
            kind: module.kind,
        })?;
    }
    for unit in units {
        let counts = count_unit(unit, &table);
        for (u, v) in &counts.ci {
            graph.add_dependence(u, v, DependenceKind::Ci, 1)?;
        }
        for ((u, v), n) in &counts.ca {
            graph.add_dependence(u, v, DependenceKind::Ca, *n)?;
        }
        for ((u, v), n) in &counts.cm {
            graph.add_dependence(u, v, DependenceKind::Cm, *n)?;
        }
        for ((u, v), n) in &counts.mm {
            graph.add_dependence(u, v, DependenceKind::Mm, *n)?;
        }
    }
    Ok(graph)
}
