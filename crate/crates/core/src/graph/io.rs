//! Line-oriented text format for dependence graphs.
//!
//! ```text
//! #docrank-graph v1
//! #mode uniform
//! N<TAB>name<TAB>class|interface
//! E<TAB>source<TAB>target<TAB>ci<TAB>ca<TAB>cm<TAB>mm
//! ```
//!
//! The first line is the mandatory format header. `#mode` is an optional
//! directive recording the weight mode (`uniform`, `empirical`,
//! `back <fraction>`, `empirical_back <fraction>`); files without it parse as
//! uniform. All other `#` lines are comments. Serialization is canonical:
//! nodes and edges are emitted in lexicographic order, so equal graphs always
//! produce byte-identical files.

use super::{DependenceCounts, DependenceGraph, GraphError, ModuleId, ModuleKind, WeightMode};
use std::fmt::Write as _;

use thiserror::Error;

/// Mandatory first line of a graph file.
pub const GRAPH_HEADER: &str = "#docrank-graph v1";

/// Parse failure with its location in the input.
#[derive(Debug, Error, PartialEq)]
#[error("graph file line {line}: {message}")]
pub struct GraphFileError {
    pub line: usize,
    pub message: String,
}

impl GraphFileError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        GraphFileError {
            line,
            message: message.into(),
        }
    }
}

/// Canonical text form of a graph.
pub fn graph_to_string(graph: &DependenceGraph) -> String {
    let mut out = String::new();
    out.push_str(GRAPH_HEADER);
    out.push('\n');
    match graph.mode() {
        WeightMode::Uniform => out.push_str("#mode uniform\n"),
        WeightMode::Empirical => out.push_str("#mode empirical\n"),
        WeightMode::BackRecommendation { back_fraction } => {
            let _ = writeln!(out, "#mode back {back_fraction}");
        }
        WeightMode::EmpiricalBack { back_fraction } => {
            let _ = writeln!(out, "#mode empirical_back {back_fraction}");
        }
    }
    for module in graph.modules() {
        let _ = writeln!(out, "N\t{}\t{}", module.name, module.kind);
    }
    for (u, v, c) in graph.edges() {
        let _ = writeln!(out, "E\t{u}\t{v}\t{}\t{}\t{}\t{}", c.ci, c.ca, c.cm, c.mm);
    }
    out
}

/// Parses the canonical text form back into a graph.
pub fn graph_from_str(input: &str) -> Result<DependenceGraph, GraphFileError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == GRAPH_HEADER => {}
        Some((_, first)) => {
            return Err(GraphFileError::new(
                1,
                format!("expected header `{GRAPH_HEADER}`, found `{first}`"),
            ))
        }
        None => return Err(GraphFileError::new(1, "empty input, missing header")),
    }

    let mut graph = DependenceGraph::new();
    let mut mode_seen = false;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#mode") {
            // Only an exact `#mode` word is a directive; `#modeling ...` is a
            // plain comment.
            if rest.is_empty() || rest.starts_with([' ', '\t']) {
                if mode_seen {
                    return Err(GraphFileError::new(line_no, "duplicate #mode directive"));
                }
                mode_seen = true;
                let mode = parse_mode(rest.trim(), line_no)?;
                graph = graph
                    .in_mode(mode)
                    .map_err(|e| GraphFileError::new(line_no, e.to_string()))?;
                continue;
            }
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "N" => parse_node_line(&mut graph, &fields, line_no)?,
            "E" => parse_edge_line(&mut graph, &fields, line_no)?,
            other => {
                return Err(GraphFileError::new(
                    line_no,
                    format!("unknown record type `{other}` (expected N or E)"),
                ))
            }
        }
    }
    Ok(graph)
}

fn parse_mode(rest: &str, line_no: usize) -> Result<WeightMode, GraphFileError> {
    let mut parts = rest.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| GraphFileError::new(line_no, "missing mode name"))?;
    let fraction = |parts: &mut std::str::SplitWhitespace| -> Result<f64, GraphFileError> {
        let text = parts
            .next()
            .ok_or_else(|| GraphFileError::new(line_no, "mode requires a back fraction"))?;
        text.parse::<f64>()
            .map_err(|_| GraphFileError::new(line_no, format!("invalid back fraction `{text}`")))
    };
    let mode = match name {
        "uniform" => WeightMode::Uniform,
        "empirical" => WeightMode::Empirical,
        "back" => WeightMode::BackRecommendation {
            back_fraction: fraction(&mut parts)?,
        },
        "empirical_back" => WeightMode::EmpiricalBack {
            back_fraction: fraction(&mut parts)?,
        },
        other => {
            return Err(GraphFileError::new(
                line_no,
                format!("unknown weight mode `{other}`"),
            ))
        }
    };
    if parts.next().is_some() {
        return Err(GraphFileError::new(line_no, "trailing tokens after mode"));
    }
    Ok(mode)
}

fn parse_node_line(
    graph: &mut DependenceGraph,
    fields: &[&str],
    line_no: usize,
) -> Result<(), GraphFileError> {
    if fields.len() != 3 {
        return Err(GraphFileError::new(
            line_no,
            format!(
                "node line needs 3 tab-separated fields, found {}",
                fields.len()
            ),
        ));
    }
    let name = fields[1];
    if name.is_empty() {
        return Err(GraphFileError::new(line_no, "empty module name"));
    }
    let kind = match fields[2] {
        "class" => ModuleKind::Class,
        "interface" => ModuleKind::Interface,
        other => {
            return Err(GraphFileError::new(
                line_no,
                format!("module kind must be class or interface, found `{other}`"),
            ))
        }
    };
    if graph.contains(name) {
        return Err(GraphFileError::new(
            line_no,
            format!("duplicate node `{name}`"),
        ));
    }
    graph
        .add_module(ModuleId {
            name: name.to_string(),
            kind,
        })
        .map_err(|e| GraphFileError::new(line_no, e.to_string()))
}

fn parse_edge_line(
    graph: &mut DependenceGraph,
    fields: &[&str],
    line_no: usize,
) -> Result<(), GraphFileError> {
    if fields.len() != 7 {
        return Err(GraphFileError::new(
            line_no,
            format!(
                "edge line needs 7 tab-separated fields, found {}",
                fields.len()
            ),
        ));
    }
    let (u, v) = (fields[1], fields[2]);
    for (name, endpoint) in [(u, "source"), (v, "target")] {
        if !graph.contains(name) {
            return Err(GraphFileError::new(
                line_no,
                format!("edge {endpoint} `{name}` has no preceding node line"),
            ));
        }
    }
    if graph.counts(u, v).is_some() {
        return Err(GraphFileError::new(
            line_no,
            format!("duplicate edge `{u}` -> `{v}`"),
        ));
    }
    let mut counts = [0u32; 4];
    for (slot, (field, label)) in counts
        .iter_mut()
        .zip(fields[3..].iter().zip(["ci", "ca", "cm", "mm"]))
    {
        *slot = field.parse::<u32>().map_err(|_| {
            GraphFileError::new(line_no, format!("invalid {label} count `{field}`"))
        })?;
    }
    let counts = DependenceCounts::new(counts[0], counts[1], counts[2], counts[3]);
    graph.insert_edge(u, v, counts).map_err(|e| match e {
        GraphError::ZeroCount => {
            GraphFileError::new(line_no, "edge with all-zero counts has weight 0")
        }
        other => GraphFileError::new(line_no, other.to_string()),
    })
}
