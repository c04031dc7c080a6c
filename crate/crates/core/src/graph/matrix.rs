//! Scalar weight matrix derived from a dependence graph.

use super::{DependenceGraph, ModuleId};
use crate::util::Neumaier;
use std::collections::BTreeMap;

/// Sparse non-negative weight matrix over a fixed, name-sorted node list.
///
/// Entry `(u, v)` is the weight with which `u` depends on `v`. Under the
/// back-recommendation modes it already includes the mirrored
/// `back_fraction * weight(v, u)` term, so every consumer sees the final
/// weights. Zero entries are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    nodes: Vec<ModuleId>,
    index: BTreeMap<String, usize>,
    /// `out[u]` = `(v, weight(u, v))`, target-sorted.
    out: Vec<Vec<(usize, f64)>>,
    /// `in_[v]` = `(u, weight(u, v))`, source-sorted.
    in_: Vec<Vec<(usize, f64)>>,
    /// Sum of out-edge weights per node; 0.0 marks a dangling node.
    total_out: Vec<f64>,
}

impl WeightMatrix {
    pub(crate) fn from_graph(graph: &DependenceGraph) -> Self {
        let nodes: Vec<ModuleId> = graph.modules().collect();
        let index: BTreeMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, m)| (m.name.clone(), i))
            .collect();

        let mode = graph.mode();
        let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, counts) in graph.edges() {
            let w = mode.base_weight(counts);
            if w > 0.0 {
                entries.insert((index[u], index[v]), w);
            }
        }
        if let Some(fraction) = mode.back_fraction() {
            if fraction > 0.0 {
                let base: Vec<((usize, usize), f64)> =
                    entries.iter().map(|(&k, &w)| (k, w)).collect();
                for ((u, v), w) in base {
                    *entries.entry((v, u)).or_insert(0.0) += fraction * w;
                }
            }
        }

        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut in_ = vec![Vec::new(); n];
        for (&(u, v), &w) in &entries {
            if w > 0.0 {
                out[u].push((v, w));
                in_[v].push((u, w));
            }
        }
        for row in &mut in_ {
            row.sort_unstable_by_key(|&(u, _)| u);
        }
        let total_out = out
            .iter()
            .map(|row| {
                let mut sum = Neumaier::new();
                for &(_, w) in row {
                    sum.add(w);
                }
                sum.value()
            })
            .collect();

        WeightMatrix {
            nodes,
            index,
            out,
            in_,
            total_out,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in index order (lexicographic by name).
    pub fn modules(&self) -> &[ModuleId] {
        &self.nodes
    }

    pub fn module(&self, idx: usize) -> &ModuleId {
        &self.nodes[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Weight of `(u, v)`; 0.0 when no entry is stored.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.out[u]
            .binary_search_by_key(&v, |&(t, _)| t)
            .map(|pos| self.out[u][pos].1)
            .unwrap_or(0.0)
    }

    /// Outgoing `(target, weight)` entries of `u`, all strictly positive.
    pub fn out_edges(&self, u: usize) -> &[(usize, f64)] {
        &self.out[u]
    }

    /// Incoming `(source, weight)` entries of `v`, all strictly positive.
    pub fn in_edges(&self, v: usize) -> &[(usize, f64)] {
        &self.in_[v]
    }

    /// Sum of the out-edge weights of `v`; 0.0 for dangling nodes.
    pub fn total_out_weight(&self, v: usize) -> f64 {
        self.total_out[v]
    }

    /// Number of stored (positive) entries.
    pub fn entry_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Copy with every weight multiplied by `factor` (> 0).
    ///
    /// Importance scores depend only on weight ratios, so solving a scaled
    /// matrix must reproduce the original scores; this exists to make that
    /// property checkable.
    pub fn scaled(&self, factor: f64) -> WeightMatrix {
        assert!(factor > 0.0 && factor.is_finite());
        let scale_row = |row: &Vec<(usize, f64)>| -> Vec<(usize, f64)> {
            row.iter().map(|&(t, w)| (t, w * factor)).collect()
        };
        WeightMatrix {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            out: self.out.iter().map(scale_row).collect(),
            in_: self.in_.iter().map(scale_row).collect(),
            total_out: self.total_out.iter().map(|w| w * factor).collect(),
        }
    }
}
