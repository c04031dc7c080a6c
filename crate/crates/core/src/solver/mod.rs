//! Importance scoring via weighted PageRank.
//!
//! Scores are the fixed point of
//!
//! ```text
//! P = d * M * P + ((1 - d) / m) * e
//! ```
//!
//! where `M` is the column-stochastic transition matrix induced by the edge
//! weights (column `v` holds `weight(v, u) / total_out_weight(v)`), `m` is the
//! node count and `e` the all-ones vector. The teleport term `(1 - d) / m`
//! keeps the iterates on the probability simplex, so the scores of any graph
//! sum to 1.
//!
//! Dangling nodes (no out-edges) have no column defined by the weights; their
//! column is replaced by the uniform distribution `1/m`, the standard fix that
//! preserves stochasticity.
//!
//! [`solve`] runs the power iteration from the uniform start until the L1
//! difference between successive iterates drops below the tolerance or the
//! iteration budget is exhausted. [`direct::solve_direct`] solves the same
//! fixed point as a linear system by Gaussian elimination and serves as an
//! independent oracle for small graphs.

pub mod direct;

use crate::graph::{DependenceGraph, WeightMatrix};
use crate::util::{compensated_sum, Neumaier};
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Damping factor applied to the link-following term.
pub const DEFAULT_DAMPING: f64 = 0.85;
/// Iteration cap for the power method.
pub const DEFAULT_MAX_ITERATIONS: u32 = 100;
/// L1 convergence tolerance between successive iterates.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Solver parameters.
///
/// Dangling columns are always redistributed uniformly and the iteration
/// always starts from the uniform vector `1/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Damping factor `d`, strictly between 0 and 1.
    pub damping: f64,
    /// Maximum number of power iterations, at least 1.
    pub max_iterations: u32,
    /// Positive L1 tolerance on successive iterates.
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            damping: DEFAULT_DAMPING,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(SolverError::InvalidDamping(self.damping));
        }
        if self.tolerance <= 0.0 || !self.tolerance.is_finite() {
            return Err(SolverError::InvalidTolerance(self.tolerance));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidMaxIterations);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("damping factor must lie strictly between 0 and 1, got {0}")]
    InvalidDamping(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("max_iterations must be at least 1")]
    InvalidMaxIterations,
    #[error("cannot score an empty graph")]
    EmptyGraph,
    #[error("direct solver refuses graphs larger than {bound} nodes (got {nodes})")]
    OracleBoundExceeded { nodes: usize, bound: usize },
    #[error("labeled subset is empty")]
    EmptySubset,
    #[error("labeled module `{0}` is not a node of the graph")]
    SubsetNotInGraph(String),
    #[error("non-finite value encountered during iteration")]
    NonFinite,
}

/// Importance scores over a graph's modules, plus convergence diagnostics.
///
/// Scores are strictly positive and sum to 1 (within floating-point error)
/// whenever they cover a whole graph; restrictions to a subset keep the
/// original values without renormalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: BTreeMap<String, f64>,
    /// Iterations actually performed (0 for the direct solver).
    pub iterations_used: u32,
    /// L1 distance between the last two iterates (residual norm for the
    /// direct solver).
    pub final_error: f64,
    /// Whether the tolerance was met within the iteration budget.
    pub converged: bool,
    /// L1 error after each iteration, in order.
    pub error_history: Vec<f64>,
}

impl ScoreVector {
    /// Wraps externally supplied scores (for example, parsed back from a
    /// ranking file) so they can flow through ranking and evaluation. No
    /// convergence diagnostics apply; later pairs overwrite earlier ones.
    pub fn from_raw<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (String, f64)>,
    {
        ScoreVector {
            scores: pairs.into_iter().collect(),
            iterations_used: 0,
            final_error: 0.0,
            converged: true,
            error_history: Vec::new(),
        }
    }

    pub fn score(&self, module: &str) -> Option<f64> {
        self.scores.get(module).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `(module, score)` pairs in lexicographic module order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.scores.values().copied())
    }

    /// Keeps only the listed modules, preserving their score values and the
    /// convergence diagnostics.
    pub fn restricted_to<'a, I>(&self, keep: I) -> ScoreVector
    where
        I: IntoIterator<Item = &'a str>,
    {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        ScoreVector {
            scores: self
                .scores
                .iter()
                .filter(|(name, _)| keep.contains(name.as_str()))
                .map(|(name, score)| (name.clone(), *score))
                .collect(),
            iterations_used: self.iterations_used,
            final_error: self.final_error,
            converged: self.converged,
            error_history: self.error_history.clone(),
        }
    }

    pub(crate) fn from_parts(
        modules: &[crate::graph::ModuleId],
        values: &[f64],
        iterations_used: u32,
        final_error: f64,
        converged: bool,
        error_history: Vec<f64>,
    ) -> Self {
        ScoreVector {
            scores: modules
                .iter()
                .zip(values)
                .map(|(m, &s)| (m.name.clone(), s))
                .collect(),
            iterations_used,
            final_error,
            converged,
            error_history,
        }
    }
}

/// One column of the transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum TransitionColumn {
    /// Source has no out-edges; the column is uniformly `1/m`.
    Dangling,
    /// `(target, probability)` entries summing to 1.
    Entries(Vec<(usize, f64)>),
}

/// Column-stochastic transition structure over the matrix's node order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    columns: Vec<TransitionColumn>,
}

impl TransitionMatrix {
    pub fn node_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, v: usize) -> &TransitionColumn {
        &self.columns[v]
    }

    /// Probability of moving from `v` to `u`, dangling column included.
    pub fn probability(&self, u: usize, v: usize) -> f64 {
        match &self.columns[v] {
            TransitionColumn::Dangling => 1.0 / self.columns.len() as f64,
            TransitionColumn::Entries(entries) => entries
                .iter()
                .find(|&&(t, _)| t == u)
                .map(|&(_, p)| p)
                .unwrap_or(0.0),
        }
    }
}

/// Builds the column-stochastic transition structure of a weight matrix.
///
/// Column `v` holds `weight(v, u) / total_out_weight(v)` for every
/// out-neighbor `u` of `v`; dangling columns are marked for uniform
/// redistribution.
pub fn build_transition(matrix: &WeightMatrix) -> TransitionMatrix {
    let columns = (0..matrix.node_count())
        .map(|v| {
            let total = matrix.total_out_weight(v);
            if total <= 0.0 {
                TransitionColumn::Dangling
            } else {
                TransitionColumn::Entries(
                    matrix
                        .out_edges(v)
                        .iter()
                        .map(|&(u, w)| (u, w / total))
                        .collect(),
                )
            }
        })
        .collect();
    TransitionMatrix { columns }
}

/// Power iteration for the score fixed point over a weight matrix.
pub fn solve_matrix(
    matrix: &WeightMatrix,
    config: &SolverConfig,
) -> Result<ScoreVector, SolverError> {
    config.validate()?;
    let m = matrix.node_count();
    if m == 0 {
        return Err(SolverError::EmptyGraph);
    }
    let transition = build_transition(matrix);
    let inv_m = 1.0 / m as f64;
    let teleport = (1.0 - config.damping) * inv_m;

    let mut current = vec![inv_m; m];
    let mut next = vec![0.0f64; m];
    let mut error_history = Vec::new();
    let mut converged = false;
    let mut iterations_used = 0;
    let mut final_error = f64::INFINITY;

    for _ in 0..config.max_iterations {
        next.fill(0.0);
        let mut dangling_mass = Neumaier::new();
        for (v, &x) in current.iter().enumerate() {
            match transition.column(v) {
                TransitionColumn::Dangling => dangling_mass.add(x),
                TransitionColumn::Entries(entries) => {
                    for &(u, p) in entries {
                        next[u] += p * x;
                    }
                }
            }
        }
        let dangling_share = dangling_mass.value() * inv_m;
        let mut err = Neumaier::new();
        for u in 0..m {
            let value = config.damping * (next[u] + dangling_share) + teleport;
            if !value.is_finite() {
                return Err(SolverError::NonFinite);
            }
            err.add((value - current[u]).abs());
            next[u] = value;
        }
        std::mem::swap(&mut current, &mut next);
        iterations_used += 1;
        final_error = err.value();
        error_history.push(final_error);
        if final_error < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(ScoreVector::from_parts(
        matrix.modules(),
        &current,
        iterations_used,
        final_error,
        converged,
        error_history,
    ))
}

/// Scores a graph under its weight mode.
pub fn solve(graph: &DependenceGraph, config: &SolverConfig) -> Result<ScoreVector, SolverError> {
    solve_matrix(&graph.weight_matrix(), config)
}

/// How to score a labeled subset of a larger graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    /// Induce the subgraph on the subset (edges leaving it are dropped) and
    /// solve on that subgraph alone.
    SubsetGraph,
    /// Solve on the whole graph and restrict the resulting scores to the
    /// subset without renormalizing; relative order within the subset is
    /// exactly the whole-graph order.
    WholeProject,
}

/// Scores the labeled subset of a graph under the chosen mode.
pub fn score_subset(
    graph: &DependenceGraph,
    subset: &BTreeSet<String>,
    mode: SubsetMode,
    config: &SolverConfig,
) -> Result<ScoreVector, SolverError> {
    if subset.is_empty() {
        return Err(SolverError::EmptySubset);
    }
    for name in subset {
        if !graph.contains(name) {
            return Err(SolverError::SubsetNotInGraph(name.clone()));
        }
    }
    match mode {
        SubsetMode::SubsetGraph => {
            let sub = graph.induced(subset.iter().map(String::as_str));
            solve(&sub, config)
        }
        SubsetMode::WholeProject => {
            let full = solve(graph, config)?;
            Ok(full.restricted_to(subset.iter().map(String::as_str)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DependenceKind, ModuleId};
    use approx::assert_abs_diff_eq;

    fn quad_graph() -> DependenceGraph {
        let mut g = DependenceGraph::new();
        g.add_module(ModuleId::interface("C")).unwrap();
        for (u, v, kind, n) in [
            ("A", "B", DependenceKind::Ci, 1),
            ("A", "B", DependenceKind::Cm, 2),
            ("A", "C", DependenceKind::Ci, 1),
            ("A", "C", DependenceKind::Ca, 1),
            ("A", "C", DependenceKind::Cm, 1),
            ("A", "D", DependenceKind::Ca, 1),
            ("A", "D", DependenceKind::Cm, 1),
            ("A", "D", DependenceKind::Mm, 3),
            ("B", "A", DependenceKind::Cm, 1),
            ("B", "D", DependenceKind::Cm, 1),
            ("C", "B", DependenceKind::Cm, 1),
            ("D", "B", DependenceKind::Cm, 1),
            ("D", "C", DependenceKind::Ci, 1),
        ] {
            g.add_dependence(u, v, kind, n).unwrap();
        }
        g
    }

    #[test]
    fn quad_transition_columns() {
        let g = quad_graph();
        let m = g.weight_matrix();
        let t = build_transition(&m);
        // Node order is A, B, C, D.
        let col_a = [
            t.probability(0, 0),
            t.probability(1, 0),
            t.probability(2, 0),
            t.probability(3, 0),
        ];
        assert_abs_diff_eq!(col_a[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(col_a[1], 3.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(col_a[2], 3.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(col_a[3], 5.0 / 11.0, epsilon = 1e-15);
        // Column C routes everything to B.
        assert_eq!(t.probability(1, 2), 1.0);
        assert_eq!(t.probability(0, 2), 0.0);
    }

    #[test]
    fn dangling_single_node_column_is_uniform() {
        let mut g = DependenceGraph::new();
        g.add_module(ModuleId::class("X")).unwrap();
        let t = build_transition(&g.weight_matrix());
        assert_eq!(t.probability(0, 0), 1.0);
        assert_eq!(t.column(0), &TransitionColumn::Dangling);
    }

    #[test]
    fn quad_scores_match_reference_values() {
        let scores = solve(&quad_graph(), &SolverConfig::default()).unwrap();
        // Reference fixed point verified against the direct linear solve.
        assert_abs_diff_eq!(scores.score("A").unwrap(), 0.188970, epsilon = 5e-6);
        assert_abs_diff_eq!(scores.score("B").unwrap(), 0.356400, epsilon = 5e-6);
        assert_abs_diff_eq!(scores.score("C").unwrap(), 0.192649, epsilon = 5e-6);
        assert_abs_diff_eq!(scores.score("D").unwrap(), 0.261981, epsilon = 5e-6);
        assert!(scores.converged);
        assert!(scores.iterations_used <= 100);
        assert_abs_diff_eq!(scores.sum(), 1.0, epsilon = 1e-6);
        // Two-decimal rounding of the published kind.
        let rounded: Vec<f64> = ["A", "B", "C", "D"]
            .iter()
            .map(|n| (scores.score(n).unwrap() * 100.0).round() / 100.0)
            .collect();
        assert_eq!(rounded, vec![0.19, 0.36, 0.19, 0.26]);
    }

    #[test]
    fn single_node_scores_one() {
        let mut g = DependenceGraph::new();
        g.add_module(ModuleId::class("Only")).unwrap();
        let scores = solve(&g, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(scores.score("Only").unwrap(), 1.0, epsilon = 1e-12);
        assert!(scores.converged);
    }

    #[test]
    fn two_node_chain_matches_analytic_solution() {
        let mut g = DependenceGraph::new();
        g.add_dependence("A", "B", DependenceKind::Mm, 1).unwrap();
        let scores = solve(&g, &SolverConfig::default()).unwrap();
        // Hand-solved 2x2 system: a = d*b/2 + (1-d)/2, b = d*(a + b/2) + (1-d)/2.
        let expected_a = 0.075 / 0.21375;
        assert_abs_diff_eq!(scores.score("A").unwrap(), expected_a, epsilon = 1e-7);
        assert_abs_diff_eq!(scores.score("B").unwrap(), 1.0 - expected_a, epsilon = 1e-7);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = DependenceGraph::new();
        assert_eq!(
            solve(&g, &SolverConfig::default()),
            Err(SolverError::EmptyGraph)
        );
    }

    #[test]
    fn error_history_shrinks_after_first_iteration() {
        let scores = solve(&quad_graph(), &SolverConfig::default()).unwrap();
        for pair in scores.error_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
    }

    #[test]
    fn iteration_budget_returns_last_iterate_unconverged() {
        let config = SolverConfig {
            max_iterations: 2,
            ..SolverConfig::default()
        };
        let scores = solve(&quad_graph(), &config).unwrap();
        assert!(!scores.converged);
        assert_eq!(scores.iterations_used, 2);
        assert!(scores.final_error >= config.tolerance);
        assert_abs_diff_eq!(scores.sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn subset_identity_when_subset_is_everything() {
        let g = quad_graph();
        let all: BTreeSet<String> = g.module_names().map(str::to_string).collect();
        let full = solve(&g, &SolverConfig::default()).unwrap();
        for mode in [SubsetMode::SubsetGraph, SubsetMode::WholeProject] {
            let sub = score_subset(&g, &all, mode, &SolverConfig::default()).unwrap();
            for (name, score) in full.iter() {
                assert_abs_diff_eq!(sub.score(name).unwrap(), score, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn subset_graph_mode_solves_induced_pair() {
        let g = quad_graph();
        let subset: BTreeSet<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
        let scores = score_subset(
            &g,
            &subset,
            SubsetMode::SubsetGraph,
            &SolverConfig::default(),
        )
        .unwrap();
        // Induced graph has A->B (3) and B->A (1); each node has a single
        // out-edge, so the fixed point is symmetric.
        assert_abs_diff_eq!(scores.score("A").unwrap(), 0.5, epsilon = 1e-7);
        assert_abs_diff_eq!(scores.score("B").unwrap(), 0.5, epsilon = 1e-7);
    }

    #[test]
    fn whole_project_mode_preserves_full_solve_order() {
        let g = quad_graph();
        let subset: BTreeSet<String> = ["A", "C", "D"].iter().map(|s| s.to_string()).collect();
        let full = solve(&g, &SolverConfig::default()).unwrap();
        let sub = score_subset(
            &g,
            &subset,
            SubsetMode::WholeProject,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(sub.len(), 3);
        for name in &subset {
            assert_eq!(sub.score(name), full.score(name));
        }
    }

    #[test]
    fn empty_subset_is_an_error() {
        let g = quad_graph();
        assert_eq!(
            score_subset(
                &g,
                &BTreeSet::new(),
                SubsetMode::SubsetGraph,
                &SolverConfig::default()
            ),
            Err(SolverError::EmptySubset)
        );
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let bad_damping = SolverConfig {
            damping: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad_damping.validate().is_err());
        let bad_tol = SolverConfig {
            tolerance: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad_tol.validate().is_err());
        let bad_iters = SolverConfig {
            max_iterations: 0,
            ..SolverConfig::default()
        };
        assert!(bad_iters.validate().is_err());
    }
}
