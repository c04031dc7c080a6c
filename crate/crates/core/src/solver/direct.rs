//! Direct linear-system oracle for the score fixed point.
//!
//! Solves `(I - d*M) * P = ((1 - d) / m) * e` by dense Gaussian elimination
//! with partial pivoting, using the same dangling policy as the iterative
//! solver. Intended as an independent check on [`super::solve`] for small
//! graphs; it shares no code with the power iteration beyond the transition
//! structure.

use super::{build_transition, ScoreVector, SolverConfig, SolverError, TransitionColumn};
use crate::graph::{DependenceGraph, WeightMatrix};
use crate::util::Neumaier;

/// Largest graph the oracle accepts by default.
pub const DEFAULT_ORACLE_BOUND: usize = 64;

/// Direct solve with the default size bound.
pub fn solve_direct(
    matrix: &WeightMatrix,
    config: &SolverConfig,
) -> Result<ScoreVector, SolverError> {
    solve_direct_bounded(matrix, config, DEFAULT_ORACLE_BOUND)
}

/// Direct solve on a graph, convenience over [`solve_direct`].
pub fn solve_direct_graph(
    graph: &DependenceGraph,
    config: &SolverConfig,
) -> Result<ScoreVector, SolverError> {
    solve_direct(&graph.weight_matrix(), config)
}

/// Direct solve with an explicit size bound.
pub fn solve_direct_bounded(
    matrix: &WeightMatrix,
    config: &SolverConfig,
    bound: usize,
) -> Result<ScoreVector, SolverError> {
    config.validate()?;
    let m = matrix.node_count();
    if m == 0 {
        return Err(SolverError::EmptyGraph);
    }
    if m > bound {
        return Err(SolverError::OracleBoundExceeded { nodes: m, bound });
    }

    let transition = build_transition(matrix);
    let d = config.damping;
    let inv_m = 1.0 / m as f64;

    // Dense system A = I - d*M, b = (1-d)/m.
    let mut a = vec![vec![0.0f64; m]; m];
    for (u, row) in a.iter_mut().enumerate() {
        row[u] = 1.0;
        for (v, cell) in row.iter_mut().enumerate() {
            match transition.column(v) {
                TransitionColumn::Dangling => *cell -= d * inv_m,
                TransitionColumn::Entries(entries) => {
                    if let Some(&(_, p)) = entries.iter().find(|&&(t, _)| t == u) {
                        *cell -= d * p;
                    }
                }
            }
        }
    }
    let mut b = vec![(1.0 - d) * inv_m; m];

    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-300 {
            // I - d*M is strictly diagonally dominant for d < 1, so this is
            // unreachable on valid inputs.
            return Err(SolverError::NonFinite);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in col + 1..m {
            let factor = a[row][col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (k, pivot_value) in pivot.iter().enumerate().skip(col) {
                a[row][k] -= factor * pivot_value;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut scores = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for k in row + 1..m {
            acc -= a[row][k] * scores[k];
        }
        scores[row] = acc / a[row][row];
        if !scores[row].is_finite() {
            return Err(SolverError::NonFinite);
        }
    }

    // Residual of the original fixed-point equation, reported as the error.
    let mut residual = Neumaier::new();
    for u in 0..m {
        let mut acc = Neumaier::new();
        for (v, &score) in scores.iter().enumerate() {
            let p = transition.probability(u, v);
            if p != 0.0 {
                acc.add(p * score);
            }
        }
        residual.add((scores[u] - (d * acc.value() + (1.0 - d) * inv_m)).abs());
    }

    Ok(ScoreVector::from_parts(
        matrix.modules(),
        &scores,
        0,
        residual.value(),
        true,
        Vec::new(),
    ))
}
