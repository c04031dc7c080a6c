//! Property tests for the scoring pipeline: oracle agreement between the
//! power iteration and the direct linear solve, simplex invariants, scale
//! freedom, permutation equivariance, and graph-file round trips.

use docrank_core::graph::io::{graph_from_str, graph_to_string};
use docrank_core::solver::direct::solve_direct_graph;
use docrank_core::{solve, DependenceGraph, DependenceKind, ModuleId, SolverConfig, WeightMode};
use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

/// Deterministic random graph: `n` nodes, each ordered pair carrying random
/// counts in 0..=5 per kind with probability `density`.
fn random_graph(seed: u64, n: usize, density: f64, mode: WeightMode) -> DependenceGraph {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut graph = DependenceGraph::with_mode(mode).unwrap();
    for i in 0..n {
        let id = if rng.next_u64() % 2 == 0 {
            ModuleId::class(format!("m{i:03}"))
        } else {
            ModuleId::interface(format!("m{i:03}"))
        };
        graph.add_module(id).unwrap();
    }
    let names: Vec<String> = graph.module_names().map(str::to_string).collect();
    for u in &names {
        for v in &names {
            if u == v {
                continue;
            }
            if (rng.next_u64() % 1000) as f64 >= density * 1000.0 {
                continue;
            }
            let counts = [
                rng.next_u64() % 2, // ci stays binary
                rng.next_u64() % 6,
                rng.next_u64() % 6,
                rng.next_u64() % 6,
            ];
            for (kind, count) in [
                DependenceKind::Ci,
                DependenceKind::Ca,
                DependenceKind::Cm,
                DependenceKind::Mm,
            ]
            .into_iter()
            .zip(counts)
            {
                if count > 0 {
                    graph.add_dependence(u, v, kind, count as u32).unwrap();
                }
            }
        }
    }
    graph
}

fn all_modes(seed: u64) -> WeightMode {
    match seed % 4 {
        0 => WeightMode::Uniform,
        1 => WeightMode::Empirical,
        2 => WeightMode::BackRecommendation { back_fraction: 0.5 },
        _ => WeightMode::EmpiricalBack { back_fraction: 0.5 },
    }
}

#[test]
fn iterative_and_direct_solvers_agree_on_small_graphs() {
    let config = SolverConfig {
        tolerance: 1e-12,
        max_iterations: 2000,
        ..SolverConfig::default()
    };
    for seed in 0..250u64 {
        let n = 1 + (seed as usize % 8);
        let graph = random_graph(seed, n, 0.4, all_modes(seed));
        let iterative = solve(&graph, &config).unwrap();
        let direct = solve_direct_graph(&graph, &config).unwrap();
        for (name, score) in iterative.iter() {
            let reference = direct.score(name).unwrap();
            assert!(
                (score - reference).abs() < 1e-6,
                "seed {seed}: {name} iterative {score} vs direct {reference}"
            );
        }
    }
}

#[test]
fn scores_stay_on_the_simplex() {
    let config = SolverConfig::default();
    for seed in 0..60u64 {
        let n = 2 + (seed as usize * 7) % 199;
        let graph = random_graph(seed.wrapping_mul(977), n, 0.05, all_modes(seed));
        let scores = solve(&graph, &config).unwrap();
        let m = graph.node_count() as f64;
        assert!(
            (scores.sum() - 1.0).abs() < 1e-6,
            "seed {seed}: sum {}",
            scores.sum()
        );
        let floor = (1.0 - config.damping) / m - 1e-12;
        for (name, score) in scores.iter() {
            assert!(score >= floor, "seed {seed}: {name} below teleport floor");
        }
    }
}

#[test]
fn scores_are_scale_invariant() {
    let config = SolverConfig {
        tolerance: 1e-12,
        max_iterations: 2000,
        ..SolverConfig::default()
    };
    for seed in 200..230u64 {
        let graph = random_graph(seed, 2 + (seed as usize % 30), 0.15, all_modes(seed));
        let matrix = graph.weight_matrix();
        let base = docrank_core::solver::solve_matrix(&matrix, &config).unwrap();
        for factor in [0.5, 3.0, 10.0] {
            let scaled =
                docrank_core::solver::solve_matrix(&matrix.scaled(factor), &config).unwrap();
            for (name, score) in base.iter() {
                assert!(
                    (score - scaled.score(name).unwrap()).abs() < 1e-8,
                    "seed {seed} factor {factor}: {name}"
                );
            }
        }
    }
}

#[test]
fn relabeling_nodes_permutes_scores() {
    let config = SolverConfig {
        tolerance: 1e-12,
        max_iterations: 2000,
        ..SolverConfig::default()
    };
    for seed in 300..330u64 {
        let graph = random_graph(seed, 2 + (seed as usize % 12), 0.3, WeightMode::Uniform);
        // Relabel m### to swap lexicographic order: z-prefixed reversed index.
        let names: Vec<String> = graph.module_names().map(str::to_string).collect();
        let relabel = |name: &str| -> String {
            let idx = names.iter().position(|n| n == name).unwrap();
            format!("z{:03}", names.len() - idx)
        };
        let mut permuted = DependenceGraph::new();
        for module in graph.modules() {
            permuted
                .add_module(ModuleId {
                    name: relabel(&module.name),
                    kind: module.kind,
                })
                .unwrap();
        }
        for (u, v, counts) in graph.edges() {
            for (kind, count) in [
                (DependenceKind::Ci, counts.ci),
                (DependenceKind::Ca, counts.ca),
                (DependenceKind::Cm, counts.cm),
                (DependenceKind::Mm, counts.mm),
            ] {
                if count > 0 {
                    permuted
                        .add_dependence(&relabel(u), &relabel(v), kind, count)
                        .unwrap();
                }
            }
        }
        let original = solve(&graph, &config).unwrap();
        let renamed = solve(&permuted, &config).unwrap();
        for (name, score) in original.iter() {
            let other = renamed.score(&relabel(name)).unwrap();
            assert!(
                (score - other).abs() < 1e-9,
                "seed {seed}: {name} {score} vs {other}"
            );
        }
    }
}

#[test]
fn star_hub_dominates_leaves() {
    for leaves in [2usize, 5, 20] {
        let mut graph = DependenceGraph::new();
        graph.add_module(ModuleId::class("hub")).unwrap();
        for i in 0..leaves {
            graph
                .add_dependence(&format!("leaf{i:02}"), "hub", DependenceKind::Mm, 1)
                .unwrap();
        }
        let scores = solve(&graph, &SolverConfig::default()).unwrap();
        let hub = scores.score("hub").unwrap();
        for i in 0..leaves {
            assert!(hub > scores.score(&format!("leaf{i:02}")).unwrap());
        }
    }
}

#[test]
fn error_history_is_monotone_and_convergence_flag_consistent() {
    for seed in 400..430u64 {
        let graph = random_graph(seed, 2 + (seed as usize % 40), 0.2, all_modes(seed));
        let scores = solve(&graph, &SolverConfig::default()).unwrap();
        assert_eq!(scores.error_history.len(), scores.iterations_used as usize);
        for pair in scores.error_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15, "seed {seed}");
        }
        if scores.converged {
            assert!(scores.final_error < SolverConfig::default().tolerance);
            assert!(scores.iterations_used <= SolverConfig::default().max_iterations);
        }
    }
}

#[test]
fn graph_files_round_trip_for_random_graphs() {
    for seed in 500..560u64 {
        let graph = random_graph(seed, (seed as usize) % 15, 0.3, all_modes(seed));
        let text = graph_to_string(&graph);
        let parsed = graph_from_str(&text).unwrap();
        assert_eq!(parsed, graph, "seed {seed}");
        assert_eq!(graph_to_string(&parsed), text, "seed {seed}");
    }
}

#[test]
fn matrix_duality_on_random_graphs() {
    for seed in 600..640u64 {
        let graph = random_graph(seed, 2 + (seed as usize % 20), 0.25, all_modes(seed));
        let matrix = graph.weight_matrix();
        let mut total_checked = 0;
        for u in 0..matrix.node_count() {
            for &(v, w) in matrix.out_edges(u) {
                assert!(w > 0.0);
                assert!(matrix.in_edges(v).contains(&(u, w)), "seed {seed}");
                total_checked += 1;
            }
            // Independent summation of total out-weight.
            let sum: f64 = matrix.out_edges(u).iter().map(|&(_, w)| w).sum();
            assert!((sum - matrix.total_out_weight(u)).abs() < 1e-9);
        }
        let dual_total: usize = (0..matrix.node_count())
            .map(|v| matrix.in_edges(v).len())
            .sum();
        assert_eq!(total_checked, dual_total);
    }
}
