//! Command implementations. Every command builds its primary output fully in
//! memory and writes it in one step, so the output file exists exactly when
//! the exit code is zero; progress and summaries go to standard error.

use crate::config::RunConfig;
use anyhow::{bail, Context, Result};
use docrank_core::eval::bootstrap::{run_bootstrap, PrecomputedScores, SubgraphResolver};
use docrank_core::eval::report::{
    bootstrap_records, compare_reports, MetricsReport, RngInfo, SingleShotRecord, METRICS_FORMAT,
};
use docrank_core::extract::{extract_project, ExtractOptions};
use docrank_core::graph::io::{graph_from_str, graph_to_string, GRAPH_HEADER};
use docrank_core::ranking::{rank_pairs, ranking_from_csv, ranking_to_csv, selection_to_csv};
use docrank_core::{
    confusion, indicators, score_subset, solve, DependenceGraph, LabelSet, ScoreVector,
};
use std::collections::BTreeSet;
use std::path::Path;

pub fn cmd_extract(src_dir: &Path, out_path: &Path, config: &RunConfig) -> Result<()> {
    let options = ExtractOptions {
        strict: config.strict,
    };
    let outcome = extract_project(src_dir, &options)
        .with_context(|| format!("extraction failed under `{}`", src_dir.display()))?;
    for skipped in &outcome.stats.skipped {
        eprintln!("docrank extract: skipped {skipped}");
    }
    eprintln!(
        "docrank extract: {} files scanned, {} parsed, {} modules, {} edges, {} skipped",
        outcome.stats.files_scanned,
        outcome.stats.files_parsed,
        outcome.graph.node_count(),
        outcome.graph.edge_count(),
        outcome.stats.skipped.len()
    );
    write_output(out_path, &graph_to_string(&outcome.graph))
}

pub fn cmd_rank(
    graph_path: &Path,
    out_path: &Path,
    config: &RunConfig,
    select_top: Option<f64>,
) -> Result<()> {
    let graph = load_graph(graph_path)?.in_mode(config.weight_mode())?;
    if graph.is_empty() {
        bail!("graph `{}` has no modules to rank", graph_path.display());
    }
    let scores = solve(&graph, &config.solver_config())?;
    let ranked = docrank_core::rank(&scores)?;
    let mut comments = vec![
        "docrank-ranking v1".to_string(),
        format!(
            "variant={} damping={} tolerance={} max_iters={} back_fraction={} config={}",
            config.variant.as_str(),
            config.damping,
            config.tolerance,
            config.max_iters,
            config.back_fraction,
            config.hash()
        ),
        format!(
            "modules={} converged={} iterations={}",
            ranked.len(),
            scores.converged,
            scores.iterations_used
        ),
    ];
    eprintln!(
        "docrank rank: {} modules, converged={} after {} iterations (final error {:e})",
        ranked.len(),
        scores.converged,
        scores.iterations_used,
        scores.final_error
    );
    let csv = match select_top {
        Some(k_percent) => {
            let selection = docrank_core::select_top(&ranked, k_percent)?;
            comments.push(format!(
                "select_top={k_percent} cutoff_count={}",
                selection.cutoff_count
            ));
            selection_to_csv(&ranked, &selection, &comments)
        }
        None => ranking_to_csv(&ranked, &comments),
    };
    write_output(out_path, &csv)
}

/// Scores for evaluation: either a graph solved under the config, or a
/// previously written ranking file.
enum ScoredInput {
    Graph(Box<DependenceGraph>, ScoreVector),
    Ranking(ScoreVector),
}

impl ScoredInput {
    fn scores(&self) -> &ScoreVector {
        match self {
            ScoredInput::Graph(_, scores) => scores,
            ScoredInput::Ranking(scores) => scores,
        }
    }
}

pub fn cmd_evaluate(
    input_path: &Path,
    labels_path: &Path,
    out_path: &Path,
    config: &RunConfig,
    approach: Option<&str>,
    require_bootstrap: bool,
) -> Result<()> {
    if require_bootstrap && config.runs == 0 {
        bail!("bootstrap requires runs > 0");
    }
    let labels_text = std::fs::read_to_string(labels_path)
        .with_context(|| format!("cannot read labels file `{}`", labels_path.display()))?;
    let labels = LabelSet::parse_csv(&labels_text)
        .with_context(|| format!("invalid labels file `{}`", labels_path.display()))?;

    let input = load_scored_input(input_path, &labels, config)?;
    let approach = approach
        .map(str::to_string)
        .unwrap_or_else(|| default_approach_name(&input, input_path, config));

    // Single-shot evaluation over the full label set.
    let labeled_pairs: Vec<(String, f64)> = labels
        .modules()
        .map(|m| {
            let score = input
                .scores()
                .score(m)
                .expect("domain checked by load_scored_input");
            (m.to_string(), score)
        })
        .collect();
    let ranked = rank_pairs(labeled_pairs)?;
    let mut single_shot = Vec::new();
    for &threshold in &config.thresholds {
        let selection = docrank_core::select_top(&ranked, threshold)?;
        let cm = confusion(&selection.selected, &labels)?;
        let rec = indicators(&cm);
        single_shot.push(SingleShotRecord {
            threshold,
            cutoff_count: selection.cutoff_count,
            true_positives: cm.true_positives,
            false_positives: cm.false_positives,
            true_negatives: cm.true_negatives,
            false_negatives: cm.false_negatives,
            precision: rec.precision,
            recall: rec.recall,
            f1: rec.f1,
            er: rec.er,
        });
    }

    let bootstrap = if config.runs > 0 {
        let solver_config = config.solver_config();
        let result = match (&input, config.per_run_resolve) {
            (ScoredInput::Graph(graph, _), true) => {
                let provider = SubgraphResolver {
                    graph,
                    config: solver_config,
                };
                run_bootstrap(&provider, &labels, &config.thresholds, config.runs)?
            }
            (ScoredInput::Ranking(_), true) => {
                bail!("--per-run-resolve needs a graph input, not a ranking file")
            }
            (scored, false) => {
                let provider = PrecomputedScores(scored.scores());
                run_bootstrap(&provider, &labels, &config.thresholds, config.runs)?
            }
        };
        Some(bootstrap_records(&result))
    } else {
        None
    };

    let report = MetricsReport {
        format: METRICS_FORMAT.to_string(),
        approach,
        runs: config.runs,
        rng: RngInfo::pinned(),
        config: config.as_json(),
        single_shot,
        bootstrap,
    };
    eprintln!(
        "docrank evaluate: {} labeled modules ({} important), {} thresholds, {} runs",
        labels.n_total(),
        labels.k_true(),
        config.thresholds.len(),
        config.runs
    );
    write_output(out_path, &report.to_json())
}

pub fn cmd_compare(a_path: &Path, b_path: &Path, out_path: &Path) -> Result<()> {
    let load = |path: &Path| -> Result<MetricsReport> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read metrics file `{}`", path.display()))?;
        MetricsReport::from_json(&text)
            .with_context(|| format!("invalid metrics file `{}`", path.display()))
    };
    let a = load(a_path)?;
    let b = load(b_path)?;
    let report = compare_reports(&a, &b).context("metrics files cannot be paired")?;
    eprintln!(
        "docrank compare: `{}` vs `{}` over {} cells",
        report.approach_a,
        report.approach_b,
        report.results.len()
    );
    write_output(out_path, &report.to_json())
}

fn load_graph(path: &Path) -> Result<DependenceGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read graph file `{}`", path.display()))?;
    graph_from_str(&text).with_context(|| format!("invalid graph file `{}`", path.display()))
}

fn load_scored_input(
    input_path: &Path,
    labels: &LabelSet,
    config: &RunConfig,
) -> Result<ScoredInput> {
    let text = std::fs::read_to_string(input_path)
        .with_context(|| format!("cannot read input file `{}`", input_path.display()))?;
    if text.starts_with(GRAPH_HEADER) {
        let graph = graph_from_str(&text)
            .with_context(|| format!("invalid graph file `{}`", input_path.display()))?
            .in_mode(config.weight_mode())?;
        let missing: Vec<String> = labels
            .modules()
            .filter(|m| !graph.contains(m))
            .map(str::to_string)
            .collect();
        if !missing.is_empty() {
            bail!(
                "labeled modules missing from the graph: {}",
                missing.join(", ")
            );
        }
        let subset: BTreeSet<String> = labels.modules().map(str::to_string).collect();
        let scores = score_subset(&graph, &subset, config.subset_mode, &config.solver_config())?;
        Ok(ScoredInput::Graph(Box::new(graph), scores))
    } else {
        let ranked = ranking_from_csv(&text)
            .with_context(|| format!("invalid ranking file `{}`", input_path.display()))?;
        let missing: Vec<String> = {
            let scored: BTreeSet<&str> = ranked.iter().map(|e| e.module.as_str()).collect();
            labels
                .modules()
                .filter(|m| !scored.contains(m))
                .map(str::to_string)
                .collect()
        };
        if !missing.is_empty() {
            bail!(
                "labeled modules missing from the ranking: {}",
                missing.join(", ")
            );
        }
        let pairs: Vec<(String, f64)> =
            ranked.iter().map(|e| (e.module.clone(), e.score)).collect();
        Ok(ScoredInput::Ranking(scores_from_pairs(pairs)))
    }
}

/// Wraps raw pairs in a ScoreVector-compatible container by solving nothing:
/// the values are taken as-is.
fn scores_from_pairs(pairs: Vec<(String, f64)>) -> ScoreVector {
    ScoreVector::from_raw(pairs)
}

fn default_approach_name(input: &ScoredInput, path: &Path, config: &RunConfig) -> String {
    match input {
        ScoredInput::Graph(..) => format!("pagerank_{}", config.variant.as_str()),
        ScoredInput::Ranking(_) => path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("ranking")
            .to_string(),
    }
}

fn write_output(path: &Path, content: &str) -> Result<()> {
    // Stage-and-rename so the output path never holds a partial file; the
    // exit code is zero exactly when the file is complete.
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let staging = path.with_file_name(format!("{file_name}.tmp"));
    std::fs::write(&staging, content)
        .with_context(|| format!("cannot write output file `{}`", staging.display()))?;
    std::fs::rename(&staging, path)
        .with_context(|| format!("cannot finalize output file `{}`", path.display()))?;
    eprintln!("docrank: wrote {}", path.display());
    Ok(())
}
