//! Metrics and comparison report files.
//!
//! Metrics files carry, per threshold, the single-shot indicators on the full
//! label set and (when bootstrap runs were requested) the per-run records and
//! their means. Comparison reports pair two metrics files run by run and
//! test each metric/threshold cell with the Wilcoxon signed-rank test,
//! Cliff's delta, and a Benjamini-Hochberg adjustment whose family is every
//! cell of the report.
//!
//! Both files are JSON with a `format` version field and a deterministic
//! field order, so byte-identical inputs produce byte-identical reports.

use super::bootstrap::{BootstrapResult, IndicatorMeans, ThresholdSummary};
use super::stats::{benjamini_hochberg, cliffs_delta, wilcoxon_signed_rank, DeltaMagnitude};
use super::IndicatorRecord;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Format tag of metrics files.
pub const METRICS_FORMAT: &str = "docrank-metrics v1";
/// Format tag of comparison reports.
pub const COMPARISON_FORMAT: &str = "docrank-comparison v1";

/// The metrics a comparison is run over, in report order.
pub const COMPARED_METRICS: [&str; 4] = ["precision", "recall", "f1", "er"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("metrics file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported metrics format `{0}` (expected `{METRICS_FORMAT}`)")]
    WrongFormat(String),
    #[error("metrics files disagree on {what}: `{a}` vs `{b}`")]
    ProvenanceMismatch {
        what: &'static str,
        a: String,
        b: String,
    },
    #[error("metrics files have no bootstrap section to pair")]
    NoBootstrap,
    #[error("{0}")]
    Stats(#[from] super::stats::StatsError),
}

/// RNG provenance, pinned so paired comparisons can verify identical splits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngInfo {
    pub generator: String,
    pub seed_rule: String,
}

impl RngInfo {
    pub fn pinned() -> Self {
        RngInfo {
            generator: super::bootstrap::RNG_GENERATOR.to_string(),
            seed_rule: super::bootstrap::RNG_SEED_RULE.to_string(),
        }
    }
}

/// Single-shot indicators at one threshold on the full label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleShotRecord {
    pub threshold: f64,
    pub cutoff_count: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub er: Option<f64>,
}

/// Per-run indicators, serialized with the run index for readability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerRunRecord {
    pub run: u32,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub er: Option<f64>,
}

/// Means over runs at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRecord {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub er: Option<f64>,
}

/// Bootstrap aggregate of one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapThresholdRecord {
    pub threshold: f64,
    pub mean: MeanRecord,
    pub er_excluded_runs: u32,
    pub per_run: Vec<PerRunRecord>,
}

/// One metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub format: String,
    pub approach: String,
    /// Bootstrap repetitions; 0 means the bootstrap section is absent.
    pub runs: u32,
    pub rng: RngInfo,
    /// Effective configuration, embedded for provenance.
    pub config: serde_json::Value,
    pub single_shot: Vec<SingleShotRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<Vec<BootstrapThresholdRecord>>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }

    pub fn from_json(input: &str) -> Result<Self, ReportError> {
        let report: MetricsReport = serde_json::from_str(input)?;
        if report.format != METRICS_FORMAT {
            return Err(ReportError::WrongFormat(report.format));
        }
        Ok(report)
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.single_shot.iter().map(|s| s.threshold).collect()
    }
}

/// Converts a bootstrap result into report records.
pub fn bootstrap_records(result: &BootstrapResult) -> Vec<BootstrapThresholdRecord> {
    result.thresholds.iter().map(threshold_record).collect()
}

fn threshold_record(summary: &ThresholdSummary) -> BootstrapThresholdRecord {
    let IndicatorMeans {
        precision,
        recall,
        f1,
        er,
    } = summary.mean;
    BootstrapThresholdRecord {
        threshold: summary.threshold,
        mean: MeanRecord {
            precision,
            recall,
            f1,
            er,
        },
        er_excluded_runs: summary.er_excluded_runs,
        per_run: summary
            .per_run
            .iter()
            .enumerate()
            .map(|(run, record)| {
                let IndicatorRecord {
                    precision,
                    recall,
                    f1,
                    er,
                } = *record;
                PerRunRecord {
                    run: run as u32,
                    precision,
                    recall,
                    f1,
                    er,
                }
            })
            .collect(),
    }
}

/// One metric/threshold cell of a comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub metric: String,
    pub threshold: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub delta: f64,
    pub magnitude: String,
    /// Which approach the effect favors: `a`, `b`, or `none`.
    pub direction: String,
}

/// Full comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub format: String,
    pub approach_a: String,
    pub approach_b: String,
    pub runs: u32,
    pub rng: RngInfo,
    pub results: Vec<ComparisonCell>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail") + "\n"
    }
}

/// Pairs two metrics files and compares every metric at every threshold.
///
/// Requires matching thresholds, run counts and RNG provenance; otherwise
/// the per-run values would not be a valid paired sample. ER pairs where
/// either side is undefined are dropped from that cell's test; a cell with no
/// remaining pairs reports `p = 1`, `delta = 0`.
pub fn compare_reports(
    a: &MetricsReport,
    b: &MetricsReport,
) -> Result<ComparisonReport, ReportError> {
    if a.runs != b.runs {
        return Err(ReportError::ProvenanceMismatch {
            what: "run counts",
            a: a.runs.to_string(),
            b: b.runs.to_string(),
        });
    }
    if a.rng != b.rng {
        return Err(ReportError::ProvenanceMismatch {
            what: "rng provenance",
            a: format!("{:?}", a.rng),
            b: format!("{:?}", b.rng),
        });
    }
    let (boot_a, boot_b) = match (&a.bootstrap, &b.bootstrap) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(ReportError::NoBootstrap),
    };
    let thresholds_a: Vec<f64> = boot_a.iter().map(|t| t.threshold).collect();
    let thresholds_b: Vec<f64> = boot_b.iter().map(|t| t.threshold).collect();
    if thresholds_a != thresholds_b {
        return Err(ReportError::ProvenanceMismatch {
            what: "thresholds",
            a: format!("{thresholds_a:?}"),
            b: format!("{thresholds_b:?}"),
        });
    }

    let mut cells = Vec::new();
    let mut raw_ps = Vec::new();
    for (ta, tb) in boot_a.iter().zip(boot_b) {
        for metric in COMPARED_METRICS {
            let pairs = paired_values(metric, &ta.per_run, &tb.per_run);
            let (p_raw, delta, magnitude) = if pairs.is_empty() {
                (1.0, 0.0, DeltaMagnitude::Negligible)
            } else {
                let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
                let ys: Vec<f64> = pairs.iter().map(|&(_, y)| y).collect();
                let p = wilcoxon_signed_rank(&xs, &ys)?;
                let (delta, magnitude) = cliffs_delta(&xs, &ys)?;
                (p, delta, magnitude)
            };
            raw_ps.push(p_raw);
            cells.push(ComparisonCell {
                metric: metric.to_string(),
                threshold: ta.threshold,
                p_raw,
                p_adjusted: f64::NAN, // filled below
                delta,
                magnitude: magnitude.as_str().to_string(),
                direction: match delta.total_cmp(&0.0) {
                    std::cmp::Ordering::Greater => "a".to_string(),
                    std::cmp::Ordering::Less => "b".to_string(),
                    std::cmp::Ordering::Equal => "none".to_string(),
                },
            });
        }
    }
    let adjusted = benjamini_hochberg(&raw_ps)?;
    for (cell, p_adj) in cells.iter_mut().zip(adjusted) {
        cell.p_adjusted = p_adj;
    }

    Ok(ComparisonReport {
        format: COMPARISON_FORMAT.to_string(),
        approach_a: a.approach.clone(),
        approach_b: b.approach.clone(),
        runs: a.runs,
        rng: a.rng.clone(),
        results: cells,
    })
}

fn paired_values(metric: &str, a: &[PerRunRecord], b: &[PerRunRecord]) -> Vec<(f64, f64)> {
    a.iter()
        .zip(b)
        .filter_map(|(ra, rb)| match metric {
            "precision" => Some((ra.precision, rb.precision)),
            "recall" => Some((ra.recall, rb.recall)),
            "f1" => Some((ra.f1, rb.f1)),
            "er" => match (ra.er, rb.er) {
                (Some(x), Some(y)) => Some((x, y)),
                _ => None,
            },
            _ => unreachable!("unknown metric"),
        })
        .collect()
}
