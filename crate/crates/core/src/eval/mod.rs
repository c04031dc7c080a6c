//! Evaluation of predicted-important module sets against ground-truth labels.
//!
//! Classification quality is summarized by precision, recall, F1 and the
//! effort-reduction indicator
//!
//! ```text
//! ER = (y/k - x/n) / (y/k)
//! ```
//!
//! where `n` is the number of labeled modules, `k` of them truly important,
//! `x` the number predicted important and `y` the truly important ones among
//! those. ER measures how much inspection effort the prediction saves over a
//! random selection achieving the same recall; it is undefined when `y = 0`
//! (a random model needs no effort to find nothing) and reported as `None`,
//! excluded from averages with the exclusion counted.
//!
//! Zero conventions: precision is 0 when nothing is predicted, recall is 0
//! when the labeled set has no important modules (possible only in bootstrap
//! test splits), and F1 is 0 whenever precision + recall is 0.

pub mod bootstrap;
pub mod report;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("labels file line {line}: {message}")]
    MalformedLabels { line: usize, message: String },
    #[error("label set contains no important modules")]
    NoImportantModules,
    #[error("label set is empty")]
    EmptyLabels,
    #[error("predicted modules are not labeled: {}", .0.join(", "))]
    UnlabeledPrediction(Vec<String>),
    #[error("labeled modules missing from the score domain: {}", .0.join(", "))]
    MissingScores(Vec<String>),
    #[error("bootstrap needs at least 2 instances, got {0}")]
    TooFewInstances(usize),
    #[error("threshold list is empty")]
    NoThresholds,
    #[error("{0}")]
    Ranking(#[from] crate::ranking::RankError),
    #[error("{0}")]
    Solver(#[from] crate::solver::SolverError),
}

/// Ground-truth importance labels over a set of modules.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    labels: BTreeMap<String, bool>,
}

impl LabelSet {
    /// Builds a label set from `(module, important)` pairs.
    ///
    /// Duplicates are rejected. Emptiness is allowed here so that bootstrap
    /// test splits can be represented; user-facing inputs go through
    /// [`LabelSet::parse_csv`], which insists on at least one important
    /// module.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = (String, bool)>,
    {
        let mut labels = BTreeMap::new();
        for (module, important) in pairs {
            if labels.insert(module.clone(), important).is_some() {
                return Err(EvalError::MalformedLabels {
                    line: 0,
                    message: format!("duplicate label for `{module}`"),
                });
            }
        }
        Ok(LabelSet { labels })
    }

    /// Parses `module,label` CSV with labels `important`/`non_important`
    /// (also `1`/`0`). A `module,label` header row is optional; `#` lines are
    /// comments. At least one important module is required.
    pub fn parse_csv(input: &str) -> Result<Self, EvalError> {
        let mut labels = BTreeMap::new();
        let mut first_data_line = true;
        for (idx, raw) in input.lines().enumerate() {
            let line = raw.trim_end();
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if first_data_line && line == "module,label" {
                first_data_line = false;
                continue;
            }
            first_data_line = false;
            let (module, label) = line.split_once(',').ok_or(EvalError::MalformedLabels {
                line: line_no,
                message: "expected `module,label`".to_string(),
            })?;
            if module.is_empty() {
                return Err(EvalError::MalformedLabels {
                    line: line_no,
                    message: "empty module name".to_string(),
                });
            }
            let important = match label.trim() {
                "important" | "1" => true,
                "non_important" | "0" => false,
                other => {
                    return Err(EvalError::MalformedLabels {
                        line: line_no,
                        message: format!(
                            "label must be important/non_important/1/0, found `{other}`"
                        ),
                    })
                }
            };
            if labels.insert(module.to_string(), important).is_some() {
                return Err(EvalError::MalformedLabels {
                    line: line_no,
                    message: format!("duplicate label for `{module}`"),
                });
            }
        }
        if labels.is_empty() {
            return Err(EvalError::EmptyLabels);
        }
        if !labels.values().any(|&v| v) {
            return Err(EvalError::NoImportantModules);
        }
        Ok(LabelSet { labels })
    }

    /// Total number of labeled modules (`n`).
    pub fn n_total(&self) -> usize {
        self.labels.len()
    }

    /// Number of modules labeled important (`k`).
    pub fn k_true(&self) -> usize {
        self.labels.values().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, module: &str) -> Option<bool> {
        self.labels.get(module).copied()
    }

    /// Labeled module names in lexicographic order.
    pub fn modules(&self) -> impl Iterator<Item = &str> {
        self.labels.keys().map(String::as_str)
    }

    /// The important modules.
    pub fn important(&self) -> BTreeSet<String> {
        self.labels
            .iter()
            .filter(|(_, &v)| v)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Restriction to the listed modules; names outside the set are ignored.
    pub fn restricted_to<'a, I>(&self, keep: I) -> LabelSet
    where
        I: IntoIterator<Item = &'a str>,
    {
        let keep: BTreeSet<&str> = keep.into_iter().collect();
        LabelSet {
            labels: self
                .labels
                .iter()
                .filter(|(name, _)| keep.contains(name.as_str()))
                .map(|(name, &v)| (name.clone(), v))
                .collect(),
        }
    }
}

/// The four classification cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl ConfusionMatrix {
    /// Modules predicted important (`x`).
    pub fn predicted_important(&self) -> usize {
        self.true_positives + self.false_positives
    }

    /// Truly important modules among the predicted (`y`).
    pub fn found_important(&self) -> usize {
        self.true_positives
    }

    /// Truly important modules overall (`k`).
    pub fn actual_important(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    /// All labeled modules (`n`).
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// Counts the confusion cells of a predicted-important set.
///
/// Every predicted module must be labeled.
pub fn confusion(
    predicted: &BTreeSet<String>,
    labels: &LabelSet,
) -> Result<ConfusionMatrix, EvalError> {
    let unlabeled: Vec<String> = predicted
        .iter()
        .filter(|m| labels.label(m).is_none())
        .cloned()
        .collect();
    if !unlabeled.is_empty() {
        return Err(EvalError::UnlabeledPrediction(unlabeled));
    }
    let mut cm = ConfusionMatrix {
        true_positives: 0,
        false_positives: 0,
        true_negatives: 0,
        false_negatives: 0,
    };
    for module in labels.modules() {
        let important = labels.label(module).expect("iterating own keys");
        let predicted_important = predicted.contains(module);
        match (important, predicted_important) {
            (true, true) => cm.true_positives += 1,
            (false, true) => cm.false_positives += 1,
            (false, false) => cm.true_negatives += 1,
            (true, false) => cm.false_negatives += 1,
        }
    }
    Ok(cm)
}

/// Derived quality indicators at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorRecord {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Effort reduction; `None` when no important module was found (`y = 0`).
    pub er: Option<f64>,
}

/// Computes precision, recall, F1 and ER from a confusion matrix.
pub fn indicators(cm: &ConfusionMatrix) -> IndicatorRecord {
    let tp = cm.true_positives as f64;
    let x = cm.predicted_important();
    let k = cm.actual_important();
    let n = cm.total();

    let precision = if x == 0 { 0.0 } else { tp / x as f64 };
    let recall = if k == 0 { 0.0 } else { tp / k as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let er = if cm.found_important() == 0 {
        None
    } else {
        let effort_random = tp / k as f64;
        let effort_model = x as f64 / n as f64;
        Some((effort_random - effort_model) / effort_random)
    };
    IndicatorRecord {
        precision,
        recall,
        f1,
        er,
    }
}
