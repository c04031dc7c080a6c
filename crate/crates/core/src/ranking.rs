//! Deterministic ranking of score vectors and top-k% selection.
//!
//! Modules are ordered by descending score; exact ties fall back to ascending
//! module name, so the same scores always yield the same list on every
//! platform. The top-k% cutoff is `max(1, round_half_up(n * k / 100))`; it
//! never selects zero modules and `k = 100` selects everything.

use crate::solver::ScoreVector;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("cannot rank an empty score vector")]
    EmptyScores,
    #[error("k percent must lie in (0, 100], got {0}")]
    InvalidKPercent(f64),
    #[error("score for `{0}` is not finite")]
    NonFiniteScore(String),
    #[error("ranking file line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// One ranked module.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub module: String,
    pub score: f64,
    /// 1-based position in the list.
    pub rank: u32,
}

/// Total order of modules by score, ties broken by name.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &RankedEntry> {
        self.entries.iter()
    }

    /// Module names in rank order.
    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.module.as_str()).collect()
    }

    fn from_pairs(mut pairs: Vec<(String, f64)>) -> Result<Self, RankError> {
        if pairs.is_empty() {
            return Err(RankError::EmptyScores);
        }
        for (name, score) in &pairs {
            if !score.is_finite() {
                return Err(RankError::NonFiniteScore(name.clone()));
            }
        }
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(RankedList {
            entries: pairs
                .into_iter()
                .enumerate()
                .map(|(i, (module, score))| RankedEntry {
                    module,
                    score,
                    rank: (i + 1) as u32,
                })
                .collect(),
        })
    }
}

/// Ranks a score vector.
pub fn rank(scores: &ScoreVector) -> Result<RankedList, RankError> {
    rank_pairs(scores.iter().map(|(name, score)| (name.to_string(), score)))
}

/// Ranks raw `(module, score)` pairs.
pub fn rank_pairs<I>(pairs: I) -> Result<RankedList, RankError>
where
    I: IntoIterator<Item = (String, f64)>,
{
    RankedList::from_pairs(pairs.into_iter().collect())
}

/// Modules selected as "important" at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSelection {
    pub k_percent: f64,
    /// `max(1, round_half_up(n * k / 100))`.
    pub cutoff_count: usize,
    pub selected: BTreeSet<String>,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Cutoff size for `n` modules at threshold `k_percent`.
pub fn cutoff_count(n: usize, k_percent: f64) -> usize {
    round_half_up(n as f64 * k_percent / 100.0).max(1)
}

/// Takes the top k% of a ranked list.
pub fn select_top(ranked: &RankedList, k_percent: f64) -> Result<ThresholdSelection, RankError> {
    if !(k_percent > 0.0 && k_percent <= 100.0) {
        return Err(RankError::InvalidKPercent(k_percent));
    }
    let cutoff = cutoff_count(ranked.len(), k_percent);
    Ok(ThresholdSelection {
        k_percent,
        cutoff_count: cutoff,
        selected: ranked
            .entries()
            .iter()
            .take(cutoff)
            .map(|e| e.module.clone())
            .collect(),
    })
}

/// Writes `module,score,rank` CSV with scores at 10 significant digits.
///
/// `comments` are emitted first, one `# `-prefixed line each.
pub fn ranking_to_csv(ranked: &RankedList, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("module,score,rank\n");
    for e in ranked.iter() {
        let _ = writeln!(out, "{},{:.9e},{}", e.module, e.score, e.rank);
    }
    out
}

/// Writes `module,score,rank,selected` CSV marking a threshold selection.
pub fn selection_to_csv(
    ranked: &RankedList,
    selection: &ThresholdSelection,
    comments: &[String],
) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("module,score,rank,selected\n");
    for e in ranked.iter() {
        let flag = u8::from(selection.selected.contains(&e.module));
        let _ = writeln!(out, "{},{:.9e},{},{}", e.module, e.score, e.rank, flag);
    }
    out
}

/// Parses a ranking CSV produced by [`ranking_to_csv`].
///
/// Comment lines are skipped; the `module,score,rank` header is required.
pub fn ranking_from_csv(input: &str) -> Result<RankedList, RankError> {
    let mut pairs = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != "module,score,rank" {
                return Err(RankError::Malformed {
                    line: line_no,
                    message: format!("expected header `module,score,rank`, found `{line}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(RankError::Malformed {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let score: f64 = fields[1].parse().map_err(|_| RankError::Malformed {
            line: line_no,
            message: format!("invalid score `{}`", fields[1]),
        })?;
        pairs.push((fields[0].to_string(), score));
    }
    if !header_seen {
        return Err(RankError::Malformed {
            line: 1,
            message: "missing `module,score,rank` header".to_string(),
        });
    }
    rank_pairs(pairs)
}
