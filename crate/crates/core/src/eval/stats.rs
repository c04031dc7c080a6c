//! Paired statistical comparison: Wilcoxon signed-rank test, Cliff's delta
//! effect size, and Benjamini-Hochberg adjustment.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("samples must be non-empty")]
    Empty,
    #[error("samples contain a non-finite value")]
    NonFinite,
    #[error("p-value {0} outside [0, 1]")]
    PValueOutOfRange(f64),
}

/// Largest number of nonzero pairs handled by the exact distribution; larger
/// samples use the normal approximation with tie correction.
pub const WILCOXON_EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped (Wilcoxon's original treatment); if every
/// difference is zero the samples are indistinguishable and `p = 1`. Absolute
/// differences are ranked with average ranks for ties. Up to
/// [`WILCOXON_EXACT_LIMIT`] nonzero pairs the p-value is exact over all `2^m`
/// sign assignments (`p = 2 * min(P(W <= w), P(W >= w))`, capped at 1);
/// beyond that a tie-corrected normal approximation is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(StatsError::Empty);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let m = diffs.len();
    if m == 0 {
        return Ok(1.0);
    }

    let ranks = average_ranks(&diffs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    if m <= WILCOXON_EXACT_LIMIT {
        Ok(exact_two_sided(&ranks, w_plus))
    } else {
        Ok(normal_two_sided(&ranks, w_plus))
    }
}

/// Average ranks of `|diffs|`, ties sharing their mean rank.
fn average_ranks(diffs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut pos = 0;
    while pos < order.len() {
        let mut end = pos + 1;
        while end < order.len() && diffs[order[end]].abs() == diffs[order[pos]].abs() {
            end += 1;
        }
        // Positions pos..end hold ranks pos+1 ..= end; share the average.
        let avg = (pos + 1 + end) as f64 / 2.0;
        for &idx in &order[pos..end] {
            ranks[idx] = avg;
        }
        pos = end;
    }
    ranks
}

/// Exact two-sided p over all sign assignments, via a count distribution on
/// doubled ranks (doubling makes tie-averaged half-ranks integral).
fn exact_two_sided(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let observed = (2.0 * w_plus).round() as usize;
    let below: u64 = counts[..=observed].iter().sum();
    let above: u64 = counts[observed..].iter().sum();
    let assignments = (1u64 << ranks.len()) as f64;
    (2.0 * below.min(above) as f64 / assignments).min(1.0)
}

/// Normal approximation with tie correction.
fn normal_two_sided(ranks: &[f64], w_plus: f64) -> f64 {
    let m = ranks.len() as f64;
    let mean = m * (m + 1.0) / 4.0;
    let mut variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0;
    // Tie groups: every distinct rank value of multiplicity t subtracts
    // (t^3 - t) / 48.
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut pos = 0;
    while pos < sorted.len() {
        let mut end = pos + 1;
        while end < sorted.len() && sorted[end] == sorted[pos] {
            end += 1;
        }
        let t = (end - pos) as f64;
        variance -= (t * t * t - t) / 48.0;
        pos = end;
    }
    let z = (w_plus - mean) / variance.sqrt();
    libm::erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Magnitude bands for Cliff's delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMagnitude {
    /// `|delta| < 0.147`
    Negligible,
    /// `0.147 <= |delta| < 0.33`
    Small,
    /// `0.33 <= |delta| < 0.474`
    Moderate,
    /// `|delta| >= 0.474`
    Large,
}

impl DeltaMagnitude {
    pub fn as_str(&self) -> &'static str {
        match self {
            DeltaMagnitude::Negligible => "negligible",
            DeltaMagnitude::Small => "small",
            DeltaMagnitude::Moderate => "moderate",
            DeltaMagnitude::Large => "large",
        }
    }

    fn from_delta(delta: f64) -> Self {
        let d = delta.abs();
        if d < 0.147 {
            DeltaMagnitude::Negligible
        } else if d < 0.33 {
            DeltaMagnitude::Small
        } else if d < 0.474 {
            DeltaMagnitude::Moderate
        } else {
            DeltaMagnitude::Large
        }
    }
}

/// Cliff's delta effect size with its magnitude band.
///
/// `delta = (#{a_i > b_j} - #{a_i < b_j}) / (|a| * |b|)`, counted over all
/// cross pairs; ties contribute nothing.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<(f64, DeltaMagnitude), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut greater = 0i64;
    let mut less = 0i64;
    for &x in a {
        for &y in b {
            match x.total_cmp(&y) {
                std::cmp::Ordering::Greater => greater += 1,
                std::cmp::Ordering::Less => less += 1,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    let delta = (greater - less) as f64 / (a.len() * b.len()) as f64;
    Ok((delta, DeltaMagnitude::from_delta(delta)))
}

/// Benjamini-Hochberg step-up adjustment.
///
/// Sorting ascending, `adjusted_(i) = min over j >= i of (m * p_(j) / j)`
/// clipped to 1; values return in the original order.
pub fn benjamini_hochberg(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(StatsError::PValueOutOfRange(p));
        }
    }
    let m = p_values.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]).then(i.cmp(&j)));

    let mut adjusted = vec![0.0; m];
    let mut running_min = 1.0f64;
    for (sorted_pos, &original) in order.iter().enumerate().rev() {
        // The factor form keeps the largest rank exact (m/m = 1), so equal
        // inputs come back unchanged.
        let scaled = p_values[original] * (m as f64 / (sorted_pos + 1) as f64);
        running_min = running_min.min(scaled).min(1.0);
        adjusted[original] = running_min;
    }
    Ok(adjusted)
}
