//! Compression quality metrics.
//!
//! Structural metrics are computed against the document's own analysis: topic
//! coverage over the fitted clusters, and retention of bridge and cycle
//! sentences identified by the score card. Content metrics are ROUGE F1
//! against an optional reference summary.

mod baselines;
mod rouge;

pub use baselines::{lead_baseline, textrank_baseline, textrank_scores, TextRankParams};
pub use rouge::{rouge_f1, rouge_tokens, RougeVariant};

use serde::Serialize;

use crate::score::ScoreCard;

/// Metrics for one compressed document. ROUGE fields stay `None` without a
/// reference summary.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub compression_ratio: f64,
    pub budget_ok: bool,
    pub topic_coverage: f64,
    pub bridge_retention: f64,
    pub cycle_retention: f64,
    pub rouge1: Option<f64>,
    pub rouge2: Option<f64>,
    pub rouge_l: Option<f64>,
}

pub fn compression_ratio(tokens_selected: usize, tokens_total: usize) -> f64 {
    if tokens_total == 0 {
        return 0.0;
    }
    tokens_selected as f64 / tokens_total as f64
}

/// Fraction of clusters with at least one selected sentence.
pub fn topic_coverage(assignment: &[usize], selected: &[usize], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut covered = vec![false; k];
    for &i in selected {
        covered[assignment[i]] = true;
    }
    covered.iter().filter(|&&c| c).count() as f64 / k as f64
}

/// Bridge sentences: strictly above the median of the nonzero bridge scores.
/// No nonzero scores means no bridge sentences.
pub fn bridge_nodes(bridge_scores: &[f64]) -> Vec<bool> {
    let mut nonzero: Vec<f64> = bridge_scores.iter().cloned().filter(|&v| v != 0.0).collect();
    if nonzero.is_empty() {
        return vec![false; bridge_scores.len()];
    }
    nonzero.sort_by(f64::total_cmp);
    let mid = nonzero.len() / 2;
    let median = if nonzero.len() % 2 == 1 {
        nonzero[mid]
    } else {
        0.5 * (nonzero[mid - 1] + nonzero[mid])
    };
    bridge_scores.iter().map(|&v| v > median).collect()
}

/// Fraction of marked sentences that were selected. An empty marked set scores
/// 1.0: nothing was there to lose.
fn retention(marked: &[bool], selected: &[usize]) -> f64 {
    let total = marked.iter().filter(|&&m| m).count();
    if total == 0 {
        return 1.0;
    }
    let kept = selected.iter().filter(|&&i| marked[i]).count();
    kept as f64 / total as f64
}

/// Bridge and cycle retention for a selection, with the bridge threshold
/// defaulting to the nonzero median rule when `bridge_threshold` is `None`.
pub fn structure_retention(
    card: &ScoreCard,
    selected: &[usize],
    bridge_threshold: Option<f64>,
) -> (f64, f64) {
    let marked_bridge: Vec<bool> = match bridge_threshold {
        Some(t) => card.bridge.iter().map(|&v| v > t).collect(),
        None => bridge_nodes(&card.bridge),
    };
    let marked_cycle: Vec<bool> = card.cycle.iter().map(|&v| v > 0.0).collect();
    (retention(&marked_bridge, selected), retention(&marked_cycle, selected))
}
