//! Comparison baselines: LEAD and TextRank.
//!
//! Both feed the same greedy budget walk as the main selector (with
//! de-duplication off) so that differences in the numbers come from the
//! ranking alone.

use serde::{Deserialize, Serialize};

use crate::embed::{cosine, Embedding};
use crate::segment::Sentence;
use crate::select::{greedy_select, rank, SelectionConfig, SelectionOutcome};

/// LEAD baseline: the first `head` sentences (classically three), in order,
/// subject to the token budget.
pub fn lead_baseline(
    sentences: &[Sentence],
    embeddings: &[Embedding],
    head: usize,
    budget_tokens: usize,
) -> SelectionOutcome {
    let order: Vec<usize> = (0..sentences.len().min(head)).collect();
    let config = SelectionConfig { nms_enabled: false, ..SelectionConfig::default() };
    greedy_select(sentences, embeddings, &order, budget_tokens, &config)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TextRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for TextRankParams {
    fn default() -> Self {
        TextRankParams { damping: 0.85, tol: 1e-6, max_iters: 100 }
    }
}

/// Weighted PageRank over the dense cosine-similarity graph (negatives clamped
/// to zero, empty diagonal). Dangling mass is redistributed uniformly, so the
/// scores always sum to 1. Returns the scores and whether the L1 change fell
/// below `tol` within the iteration cap.
pub fn textrank_scores(embeddings: &[Embedding], params: &TextRankParams) -> (Vec<f64>, bool) {
    let n = embeddings.len();
    if n == 0 {
        return (vec![], true);
    }
    let mut weights = vec![vec![0.0f64; n]; n];
    let mut out_sum = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = cosine(&embeddings[i], &embeddings[j]).max(0.0);
            weights[i][j] = w;
            out_sum[i] += w;
        }
    }

    let uniform = 1.0 / n as f64;
    let mut scores = vec![uniform; n];
    let mut converged = false;
    for _ in 0..params.max_iters {
        let dangling: f64 = (0..n).filter(|&j| out_sum[j] == 0.0).map(|j| scores[j]).sum();
        let mut next = vec![(1.0 - params.damping) * uniform; n];
        for j in 0..n {
            if out_sum[j] == 0.0 {
                continue;
            }
            let share = params.damping * scores[j] / out_sum[j];
            for i in 0..n {
                next[i] += share * weights[j][i];
            }
        }
        let dangling_share = params.damping * dangling * uniform;
        for v in next.iter_mut() {
            *v += dangling_share;
        }
        let change: f64 = next.iter().zip(&scores).map(|(a, b)| (a - b).abs()).sum();
        scores = next;
        if change < params.tol {
            converged = true;
            break;
        }
    }
    (scores, converged)
}

/// TextRank baseline: PageRank scores ranked and fed through the budget walk
/// without de-duplication.
pub fn textrank_baseline(
    sentences: &[Sentence],
    embeddings: &[Embedding],
    budget_tokens: usize,
    params: &TextRankParams,
) -> (SelectionOutcome, Vec<f64>, bool) {
    let (scores, converged) = textrank_scores(embeddings, params);
    let order = rank(&scores);
    let config = SelectionConfig { nms_enabled: false, ..SelectionConfig::default() };
    let outcome = greedy_select(sentences, embeddings, &order, budget_tokens, &config);
    (outcome, scores, converged)
}
