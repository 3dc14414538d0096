//! Structural sentence scoring.
//!
//! Four channels per sentence: task relevance (cosine to the query or document
//! centroid), topic representativeness (cosine to the assigned cluster
//! centroid), bridge centrality (sampled betweenness on the hybrid graph) and
//! cycle membership (binary). The composite score is their weighted sum.

mod betweenness;
mod cycles;

pub use betweenness::{bridge_centrality, min_max_normalize, BridgeScores};
pub use cycles::{cycle_flags, fundamental_cycles};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{cosine, Embedding};
use crate::graph::HybridGraph;
use crate::topics::{representativeness, TopicModel};

/// Channel weights for the composite score. They are expected to sum to 1;
/// deviations are reported as a warning upstream, not an error, so ablations
/// can zero out a channel without renormalising.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringWeights {
    pub task: f64,
    pub rep: f64,
    pub bridge: f64,
    pub cycle: f64,
}

impl Default for ScoringWeights {
    fn default() -> Self {
        ScoringWeights { task: 0.45, rep: 0.30, bridge: 0.20, cycle: 0.05 }
    }
}

impl ScoringWeights {
    pub fn sum(&self) -> f64 {
        self.task + self.rep + self.bridge + self.cycle
    }

    pub fn sums_to_one(&self) -> bool {
        (self.sum() - 1.0).abs() <= 1e-9
    }
}

/// Per-sentence channel scores plus the composite, in sentence order.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreCard {
    pub task: Vec<f64>,
    pub rep: Vec<f64>,
    pub bridge: Vec<f64>,
    pub cycle: Vec<f64>,
    pub composite: Vec<f64>,
    pub weights: ScoringWeights,
}

/// Cosine of each embedding against `target`, clamped to [0, 1].
pub fn task_relevance(embeddings: &[Embedding], target: &Embedding) -> Vec<f64> {
    embeddings
        .iter()
        .map(|e| cosine(e, target).clamp(0.0, 1.0))
        .collect()
}

/// Weighted sum of the four channels, elementwise.
pub fn composite(
    task: &[f64],
    rep: &[f64],
    bridge: &[f64],
    cycle: &[f64],
    weights: &ScoringWeights,
) -> Vec<f64> {
    (0..task.len())
        .map(|i| {
            weights.task * task[i]
                + weights.rep * rep[i]
                + weights.bridge * bridge[i]
                + weights.cycle * cycle[i]
        })
        .collect()
}

/// Assembles the full score card. `n_samples` bounds the betweenness source
/// sample; `rng` drives only that sampling.
#[allow(clippy::too_many_arguments)]
pub fn build_score_card(
    embeddings: &[Embedding],
    target: &Embedding,
    model: &TopicModel,
    graph: &HybridGraph,
    weights: &ScoringWeights,
    n_samples: usize,
    max_cycles: usize,
    rng: &mut ChaCha8Rng,
) -> ScoreCard {
    let task = task_relevance(embeddings, target);
    let rep: Vec<f64> = embeddings
        .iter()
        .enumerate()
        .map(|(i, e)| representativeness(e, model, model.assignment[i]))
        .collect();
    let bridge = bridge_centrality(graph, n_samples, rng).normalized;
    let cycle: Vec<f64> = cycle_flags(graph, max_cycles)
        .into_iter()
        .map(|b| if b { 1.0 } else { 0.0 })
        .collect();
    let composite = composite(&task, &rep, &bridge, &cycle, weights);
    ScoreCard { task, rep, bridge, cycle, composite, weights: *weights }
}
