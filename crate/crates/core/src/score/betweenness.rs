//! Sampled betweenness centrality on the hybrid graph.
//!
//! Weighted Brandes accumulation over a uniform sample of source nodes, with
//! edge length `1 / (lambda + 1e-6)` taken from the graph. Raw sums are scaled
//! by `n / n_samples` (an unbiased estimate of the all-sources total) and then
//! min-max normalised to [0, 1]; a constant profile normalises to all zeros.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand_chacha::ChaCha8Rng;

use crate::graph::HybridGraph;

#[derive(Debug, Clone)]
pub struct BridgeScores {
    /// Scaled accumulations; equals exact betweenness when every node is a source.
    pub raw: Vec<f64>,
    /// Min-max normalised raw scores.
    pub normalized: Vec<f64>,
    /// Sources actually used, ascending.
    pub sources: Vec<usize>,
}

/// Heap item popped in order of ascending distance, ties toward the lower node.
#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueItem {
    dist: f64,
    node: usize,
}

impl Eq for QueueItem {}

impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Computes sampled betweenness. `n_samples` is clamped to [1, n]; when it
/// covers all nodes the sources are 0..n in order and `rng` is not consumed.
pub fn bridge_centrality(graph: &HybridGraph, n_samples: usize, rng: &mut ChaCha8Rng) -> BridgeScores {
    let n = graph.node_count();
    if n == 0 {
        return BridgeScores { raw: vec![], normalized: vec![], sources: vec![] };
    }
    let n_samples = n_samples.clamp(1, n);
    let sources: Vec<usize> = if n_samples == n {
        (0..n).collect()
    } else {
        let mut s = rand::seq::index::sample(rng, n, n_samples).into_vec();
        s.sort_unstable();
        s
    };

    let mut raw = vec![0.0f64; n];
    for &s in &sources {
        accumulate_from(graph, s, &mut raw);
    }
    let scale = n as f64 / n_samples as f64;
    for v in raw.iter_mut() {
        *v *= scale;
    }
    let normalized = min_max_normalize(&raw);
    BridgeScores { raw, normalized, sources }
}

/// One Brandes pass: Dijkstra shortest paths from `s`, then dependency
/// accumulation over nodes in reverse settling order.
fn accumulate_from(graph: &HybridGraph, s: usize, raw: &mut [f64]) {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(QueueItem { dist: 0.0, node: s });

    while let Some(QueueItem { dist: d, node: v }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for &(w, edge) in graph.neighbors(v) {
            let nd = d + graph.distance(edge);
            if nd < dist[w] {
                dist[w] = nd;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(QueueItem { dist: nd, node: w });
            } else if nd == dist[w] {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            raw[w] += delta[w];
        }
    }
}

/// Min-max normalisation to [0, 1]; a constant input maps to all zeros.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return vec![];
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}
