//! Hybrid sentence graph: mutual k-NN semantic edges fused with sequential
//! adjacency edges.
//!
//! Semantic weights are cosine similarities clamped to `[0, 1]`; sequential
//! weights decay as `exp(-|i-j|)` for offsets up to `delta`. The fused weight
//! is `lambda = alpha * w_sem + beta * w_seq` and shortest-path work downstream
//! uses the distance `1 / (lambda + 1e-6)`.

mod knn;

pub use knn::{AnnParams, NswIndex};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{cosine, Embedding};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid graph config: {0}")]
    InvalidConfig(String),
    #[error("approximate index build failed: {0}")]
    IndexBuildFailure(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    pub k: usize,
    pub delta: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Documents with more sentences than this use the approximate k-NN index.
    pub ann_threshold: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { k: 8, delta: 1, alpha: 0.25, beta: 0.75, ann_threshold: 2000 }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.k == 0 {
            return Err(GraphError::InvalidConfig("k must be at least 1".to_string()));
        }
        if self.alpha < 0.0 || self.beta < 0.0 {
            return Err(GraphError::InvalidConfig("alpha and beta must be non-negative".to_string()));
        }
        if (self.alpha + self.beta - 1.0).abs() > 1e-9 {
            return Err(GraphError::InvalidConfig(format!(
                "alpha + beta must equal 1, got {}",
                self.alpha + self.beta
            )));
        }
        Ok(())
    }
}

/// Undirected edge with both channel weights. `semantic` / `sequential` record
/// membership in the respective edge sets; a clamped `w_sem` of zero does not
/// erase semantic membership.
#[derive(Debug, Clone, Serialize)]
pub struct HybridEdge {
    pub i: usize,
    pub j: usize,
    pub w_sem: f64,
    pub w_seq: f64,
    pub lambda: f64,
    #[serde(skip)]
    pub semantic: bool,
    #[serde(skip)]
    pub sequential: bool,
}

#[derive(Debug, Clone)]
pub struct HybridGraph {
    n: usize,
    edges: Vec<HybridEdge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl HybridGraph {
    fn from_edges(n: usize, mut edges: Vec<HybridEdge>) -> Self {
        edges.sort_by_key(|e| (e.i, e.j));
        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.i].push((e.j, idx));
            adjacency[e.j].push((e.i, idx));
        }
        for list in adjacency.iter_mut() {
            list.sort_by_key(|(nbr, _)| *nbr);
        }
        HybridGraph { n, edges, adjacency }
    }

    /// Builds a graph directly from weighted undirected edges. Used by tests
    /// and audits that need a graph with prescribed lambdas.
    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let hybrid = edges
            .iter()
            .map(|&(a, b, lambda)| {
                let (i, j) = if a < b { (a, b) } else { (b, a) };
                HybridEdge { i, j, w_sem: 0.0, w_seq: 0.0, lambda, semantic: false, sequential: false }
            })
            .collect();
        HybridGraph::from_edges(n, hybrid)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[HybridEdge] {
        &self.edges
    }

    /// Neighbours of `node` as `(neighbour, edge index)`, ascending by neighbour.
    pub fn neighbors(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    /// Shortest-path length of an edge: strong ties are short.
    pub fn distance(&self, edge_index: usize) -> f64 {
        1.0 / (self.edges[edge_index].lambda + 1e-6)
    }

    /// Edge endpoints as ordered pairs, for set comparisons.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn dump(&self, config: &GraphConfig) -> GraphDump {
        GraphDump {
            nodes: self.n,
            config: config.clone(),
            edges: self.edges.clone(),
        }
    }
}

/// Serialisable audit view of a graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphDump {
    pub nodes: usize,
    pub config: GraphConfig,
    pub edges: Vec<HybridEdge>,
}

/// Exact k-nearest-neighbour lists by cosine similarity. Self-pairs are
/// excluded; ties break toward the lower sentence index. Lists are shorter
/// than `k` when fewer than `k` other sentences exist.
pub fn knn_exact(embeddings: &[Embedding], k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = embeddings.len();
    let mut lists = Vec::with_capacity(n);
    for i in 0..n {
        let mut scored: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (j, cosine(&embeddings[i], &embeddings[j])))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        lists.push(scored);
    }
    lists
}

/// Approximate k-NN lists from a navigable-small-world index. Same output
/// shape and tie conventions as `knn_exact`.
pub fn knn_approx(
    embeddings: &[Embedding],
    k: usize,
    params: &AnnParams,
) -> Result<Vec<Vec<(usize, f64)>>, GraphError> {
    let index = NswIndex::build(embeddings, params)?;
    Ok(index.knn_all(k))
}

/// Keeps pairs that appear in each other's k-NN lists. Returns `(i, j, cosine)`
/// with `i < j`, each undirected pair once, sorted ascending.
pub fn mutual_filter(lists: &[Vec<(usize, f64)>]) -> Vec<(usize, usize, f64)> {
    let n = lists.len();
    let mut member: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for (i, list) in lists.iter().enumerate() {
        for (j, sim) in list {
            member[i].insert(*j, *sim);
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for (&j, &sim) in &member[i] {
            if j > i && member[j].contains_key(&i) {
                edges.push((i, j, sim));
            }
        }
    }
    edges
}

/// Sequential edges between sentences at offset `1..=delta`, weighted
/// `exp(-offset)`. `delta = 0` yields no edges.
pub fn sequential_edges(n: usize, delta: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for offset in 1..=delta {
            let j = i + offset;
            if j >= n {
                break;
            }
            edges.push((i, j, (-(offset as f64)).exp()));
        }
    }
    edges
}

/// Fuses semantic and sequential edge sets into one graph. Semantic weights
/// are clamped to `[0, 1]` here; a pair present in both sets becomes a single
/// edge carrying both weights.
pub fn fuse(
    n: usize,
    semantic: &[(usize, usize, f64)],
    sequential: &[(usize, usize, f64)],
    config: &GraphConfig,
) -> HybridGraph {
    let mut merged: BTreeMap<(usize, usize), HybridEdge> = BTreeMap::new();
    for &(a, b, sim) in semantic {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let w_sem = sim.clamp(0.0, 1.0);
        merged
            .entry((i, j))
            .and_modify(|e| {
                e.w_sem = w_sem;
                e.semantic = true;
            })
            .or_insert(HybridEdge { i, j, w_sem, w_seq: 0.0, lambda: 0.0, semantic: true, sequential: false });
    }
    for &(a, b, w_seq) in sequential {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        merged
            .entry((i, j))
            .and_modify(|e| {
                e.w_seq = w_seq;
                e.sequential = true;
            })
            .or_insert(HybridEdge { i, j, w_sem: 0.0, w_seq, lambda: 0.0, semantic: false, sequential: true });
    }
    let mut edges: Vec<HybridEdge> = merged.into_values().collect();
    for e in edges.iter_mut() {
        e.lambda = config.alpha * e.w_sem + config.beta * e.w_seq;
    }
    HybridGraph::from_edges(n, edges)
}

/// Full construction: route to exact or approximate k-NN by size, apply the
/// mutual filter, add sequential edges and fuse.
pub fn build_hybrid_graph(
    embeddings: &[Embedding],
    config: &GraphConfig,
) -> Result<HybridGraph, GraphError> {
    config.validate()?;
    let n = embeddings.len();
    let lists = if n > config.ann_threshold {
        knn_approx(embeddings, config.k, &AnnParams::default())?
    } else {
        knn_exact(embeddings, config.k)
    };
    let semantic = mutual_filter(&lists);
    let sequential = sequential_edges(n, config.delta);
    Ok(fuse(n, &semantic, &sequential, config))
}
