//! Navigable-small-world index for approximate k-NN over unit vectors.
//!
//! Single-layer graph, greedy beam search from a fixed entry point. The build
//! is fully deterministic: nodes are inserted in input order and every
//! comparison breaks ties on the node index, so repeated builds produce the
//! same links and the same query results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::embed::Embedding;

use super::GraphError;

#[derive(Debug, Clone)]
pub struct AnnParams {
    /// Links created per inserted node.
    pub fanout: usize,
    /// Beam width (result set size) for construction and queries.
    pub beam: usize,
    /// Degree cap; exceeding nodes keep their closest neighbours.
    pub max_degree: usize,
}

impl Default for AnnParams {
    fn default() -> Self {
        AnnParams { fanout: 32, beam: 128, max_degree: 64 }
    }
}

/// Search-frontier entry ordered by similarity descending, then index
/// ascending, under `BinaryHeap` max-pop semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    sim: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sim.total_cmp(&other.sim).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct NswIndex {
    vectors: Vec<Vec<f32>>,
    links: Vec<Vec<usize>>,
    params: AnnParams,
}

impl NswIndex {
    pub fn build(embeddings: &[Embedding], params: &AnnParams) -> Result<Self, GraphError> {
        if embeddings.is_empty() {
            return Err(GraphError::IndexBuildFailure("no vectors to index".to_string()));
        }
        let dim = embeddings[0].dim();
        if embeddings.iter().any(|e| e.dim() != dim) {
            return Err(GraphError::IndexBuildFailure("inconsistent vector dimensions".to_string()));
        }
        if params.fanout == 0 || params.beam == 0 {
            return Err(GraphError::IndexBuildFailure("fanout and beam must be positive".to_string()));
        }

        let mut index = NswIndex {
            vectors: embeddings.iter().map(|e| e.values().to_vec()).collect(),
            links: vec![Vec::new(); embeddings.len()],
            params: params.clone(),
        };

        for node in 1..index.vectors.len() {
            let ef = index.params.beam.max(index.params.fanout);
            let found = index.search(&index.vectors[node], ef, node);
            let targets: Vec<usize> =
                found.iter().take(index.params.fanout).map(|(j, _)| *j).collect();
            for &t in &targets {
                index.links[node].push(t);
                index.links[t].push(node);
                if index.links[t].len() > index.params.max_degree {
                    index.prune(t);
                }
            }
        }
        Ok(index)
    }

    fn prune(&mut self, node: usize) {
        let base = self.vectors[node].clone();
        let mut scored: Vec<Entry> = self.links[node]
            .iter()
            .map(|&j| Entry { sim: dot(&base, &self.vectors[j]), node: j })
            .collect();
        scored.sort_by(|a, b| b.cmp(a));
        scored.truncate(self.params.max_degree);
        self.links[node] = scored.into_iter().map(|e| e.node).collect();
    }

    /// Beam search over the first `limit` nodes, returning up to `ef` hits as
    /// `(node, cosine)` sorted by similarity descending, ties toward the lower
    /// index. Entry point is node 0.
    fn search(&self, query: &[f32], ef: usize, limit: usize) -> Vec<(usize, f64)> {
        let mut visited = vec![false; limit];
        let mut frontier: BinaryHeap<Entry> = BinaryHeap::new();
        let mut results: BinaryHeap<std::cmp::Reverse<Entry>> = BinaryHeap::new();

        let seed = Entry { sim: dot(query, &self.vectors[0]), node: 0 };
        visited[0] = true;
        frontier.push(seed);
        results.push(std::cmp::Reverse(seed));

        while let Some(current) = frontier.pop() {
            if results.len() == ef {
                let worst = results.peek().expect("nonempty").0;
                if current.sim < worst.sim {
                    break;
                }
            }
            for &nbr in &self.links[current.node] {
                if nbr >= limit || visited[nbr] {
                    continue;
                }
                visited[nbr] = true;
                let candidate = Entry { sim: dot(query, &self.vectors[nbr]), node: nbr };
                let admit = if results.len() < ef {
                    true
                } else {
                    candidate > results.peek().expect("nonempty").0
                };
                if admit {
                    frontier.push(candidate);
                    results.push(std::cmp::Reverse(candidate));
                    if results.len() > ef {
                        results.pop();
                    }
                }
            }
        }

        let mut out: Vec<Entry> = results.into_iter().map(|r| r.0).collect();
        out.sort_by(|a, b| b.cmp(a));
        out.into_iter().map(|e| (e.node, e.sim)).collect()
    }

    /// k-NN lists for every indexed vector, excluding the query node itself.
    pub fn knn_all(&self, k: usize) -> Vec<Vec<(usize, f64)>> {
        let n = self.vectors.len();
        let ef = self.params.beam.max(k + 1);
        (0..n)
            .map(|i| {
                self.search(&self.vectors[i], ef, n)
                    .into_iter()
                    .filter(|(j, _)| *j != i)
                    .take(k)
                    .collect()
            })
            .collect()
    }
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x as f64) * (*y as f64)).sum()
}
