//! Topic skeleton: minibatch k-means over sentence embeddings.
//!
//! K defaults to round(sqrt(N)) clamped to [1, N]. Initialisation is
//! k-means++, updates use the per-centre learning rate 1/count, and the loop
//! stops when the summed squared centroid shift in one iteration falls below
//! `shift_tol`. Finished centroids are re-normalised to unit norm so that
//! representativeness is a plain cosine.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansParams {
    pub batch_size: usize,
    pub max_iters: usize,
    pub shift_tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams { batch_size: 256, max_iters: 100, shift_tol: 1e-4 }
    }
}

/// Fitted topic model. `assignment[i]` is the cluster of sentence `i`;
/// `centroids` are unit vectors (or all-zero when a centre collapsed).
/// `degenerate` marks the all-identical-input fallback; `converged` is false
/// only when the shift criterion was never met within `max_iters`.
#[derive(Debug, Clone)]
pub struct TopicModel {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f32>>,
    pub inertia: f64,
    pub degenerate: bool,
    pub converged: bool,
}

/// Default cluster count: round(sqrt(n)) with half-up rounding, clamped to [1, n].
pub fn choose_k(n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    let root = (n as f64).sqrt();
    let rounded = (root + 0.5).floor() as usize;
    rounded.clamp(1, n)
}

/// Cosine of `embedding` against its assigned centroid, clamped to [0, 1].
/// A zero centroid yields exactly 0.
pub fn representativeness(embedding: &Embedding, model: &TopicModel, label: usize) -> f64 {
    let centroid = &model.centroids[label];
    let dot: f64 = embedding
        .values()
        .iter()
        .zip(centroid)
        .map(|(a, b)| (*a as f64) * (*b as f64))
        .sum();
    dot.clamp(0.0, 1.0)
}

/// Fits minibatch k-means. Deterministic for a fixed RNG stream: batches,
/// initial centres and all tie-breaks depend only on `rng` and input order.
pub fn fit_minibatch_kmeans(
    embeddings: &[Embedding],
    k: usize,
    rng: &mut ChaCha8Rng,
    params: &KMeansParams,
) -> TopicModel {
    assert!(k >= 1 && k <= embeddings.len(), "k must be in [1, n]");
    let n = embeddings.len();
    let dim = embeddings[0].dim();
    let points: Vec<Vec<f64>> = embeddings
        .iter()
        .map(|e| e.values().iter().map(|v| *v as f64).collect())
        .collect();

    if k == 1 {
        return fit_single_cluster(&points, dim);
    }
    if all_identical(&points) {
        // Every point coincides: put everything in cluster 0 and fill the
        // remaining centres with copies so no index is out of range.
        let centroid = renormalize(&points[0]);
        return TopicModel {
            k,
            assignment: vec![0; n],
            centroids: vec![centroid; k],
            inertia: 0.0,
            degenerate: true,
            converged: true,
        };
    }

    let mut centroids = kmeanspp_init(&points, k, rng);
    let mut counts = vec![0usize; k];
    let mut converged = false;

    for _ in 0..params.max_iters {
        let previous = centroids.clone();
        for _ in 0..params.batch_size {
            let idx = rng.random_range(0..n);
            let c = nearest_centroid(&points[idx], &centroids);
            counts[c] += 1;
            let lr = 1.0 / counts[c] as f64;
            for (cv, pv) in centroids[c].iter_mut().zip(&points[idx]) {
                *cv += lr * (pv - *cv);
            }
        }
        let shift: f64 = centroids
            .iter()
            .zip(&previous)
            .map(|(a, b)| squared_distance(a, b))
            .sum();
        if shift < params.shift_tol {
            converged = true;
            break;
        }
    }

    let mut assignment: Vec<usize> = points.iter().map(|p| nearest_centroid(p, &centroids)).collect();
    repair_empty_clusters(&points, &mut centroids, &mut assignment);

    let inertia: f64 = points
        .iter()
        .zip(&assignment)
        .map(|(p, &c)| squared_distance(p, &centroids[c]))
        .sum();

    let centroids: Vec<Vec<f32>> = centroids.iter().map(|c| renormalize(c)).collect();
    TopicModel { k, assignment, centroids, inertia, degenerate: false, converged }
}

fn fit_single_cluster(points: &[Vec<f64>], dim: usize) -> TopicModel {
    let n = points.len() as f64;
    let mut mean = vec![0.0f64; dim];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let inertia: f64 = points.iter().map(|p| squared_distance(p, &mean)).sum();
    TopicModel {
        k: 1,
        assignment: vec![0; points.len()],
        centroids: vec![renormalize(&mean)],
        inertia,
        degenerate: false,
        converged: true,
    }
}

fn all_identical(points: &[Vec<f64>]) -> bool {
    points.windows(2).all(|w| w[0] == w[1])
}

/// k-means++ seeding: first centre uniform, every next centre sampled with
/// probability proportional to squared distance from the nearest chosen one.
/// When all residual mass is zero the lowest-index unused point is taken.
fn kmeanspp_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &points[chosen[0]]))
        .collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p, &points[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn renormalize(v: &[f64]) -> Vec<f32> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x / norm) as f32).collect()
}

/// Moves the farthest point out of a multi-member cluster onto each empty
/// centre until no cluster is empty (bounded by k rounds). Keeps assignments
/// consistent by fully reassigning after each move.
fn repair_empty_clusters(
    points: &[Vec<f64>],
    centroids: &mut [Vec<f64>],
    assignment: &mut [usize],
) {
    let k = centroids.len();
    for _ in 0..k {
        let mut sizes = vec![0usize; k];
        for &a in assignment.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = (0..k).find(|&c| sizes[c] == 0) else {
            return;
        };
        let mut donor: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if sizes[assignment[i]] < 2 {
                continue;
            }
            let d = squared_distance(p, &centroids[assignment[i]]);
            let better = match donor {
                None => true,
                Some((_, best)) => d > best,
            };
            if better {
                donor = Some((i, d));
            }
        }
        let Some((donor_idx, _)) = donor else {
            return;
        };
        centroids[empty] = points[donor_idx].clone();
        for (i, p) in points.iter().enumerate() {
            assignment[i] = nearest_centroid(p, centroids);
        }
    }
}
