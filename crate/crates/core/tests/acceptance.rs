//! Acceptance suite for the compressor.
//!
//! Each test pins one contractual behaviour and prints a
//! `acceptance <id>: PASS` line on success (visible with `--nocapture`), so
//! the suite reads as a checklist. Oracles used here (brute-force k-NN, exact
//! betweenness, quadratic LCS, rank correlation) are implemented inside this
//! file, independently of the library's code paths.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxpress_core::config::{Ablation, PipelineConfig};
use ctxpress_core::embed::{cosine, Embedding};
use ctxpress_core::graph::{
    knn_exact, mutual_filter, sequential_edges, AnnParams, GraphConfig, HybridGraph, NswIndex,
};
use ctxpress_core::harness::{
    budget_sweep, sensitivity_grids, write_sensitivity_csvs, write_sweep_csv, Method, DELTA_GRID,
    K_GRID, TAU_GRID,
};
use ctxpress_core::pipeline::{CorpusEntry, Pipeline};
use ctxpress_core::score::bridge_centrality;
use ctxpress_core::seed::stream_rng;
use ctxpress_core::segment::{RawDocument, Sentence};
use ctxpress_core::select::{greedy_select, rank, BudgetSpec, SelectionConfig, Verdict};
use ctxpress_core::eval::{rouge_f1, rouge_tokens, RougeVariant};

fn check(label: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("acceptance {label}: PASS"),
        Err(_) => println!("acceptance {label}: FAIL"),
    }
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
}

// ---------------------------------------------------------------------------
// Shared generators
// ---------------------------------------------------------------------------

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Embedding {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if let Ok(e) = Embedding::normalized(&v, 0) {
            return e;
        }
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn synthetic_sentences(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sentence> {
    (0..n)
        .map(|index| Sentence {
            index,
            text: format!("sentence {index}"),
            token_count: rng.random_range(1..=60),
        })
        .collect()
}

/// Random connected weighted graph: spanning tree plus `extra` chords.
fn random_connected_edges(
    rng: &mut ChaCha8Rng,
    n: usize,
    extra: usize,
) -> Vec<(usize, usize, f64)> {
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        present.insert((j, i));
        edges.push((j, i, 0.1 + 0.9 * rng.random::<f64>()));
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < extra * 20 {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if present.insert(key) {
            edges.push((key.0, key.1, 0.1 + 0.9 * rng.random::<f64>()));
            added += 1;
        }
    }
    edges
}

// ---------------------------------------------------------------------------
// Oracles (independent implementations for cross-checking)
// ---------------------------------------------------------------------------

mod oracle {
    /// Plain f64 dot product over f32 slices, ascending index order.
    pub fn dot(a: &[f32], b: &[f32]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (*x as f64) * (*y as f64)).sum()
    }

    /// Brute-force mutual k-NN: full similarity matrix, per-row sort, pair
    /// intersection. Returns (i, j, cosine(i, j)) with i < j, ascending.
    pub fn mutual_knn(vectors: &[&[f32]], k: usize) -> Vec<(usize, usize, f64)> {
        let n = vectors.len();
        let mut lists: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut sim = vec![vec![0.0f64; n]; n];
        for (i, row) in sim.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = dot(vectors[i], vectors[j]);
                }
            }
        }
        for (i, row) in sim.iter().enumerate() {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            order.truncate(k);
            lists.push(order);
        }
        let mut out = Vec::new();
        for i in 0..n {
            for &j in &lists[i] {
                if j > i && lists[j].contains(&i) {
                    out.push((i, j, sim[i][j]));
                }
            }
        }
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// Textbook Brandes betweenness with an O(n^2) scan-based Dijkstra,
    /// structurally different from the library's heap-based version.
    pub fn betweenness(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, lambda) in edges {
            let len = 1.0 / (lambda + 1e-6);
            adj[a].push((b, len));
            adj[b].push((a, len));
        }
        for list in adj.iter_mut() {
            list.sort_by_key(|(j, _)| *j);
        }

        let mut raw = vec![0.0f64; n];
        for s in 0..n {
            let mut dist = vec![f64::INFINITY; n];
            let mut sigma = vec![0.0f64; n];
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut settled = vec![false; n];
            let mut order = Vec::new();
            dist[s] = 0.0;
            sigma[s] = 1.0;
            loop {
                let mut v = usize::MAX;
                let mut best = f64::INFINITY;
                for u in 0..n {
                    if !settled[u] && dist[u] < best {
                        best = dist[u];
                        v = u;
                    }
                }
                if v == usize::MAX {
                    break;
                }
                settled[v] = true;
                order.push(v);
                for &(w, len) in &adj[v] {
                    if settled[w] {
                        continue;
                    }
                    let nd = dist[v] + len;
                    if nd < dist[w] {
                        dist[w] = nd;
                        sigma[w] = sigma[v];
                        preds[w].clear();
                        preds[w].push(v);
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
        raw
    }

    /// Full-matrix LCS length, O(n*m) space.
    pub fn lcs_full(a: &[String], b: &[String]) -> usize {
        let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                table[i][j] = if a[i - 1] == b[j - 1] {
                    table[i - 1][j - 1] + 1
                } else {
                    table[i - 1][j].max(table[i][j - 1])
                };
            }
        }
        table[a.len()][b.len()]
    }

    fn average_ranks(values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0.0f64; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && values[order[j + 1]] == values[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                ranks[idx] = avg;
            }
            i = j + 1;
        }
        ranks
    }

    /// Spearman rank correlation with average ranks for ties.
    pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
        let ra = average_ranks(a);
        let rb = average_ranks(b);
        let n = ra.len() as f64;
        let ma = ra.iter().sum::<f64>() / n;
        let mb = rb.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (x, y) in ra.iter().zip(&rb) {
            cov += (x - ma) * (y - mb);
            va += (x - ma) * (x - ma);
            vb += (y - mb) * (y - mb);
        }
        cov / (va.sqrt() * vb.sqrt())
    }
}

// ---------------------------------------------------------------------------
// 01: the selector never exceeds a resolved ratio budget
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_budget_adherence_fuzz() {
    check("01 budget-adherence-fuzz", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB0D6E7);
        let ratios = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
        let config = SelectionConfig::default();
        for case in 0..1000 {
            let n = rng.random_range(1..=300);
            let sentences = synthetic_sentences(&mut rng, n);
            let scores: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let embeddings: Vec<Embedding> = (0..n).map(|_| random_unit(&mut rng, 8)).collect();
            let total: usize = sentences.iter().map(|s| s.token_count).sum();
            let rho = ratios[case % ratios.len()];
            let budget = BudgetSpec::Ratio { rho }.resolve(total);
            let outcome = greedy_select(&sentences, &embeddings, &rank(&scores), budget, &config);
            assert!(
                outcome.tokens_used <= budget,
                "case {case}: used {} of budget {budget}",
                outcome.tokens_used
            );
            let recount: usize = outcome.selected.iter().map(|&i| sentences[i].token_count).sum();
            assert_eq!(recount, outcome.tokens_used, "case {case}: token accounting drifted");
        }
    });
}

// ---------------------------------------------------------------------------
// 02: exact mutual k-NN equals the brute-force oracle bit for bit
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_mutual_knn_oracle() {
    check("02 mutual-knn-oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED2);
        for case in 0..100 {
            let n = rng.random_range(2..=500);
            let k = rng.random_range(1..=10);
            let embeddings: Vec<Embedding> = (0..n).map(|_| random_unit(&mut rng, 16)).collect();
            let lists = knn_exact(&embeddings, k);
            let got = mutual_filter(&lists);
            let views: Vec<&[f32]> = embeddings.iter().map(|e| e.values()).collect();
            let want = oracle::mutual_knn(&views, k);
            assert_eq!(got.len(), want.len(), "case {case} (n={n}, k={k}): edge count");
            for (g, w) in got.iter().zip(&want) {
                assert_eq!((g.0, g.1), (w.0, w.1), "case {case}: pair mismatch");
                assert_eq!(
                    g.2.to_bits(),
                    w.2.to_bits(),
                    "case {case}: similarity not bit-identical on ({}, {})",
                    g.0,
                    g.1
                );
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 03: approximate index reaches recall@8 >= 0.95 on clustered vectors
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_ann_recall() {
    check("03 ann-recall", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let dim = 32;
        let n = 5000;
        let k = 8;
        let centers: Vec<Embedding> = (0..10).map(|_| random_unit(&mut rng, dim)).collect();
        let embeddings: Vec<Embedding> = (0..n)
            .map(|i| {
                let c = centers[i % 10].values();
                let v: Vec<f64> = c
                    .iter()
                    .map(|x| *x as f64 + 0.15 * gauss(&mut rng))
                    .collect();
                Embedding::normalized(&v, i).expect("nonzero")
            })
            .collect();

        let started = Instant::now();
        let index = NswIndex::build(&embeddings, &AnnParams::default()).expect("build");
        let approx = index.knn_all(k);
        let elapsed = started.elapsed();

        let views: Vec<&[f32]> = embeddings.iter().map(|e| e.values()).collect();
        let mut total_recall = 0.0f64;
        for i in 0..n {
            let mut scored: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, oracle::dot(views[i], views[j])))
                .collect();
            scored.select_nth_unstable_by(k - 1, |a, b| {
                b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
            });
            let exact: BTreeSet<usize> = scored[..k].iter().map(|(j, _)| *j).collect();
            let found = approx[i].iter().filter(|(j, _)| exact.contains(j)).count();
            total_recall += found as f64 / k as f64;
        }
        let recall = total_recall / n as f64;
        println!("  ann recall@{k} = {recall:.4}, build+query in {elapsed:.2?}");
        assert!(recall >= 0.95, "recall {recall} below 0.95");
        assert!(elapsed.as_secs() < 120, "index phase took {elapsed:?}");
    });
}

// ---------------------------------------------------------------------------
// 04: sampled betweenness is exact at full sampling and rank-faithful sampled
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_betweenness_oracle() {
    check("04 betweenness-oracle", || {
        // Exactness at n_samples = n.
        let mut rng = ChaCha8Rng::seed_from_u64(0xB3A7);
        for case in 0..50 {
            let n = rng.random_range(5..=100);
            let edges = random_connected_edges(&mut rng, n, n / 2);
            let graph = HybridGraph::from_weighted_edges(n, &edges);
            let mut sample_rng = stream_rng(2026, &format!("exact-{case}"), "betweenness");
            let got = bridge_centrality(&graph, n, &mut sample_rng);
            let want = oracle::betweenness(n, &edges);
            for (i, (g, w)) in got.raw.iter().zip(&want).enumerate() {
                assert!(
                    (g - w).abs() <= 1e-9,
                    "case {case}, node {i}: {g} vs oracle {w}"
                );
            }
        }

        // Rank fidelity of sqrt-sampling across 20 seeded graphs.
        let mut sum = 0.0;
        for seed in 0..20u64 {
            let mut graph_rng = ChaCha8Rng::seed_from_u64(9000 + seed);
            let n = graph_rng.random_range(50..=200);
            let edges = random_connected_edges(&mut graph_rng, n, n / 3);
            let graph = HybridGraph::from_weighted_edges(n, &edges);
            let exact = oracle::betweenness(n, &edges);
            let n_samples = (n as f64).sqrt().ceil() as usize;
            let mut sample_rng = stream_rng(2026, &format!("sampled-{seed}"), "betweenness");
            let sampled = bridge_centrality(&graph, n_samples, &mut sample_rng);
            let rho = oracle::spearman(&sampled.raw, &exact);
            sum += rho;
        }
        let mean = sum / 20.0;
        println!("  mean sampled-vs-exact spearman = {mean:.4}");
        assert!(mean >= 0.8, "mean spearman {mean} below 0.8");
    });
}

// ---------------------------------------------------------------------------
// 05: cycle cues on canonical shapes
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_cycle_cues() {
    check("05 cycle-cues", || {
        use ctxpress_core::score::cycle_flags;
        // Tree: all zero.
        let tree = HybridGraph::from_weighted_edges(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0), (3, 4, 1.0), (3, 5, 1.0)],
        );
        assert_eq!(cycle_flags(&tree, 200), vec![false; 6]);

        // Triangle: all one.
        let triangle = HybridGraph::from_weighted_edges(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        assert_eq!(cycle_flags(&triangle, 200), vec![true; 3]);

        // Two disjoint 4-cycles, cap 1: only the canonically first is marked.
        let squares = HybridGraph::from_weighted_edges(
            8,
            &[
                (0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0),
                (4, 5, 1.0), (5, 6, 1.0), (6, 7, 1.0), (4, 7, 1.0),
            ],
        );
        assert_eq!(
            cycle_flags(&squares, 1),
            vec![true, true, true, true, false, false, false, false]
        );
        assert_eq!(cycle_flags(&squares, 2), vec![true; 8]);
    });
}

// ---------------------------------------------------------------------------
// 06: de-duplication guarantee plus its disabled-witness
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_nms_dedup() {
    check("06 nms-dedup", || {
        let config = SelectionConfig::default();

        // Property: no selected pair at or above tau, over randomized inputs.
        let mut rng = ChaCha8Rng::seed_from_u64(0xDED0A5);
        for _ in 0..300 {
            let n = rng.random_range(2..=80);
            let sentences = synthetic_sentences(&mut rng, n);
            // Low dimension forces frequent near-duplicates.
            let embeddings: Vec<Embedding> = (0..n).map(|_| random_unit(&mut rng, 3)).collect();
            let scores: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let total: usize = sentences.iter().map(|s| s.token_count).sum();
            let outcome =
                greedy_select(&sentences, &embeddings, &rank(&scores), total, &config);
            for (a, &i) in outcome.selected.iter().enumerate() {
                for &j in &outcome.selected[a + 1..] {
                    let sim = cosine(&embeddings[i], &embeddings[j]);
                    assert!(sim < config.tau, "selected pair ({i}, {j}) at cosine {sim}");
                }
            }
        }

        // Witness: the same near-duplicate pair is split by the switch.
        let sentences = vec![
            Sentence { index: 0, text: "a".into(), token_count: 3 },
            Sentence { index: 1, text: "b".into(), token_count: 3 },
            Sentence { index: 2, text: "c".into(), token_count: 3 },
        ];
        let twin = Embedding::normalized(&[1.0, 0.05, 0.0], 1).unwrap();
        let embeddings = vec![Embedding::basis(0, 3), twin, Embedding::basis(1, 3)];
        assert!(cosine(&embeddings[0], &embeddings[1]) >= config.tau);
        let order = vec![0, 1, 2];

        let with_nms = greedy_select(&sentences, &embeddings, &order, 100, &config);
        assert_eq!(with_nms.selected, vec![0, 2]);
        assert_eq!(with_nms.verdicts[1], Verdict::NmsSuppressed);

        let no_nms = SelectionConfig { nms_enabled: false, ..config };
        let without = greedy_select(&sentences, &embeddings, &order, 100, &no_nms);
        assert_eq!(without.selected, vec![0, 1, 2]);
    });
}

// ---------------------------------------------------------------------------
// 07: each ablation changes exactly its own behaviour
// ---------------------------------------------------------------------------

fn strip_ablations(value: &mut serde_json::Value) {
    if let Some(map) = value.as_object_mut() {
        map.remove("ablations");
    }
}

fn diff_paths(a: &serde_json::Value, b: &serde_json::Value, prefix: &str, out: &mut Vec<String>) {
    match (a, b) {
        (serde_json::Value::Object(ma), serde_json::Value::Object(mb)) => {
            for (key, va) in ma {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                match mb.get(key) {
                    Some(vb) => diff_paths(va, vb, &path, out),
                    None => out.push(path),
                }
            }
            for key in mb.keys() {
                if !ma.contains_key(key) {
                    out.push(if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") });
                }
            }
        }
        _ => {
            if a != b {
                out.push(prefix.to_string());
            }
        }
    }
}

fn config_diff(base: &PipelineConfig, variant: &PipelineConfig) -> Vec<String> {
    let mut a = serde_json::to_value(base).unwrap();
    let mut b = serde_json::to_value(variant).unwrap();
    strip_ablations(&mut a);
    strip_ablations(&mut b);
    let mut out = Vec::new();
    diff_paths(&a, &b, "", &mut out);
    out.sort();
    out
}

#[test]
fn acceptance_07_ablation_fidelity() {
    check("07 ablation-fidelity", || {
        let base = PipelineConfig::default();
        let doc = RawDocument {
            doc_id: "ablation-doc".to_string(),
            text: three_topic_text(),
            query: None,
        };

        // Config-level diffs are exactly the advertised switches.
        assert_eq!(
            config_diff(&base.effective(), &base.with_ablation(Ablation::NoSeq).effective()),
            vec!["graph.alpha", "graph.beta", "graph.delta"]
        );
        assert_eq!(
            config_diff(&base.effective(), &base.with_ablation(Ablation::NoRep).effective()),
            vec!["weights.rep"]
        );
        assert_eq!(
            config_diff(&base.effective(), &base.with_ablation(Ablation::NoBridge).effective()),
            vec!["weights.bridge"]
        );
        assert_eq!(
            config_diff(&base.effective(), &base.with_ablation(Ablation::NoCycle).effective()),
            vec!["weights.cycle"]
        );
        assert_eq!(
            config_diff(&base.effective(), &base.with_ablation(Ablation::NoNms).effective()),
            vec!["selection.nms_enabled"]
        );

        let full = Pipeline::new(base.clone()).unwrap();
        let full_analysis = full.analyze(&doc).unwrap();

        // no_seq: the remaining edge set is exactly the mutual-semantic one.
        let no_seq = Pipeline::new(base.with_ablation(Ablation::NoSeq)).unwrap();
        let ns_analysis = no_seq.analyze(&doc).unwrap();
        let lists = knn_exact(&full_analysis.embeddings, base.graph.k);
        let semantic: Vec<(usize, usize)> =
            mutual_filter(&lists).into_iter().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(ns_analysis.graph.edge_pairs(), semantic);
        for edge in ns_analysis.graph.edges() {
            assert_eq!(edge.w_seq, 0.0);
            assert_eq!(edge.lambda, edge.w_sem);
        }
        // And the full graph is that set plus the sequential pairs.
        let mut expected_full: BTreeSet<(usize, usize)> = semantic.iter().cloned().collect();
        for (i, j, _) in sequential_edges(full_analysis.sentences.len(), base.graph.delta) {
            expected_full.insert((i, j));
        }
        let full_pairs: BTreeSet<(usize, usize)> =
            full_analysis.graph.edge_pairs().into_iter().collect();
        assert_eq!(full_pairs, expected_full);

        // Channel ablations: only the ablated weight leaves the composite.
        type ZeroFn = fn(&mut ctxpress_core::score::ScoringWeights);
        let channel_cases: [(Ablation, ZeroFn); 3] = [
            (Ablation::NoRep, |w| w.rep = 0.0),
            (Ablation::NoBridge, |w| w.bridge = 0.0),
            (Ablation::NoCycle, |w| w.cycle = 0.0),
        ];
        for (ablation, zero_channel) in channel_cases {
            let pipeline = Pipeline::new(base.with_ablation(ablation)).unwrap();
            let analysis = pipeline.analyze(&doc).unwrap();
            // Channel scores are untouched by the weight switch.
            assert_eq!(analysis.card.task, full_analysis.card.task);
            assert_eq!(analysis.card.rep, full_analysis.card.rep);
            assert_eq!(analysis.card.bridge, full_analysis.card.bridge);
            assert_eq!(analysis.card.cycle, full_analysis.card.cycle);
            let mut expected_weights = base.weights;
            zero_channel(&mut expected_weights);
            for i in 0..analysis.card.composite.len() {
                let recomputed = expected_weights.task * analysis.card.task[i]
                    + expected_weights.rep * analysis.card.rep[i]
                    + expected_weights.bridge * analysis.card.bridge[i]
                    + expected_weights.cycle * analysis.card.cycle[i];
                assert_eq!(analysis.card.composite[i], recomputed);
            }
        }

        // no_nms: same analysis, no suppression verdicts possible.
        let no_nms = Pipeline::new(base.with_ablation(Ablation::NoNms)).unwrap();
        let output = no_nms.compress(&doc, None).unwrap();
        assert!(output.audit.verdicts.iter().all(|v| *v != Verdict::NmsSuppressed));
    });
}

// ---------------------------------------------------------------------------
// 08: reference defaults are pinned
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_default_config() {
    check("08 default-config", || {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.seed, 2026);
        assert_eq!(cfg.graph.k, 8);
        assert_eq!(cfg.graph.delta, 1);
        assert_eq!(cfg.graph.alpha, 0.25);
        assert_eq!(cfg.graph.beta, 0.75);
        assert_eq!(cfg.graph.ann_threshold, 2000);
        assert_eq!(cfg.selection.tau, 0.92);
        assert!(cfg.selection.nms_enabled);
        assert_eq!(cfg.budget, BudgetSpec::Ratio { rho: 0.30 });
        assert_eq!(cfg.weights.task, 0.45);
        assert_eq!(cfg.weights.rep, 0.30);
        assert_eq!(cfg.weights.bridge, 0.20);
        assert_eq!(cfg.weights.cycle, 0.05);
        assert_eq!(cfg.max_cycles, 200);
        assert_eq!(cfg.bridge_samples, None);
        assert_eq!(cfg.lead_head, 3);
        assert_eq!(cfg.kmeans.batch_size, 256);
        assert_eq!(cfg.kmeans.max_iters, 100);
        assert_eq!(cfg.kmeans.shift_tol, 1e-4);
        assert_eq!(cfg.textrank.damping, 0.85);
        assert_eq!(cfg.textrank.tol, 1e-6);
        assert_eq!(cfg.textrank.max_iters, 100);
        assert_eq!(cfg.provider.dimension, 256);
        assert_eq!(cfg.provider.max_input_tokens, 512);
        assert_eq!(cfg.provider.batch_size, 64);
        assert!(cfg.ablations.is_empty());

        let ann = AnnParams::default();
        assert_eq!(ann.fanout, 32);
        assert_eq!(ann.beam, 128);
        assert_eq!(ann.max_degree, 64);

        let graph_default = GraphConfig::default();
        assert!(graph_default.validate().is_ok());
    });
}

// ---------------------------------------------------------------------------
// 09: full topic coverage on a separated synthetic document
// ---------------------------------------------------------------------------

/// Thirty sentences in five lexically disjoint groups (five cluster-sized
/// themes under three broad topics: plant engineering, trade, wildlife).
/// Within a group, sentences differ only in a trailing tag word, so they sit
/// above the de-duplication threshold of 0.92.
fn three_topic_text() -> String {
    let groups: [[&str; 9]; 5] = [
        ["Reactor", "coolant", "shielding", "margins", "envelopes", "commissioning", "loops", "walls", "inspections"],
        ["Turbine", "condenser", "feedwater", "blades", "casings", "vibration", "bearings", "steam", "overhauls"],
        ["Market", "revenue", "guidance", "subscriptions", "hardware", "earnings", "forecasts", "demand", "quarters"],
        ["Tariff", "imports", "logistics", "customs", "freight", "warehouses", "clearances", "duties", "shipments"],
        ["Migration", "plumage", "nesting", "flyways", "juveniles", "ringing", "coasts", "arrivals", "breeding"],
    ];
    let nums = ["one", "two", "three", "four", "five", "six"];
    let mut sentences = Vec::new();
    for words in &groups {
        for num in &nums {
            let tag = format!("{}{}", words[1], num);
            sentences.push(format!(
                "{} {} {} {} {} {} {} {} {} kept {} {} {} {} {} {} {} {} {} under steady seasonal review {}.",
                words[0], words[1], words[2], words[3], words[4], words[5], words[6], words[7], words[8],
                words[0].to_lowercase(), words[1], words[2], words[3], words[4], words[5], words[6], words[7], words[8],
                tag,
            ));
        }
    }
    sentences.join(" ")
}

#[test]
fn acceptance_09_topic_coverage() {
    check("09 topic-coverage", || {
        let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
        let doc = RawDocument {
            doc_id: "coverage-doc".to_string(),
            text: three_topic_text(),
            query: None,
        };
        let analysis = pipeline.analyze(&doc).unwrap();
        assert_eq!(analysis.sentences.len(), 30);
        assert_eq!(analysis.topics.k, 5);
        let output = pipeline.compress_analysis(&analysis, None);
        assert!(output.metrics.budget_ok);
        assert!(output.metrics.compression_ratio <= 0.30);
        assert_eq!(
            output.metrics.topic_coverage, 1.0,
            "coverage {} with selection {:?} and labels {:?}",
            output.metrics.topic_coverage, output.selected_indices, analysis.topics.assignment
        );
    });
}

// ---------------------------------------------------------------------------
// 10: ROUGE fixed points and LCS oracle agreement
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_rouge_correctness() {
    check("10 rouge-correctness", || {
        let text = "Floods reshaped the valley floor within a single spring season.";
        for variant in [RougeVariant::One, RougeVariant::Two, RougeVariant::L] {
            assert_eq!(rouge_f1(text, text, variant), 1.0);
        }
        assert_eq!(rouge_f1("the cat", "the cat sat", RougeVariant::One), 0.8);

        let vocab = ["flood", "river", "levee", "rain", "delta", "surge", "bank", "silt"];
        let mut rng = ChaCha8Rng::seed_from_u64(0x10C5);
        for case in 0..100 {
            let len_a = rng.random_range(0..=25);
            let len_b = rng.random_range(0..=25);
            let a: Vec<String> = (0..len_a)
                .map(|_| vocab[rng.random_range(0..vocab.len())].to_string())
                .collect();
            let b: Vec<String> = (0..len_b)
                .map(|_| vocab[rng.random_range(0..vocab.len())].to_string())
                .collect();
            let got = rouge_f1(&a.join(" "), &b.join(" "), RougeVariant::L);
            let want = if a.is_empty() || b.is_empty() {
                0.0
            } else {
                2.0 * oracle::lcs_full(&a, &b) as f64 / (a.len() + b.len()) as f64
            };
            assert!(
                (got - want).abs() <= 1e-12,
                "case {case}: rouge-l {got} vs oracle {want}"
            );
        }

        // Tokenisation is shared with the oracle inputs above.
        assert_eq!(rouge_tokens("The CAT, sat!"), vec!["the", "cat", ",", "sat", "!"]);
    });
}

// ---------------------------------------------------------------------------
// 11: corpus runs are byte-identical across repeats and thread counts
// ---------------------------------------------------------------------------

fn determinism_corpus() -> Vec<String> {
    let mut lines = Vec::new();
    let texts = [
        three_topic_text(),
        "The harbour survey mapped every mooring in the northern basin. Mooring chains were \
         replaced where corrosion exceeded the wear limit. The southern basin survey is planned \
         for the coming autumn. Budget approval for the dredging works arrived late. Dredging \
         begins after the equipment barge returns from refit. The refit yard reported a two week \
         delay on the barge. Harbour pilots rehearsed the revised approach channel. The channel \
         buoys were relaid after the spring storms."
            .to_string(),
        "Alpine snowpack peaked earlier than in any recorded winter. Meltwater filled the upper \
         reservoirs by the end of April. Hydropower output rose sharply during the spring months. \
         Grid operators rescheduled maintenance to absorb the surplus. Surplus power prices \
         dipped below the seasonal average. Farmers drew irrigation water earlier than usual this \
         year. Reservoir managers held back a safety margin for the dry months. The dry forecast \
         kept planners cautious into summer."
            .to_string(),
    ];
    for (i, text) in texts.iter().enumerate() {
        let mut obj = serde_json::json!({ "doc_id": format!("doc-{i}"), "text": text });
        if i == 1 {
            obj["query"] = serde_json::json!("dredging schedule and barge refit");
            obj["reference"] =
                serde_json::json!("Dredging waits on a delayed barge refit while surveys continue.");
        }
        lines.push(obj.to_string());
    }
    lines
}

#[test]
fn acceptance_11_determinism() {
    check("11 determinism", || {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("corpus.jsonl");
        std::fs::write(&corpus, determinism_corpus().join("\n")).unwrap();

        let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
        let runs = [
            (dir.path().join("run-a"), 4usize),
            (dir.path().join("run-b"), 4usize),
            (dir.path().join("run-c"), 1usize),
        ];
        for (out, jobs) in &runs {
            let summary = pipeline.run_corpus(&corpus, out, *jobs).unwrap();
            assert_eq!(summary.processed, 3);
            assert!(summary.failed.is_empty());
        }

        let listing = |path: &std::path::Path| -> Vec<String> {
            let mut names: Vec<String> = std::fs::read_dir(path)
                .unwrap()
                .map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect();
            names.sort();
            names
        };
        let base = listing(&runs[0].0);
        assert!(base.contains(&"summary.csv".to_string()));
        for (out, _) in &runs[1..] {
            assert_eq!(listing(out), base, "output sets differ");
            for name in &base {
                let a = std::fs::read(runs[0].0.join(name)).unwrap();
                let b = std::fs::read(out.join(name)).unwrap();
                assert_eq!(a, b, "bytes differ in {name}");
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 12: sensitivity and sweep harnesses emit the pinned shapes
// ---------------------------------------------------------------------------

#[test]
fn acceptance_12_sensitivity_shape() {
    check("12 sensitivity-shape", || {
        let entries: Vec<CorpusEntry> = determinism_corpus()
            .iter()
            .map(|line| serde_json::from_str(line).unwrap())
            .collect();
        let base = PipelineConfig::default();

        let report = sensitivity_grids(&base, &entries).unwrap();
        assert_eq!(report.k.len(), 4);
        assert_eq!(report.tau.len(), 4);
        assert_eq!(report.delta.len(), 4);
        assert_eq!(report.weights.len(), 13);
        let k_values: Vec<String> = report.k.iter().map(|r| r.value.clone()).collect();
        assert_eq!(k_values, K_GRID.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        let tau_values: Vec<String> = report.tau.iter().map(|r| r.value.clone()).collect();
        assert_eq!(tau_values, TAU_GRID.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        let delta_values: Vec<String> = report.delta.iter().map(|r| r.value.clone()).collect();
        assert_eq!(delta_values, DELTA_GRID.iter().map(|v| v.to_string()).collect::<Vec<_>>());

        let dir = tempfile::tempdir().unwrap();
        write_sensitivity_csvs(&report, dir.path()).unwrap();
        let lines = |name: &str| -> usize {
            std::fs::read_to_string(dir.path().join(name)).unwrap().lines().count()
        };
        assert_eq!(lines("k.csv"), 5);
        assert_eq!(lines("tau.csv"), 5);
        assert_eq!(lines("delta.csv"), 5);
        assert_eq!(lines("weights.csv"), 14);

        let pipeline = Pipeline::new(base).unwrap();
        let rows = budget_sweep(&pipeline, &entries, &[0.2, 0.3], &Method::ALL).unwrap();
        assert_eq!(rows.len(), 6);
        let sweep_path = dir.path().join("sweep.csv");
        write_sweep_csv(&rows, &sweep_path).unwrap();
        let sweep = std::fs::read_to_string(&sweep_path).unwrap();
        let mut sweep_lines = sweep.lines();
        assert_eq!(
            sweep_lines.next().unwrap(),
            "method,rho,docs,compression_ratio,topic_coverage,bridge_retention,cycle_retention,rouge1,rouge2,rouge_l"
        );
        assert_eq!(sweep_lines.count(), 6);
    });
}
