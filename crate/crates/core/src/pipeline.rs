//! End-to-end orchestration: segment, embed, graph, cluster, score, select,
//! evaluate, plus the JSONL corpus runner.
//!
//! Randomised stages draw from streams derived from `(seed, doc_id, stage)`,
//! so per-document results do not depend on processing order and corpus runs
//! are byte-identical across repeats and thread counts.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, PipelineConfig};
use crate::embed::{document_centroid, EmbedError, Embedder, Embedding};
use crate::eval::{
    compression_ratio, rouge_f1, structure_retention, topic_coverage, EvalReport, RougeVariant,
};
use crate::graph::{build_hybrid_graph, GraphError, HybridGraph};
use crate::score::{build_score_card, ScoreCard};
use crate::seed::stream_rng;
use crate::segment::{segment, RawDocument, SegmentError, Sentence, Tokenizer};
use crate::select::{greedy_select, rank, reassemble, SelectError, SelectionOutcome, Verdict};
use crate::topics::{choose_k, fit_minibatch_kmeans, TopicModel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("segmentation of '{doc_id}' failed: {source}")]
    Segment {
        doc_id: String,
        #[source]
        source: SegmentError,
    },
    #[error("embedding for '{doc_id}' failed: {source}")]
    Embed {
        doc_id: String,
        #[source]
        source: EmbedError,
    },
    #[error("graph construction for '{doc_id}' failed: {source}")]
    Graph {
        doc_id: String,
        #[source]
        source: GraphError,
    },
    #[error("io error at {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

impl From<SelectError> for PipelineError {
    fn from(e: SelectError) -> Self {
        PipelineError::InvalidParameter(e.to_string())
    }
}

/// Everything computed for a document before budgeting: the analysis is
/// budget-independent, so sweeps reuse it across ratios and methods.
#[derive(Debug)]
pub struct DocumentAnalysis {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    pub embeddings: Vec<Embedding>,
    /// Query embedding, or the document centroid when no query was given.
    pub target: Embedding,
    pub graph: HybridGraph,
    pub topics: TopicModel,
    pub card: ScoreCard,
    pub total_tokens: usize,
    pub warnings: Vec<String>,
}

/// Audit block of a result: full score card, cluster labels and the verdict
/// the greedy pass reached for every sentence.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionAudit {
    pub scores: ScoreCard,
    pub labels: Vec<usize>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
}

/// Budget echo in the result: the configured spec plus its resolution for this
/// document.
#[derive(Debug, Clone, Serialize)]
pub struct BudgetEcho {
    #[serde(flatten)]
    pub spec: crate::select::BudgetSpec,
    pub effective_tokens: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DocumentOutput {
    pub doc_id: String,
    pub selected_indices: Vec<usize>,
    pub compressed_text: String,
    pub tokens_used: usize,
    pub total_tokens: usize,
    pub budget: BudgetEcho,
    pub metrics: EvalReport,
    pub audit: SelectionAudit,
}

/// One JSONL corpus line: a document plus an optional reference summary for
/// ROUGE scoring.
#[derive(Debug, Clone, Deserialize)]
pub struct CorpusEntry {
    #[serde(flatten)]
    pub doc: RawDocument,
    #[serde(default)]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub line: usize,
    pub doc_id: Option<String>,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct CorpusSummary {
    pub processed: usize,
    pub failed: Vec<FailureRecord>,
}

pub struct Pipeline {
    config: PipelineConfig,
    tokenizer: Tokenizer,
    embedder: Embedder,
}

impl Pipeline {
    /// Builds a pipeline from `config` with ablations applied. Validates the
    /// graph mix, budget and selection threshold up front.
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        let effective = config.effective();
        effective
            .graph
            .validate()
            .map_err(|e| PipelineError::InvalidParameter(e.to_string()))?;
        effective.budget.validate()?;
        effective.selection.validate()?;
        let tokenizer = Tokenizer::new(&effective.tokenizer).map_err(|e| PipelineError::Segment {
            doc_id: String::new(),
            source: e,
        })?;
        let embedder = Embedder::new(effective.provider.clone()).map_err(|e| PipelineError::Embed {
            doc_id: String::new(),
            source: e,
        })?;
        Ok(Pipeline { config: effective, tokenizer, embedder })
    }

    /// The effective (ablation-applied) configuration.
    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    /// Budget-independent analysis: segmentation through score card.
    pub fn analyze(&self, doc: &RawDocument) -> Result<DocumentAnalysis, PipelineError> {
        let mut warnings = Vec::new();
        if !self.config.weights.sums_to_one() {
            warnings.push(format!(
                "scoring weights sum to {} instead of 1",
                self.config.weights.sum()
            ));
        }

        let sentences = segment(doc, &self.config.segmenter, &self.tokenizer)
            .map_err(|e| PipelineError::Segment { doc_id: doc.doc_id.clone(), source: e })?;
        let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
        let embeddings = self
            .embedder
            .embed_batch(&texts)
            .map_err(|e| PipelineError::Embed { doc_id: doc.doc_id.clone(), source: e })?;

        let target = match doc.query.as_deref().map(str::trim) {
            Some(q) if !q.is_empty() => self
                .embedder
                .embed_one(q)
                .map_err(|e| PipelineError::Embed { doc_id: doc.doc_id.clone(), source: e })?,
            _ => document_centroid(&embeddings),
        };

        let graph = build_hybrid_graph(&embeddings, &self.config.graph)
            .map_err(|e| PipelineError::Graph { doc_id: doc.doc_id.clone(), source: e })?;

        let n = sentences.len();
        let k = choose_k(n);
        let mut kmeans_rng = stream_rng(self.config.seed, &doc.doc_id, "kmeans");
        let topics = fit_minibatch_kmeans(&embeddings, k, &mut kmeans_rng, &self.config.kmeans);
        if topics.degenerate {
            warnings.push("all sentence embeddings identical; topics degenerate".to_string());
        }
        if !topics.converged {
            warnings.push("k-means stopped at max_iters before reaching shift tolerance".to_string());
        }

        let n_samples = self
            .config
            .bridge_samples
            .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize);
        let mut bridge_rng = stream_rng(self.config.seed, &doc.doc_id, "betweenness");
        let card = build_score_card(
            &embeddings,
            &target,
            &topics,
            &graph,
            &self.config.weights,
            n_samples,
            self.config.max_cycles,
            &mut bridge_rng,
        );

        let total_tokens = sentences.iter().map(|s| s.token_count).sum();
        Ok(DocumentAnalysis {
            doc_id: doc.doc_id.clone(),
            sentences,
            embeddings,
            target,
            graph,
            topics,
            card,
            total_tokens,
            warnings,
        })
    }

    /// Runs the greedy selection for an existing analysis and assembles the
    /// result, evaluating against `reference` when present.
    pub fn compress_analysis(
        &self,
        analysis: &DocumentAnalysis,
        reference: Option<&str>,
    ) -> DocumentOutput {
        let budget_tokens = self.config.budget.resolve(analysis.total_tokens);
        let order = rank(&analysis.card.composite);
        let outcome = greedy_select(
            &analysis.sentences,
            &analysis.embeddings,
            &order,
            budget_tokens,
            &self.config.selection,
        );
        self.assemble_output(analysis, outcome, budget_tokens, reference)
    }

    /// Builds a `DocumentOutput` from any selection outcome (including the
    /// baselines'), so every method is reported identically.
    pub fn assemble_output(
        &self,
        analysis: &DocumentAnalysis,
        outcome: SelectionOutcome,
        budget_tokens: usize,
        reference: Option<&str>,
    ) -> DocumentOutput {
        let compressed_text = reassemble(&analysis.sentences, &outcome.selected);
        let mut warnings = analysis.warnings.clone();
        if outcome.budget_too_small {
            warnings.push(format!(
                "budget of {budget_tokens} tokens fits no sentence; output is empty"
            ));
        }
        let metrics = evaluate_selection(analysis, &outcome, budget_tokens, reference);
        DocumentOutput {
            doc_id: analysis.doc_id.clone(),
            selected_indices: outcome.selected.clone(),
            compressed_text,
            tokens_used: outcome.tokens_used,
            total_tokens: analysis.total_tokens,
            budget: BudgetEcho { spec: self.config.budget, effective_tokens: budget_tokens },
            metrics,
            audit: SelectionAudit {
                scores: analysis.card.clone(),
                labels: analysis.topics.assignment.clone(),
                verdicts: outcome.verdicts,
                warnings,
            },
        }
    }

    /// Full single-document run.
    pub fn compress(
        &self,
        doc: &RawDocument,
        reference: Option<&str>,
    ) -> Result<DocumentOutput, PipelineError> {
        let analysis = self.analyze(doc)?;
        Ok(self.compress_analysis(&analysis, reference))
    }

    /// Processes a JSONL corpus with `jobs` worker threads, writing one result
    /// JSON per document plus `summary.csv` into `out_dir`. Malformed lines,
    /// duplicate ids and per-document failures are collected, not fatal.
    pub fn run_corpus(
        &self,
        corpus_path: &Path,
        out_dir: &Path,
        jobs: usize,
    ) -> Result<CorpusSummary, PipelineError> {
        let (entries, mut failed) = load_corpus(corpus_path)?;
        std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::Io {
            path: out_dir.to_path_buf(),
            reason: e.to_string(),
        })?;

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| PipelineError::InvalidParameter(format!("thread pool: {e}")))?;
        let outcomes: Vec<(usize, Result<DocumentOutput, PipelineError>)> = pool.install(|| {
            entries
                .par_iter()
                .map(|(line, entry)| (*line, self.compress(&entry.doc, entry.reference.as_deref())))
                .collect()
        });

        let mut results: Vec<DocumentOutput> = Vec::new();
        for ((line, outcome), (_, entry)) in outcomes.into_iter().zip(&entries) {
            match outcome {
                Ok(output) => results.push(output),
                Err(e) => failed.push(FailureRecord {
                    line,
                    doc_id: Some(entry.doc.doc_id.clone()),
                    error: e.to_string(),
                }),
            }
        }
        results.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

        for output in &results {
            let path = out_dir.join(format!("{}.json", file_stem_for(&output.doc_id)));
            write_json(&path, output)?;
        }
        write_summary_csv(&out_dir.join("summary.csv"), &results)?;

        failed.sort_by_key(|f| f.line);
        Ok(CorpusSummary { processed: results.len(), failed })
    }
}

/// Evaluates one selection against its analysis. Used for the main method and
/// all baselines alike.
pub fn evaluate_selection(
    analysis: &DocumentAnalysis,
    outcome: &SelectionOutcome,
    budget_tokens: usize,
    reference: Option<&str>,
) -> EvalReport {
    let (bridge_retention, cycle_retention) =
        structure_retention(&analysis.card, &outcome.selected, None);
    let compressed = reassemble(&analysis.sentences, &outcome.selected);
    let (rouge1, rouge2, rouge_l) = match reference {
        Some(r) => (
            Some(rouge_f1(&compressed, r, RougeVariant::One)),
            Some(rouge_f1(&compressed, r, RougeVariant::Two)),
            Some(rouge_f1(&compressed, r, RougeVariant::L)),
        ),
        None => (None, None, None),
    };
    EvalReport {
        compression_ratio: compression_ratio(outcome.tokens_used, analysis.total_tokens),
        budget_ok: outcome.tokens_used <= budget_tokens,
        topic_coverage: topic_coverage(&analysis.topics.assignment, &outcome.selected, analysis.topics.k),
        bridge_retention,
        cycle_retention,
        rouge1,
        rouge2,
        rouge_l,
    }
}

/// Corpus entry paired with its 1-based line number in the source file.
pub type NumberedEntry = (usize, CorpusEntry);

/// Reads a JSONL corpus. Parse failures and duplicate doc ids become failure
/// records; only I/O trouble on the file itself is a hard error.
pub fn load_corpus(
    path: &Path,
) -> Result<(Vec<NumberedEntry>, Vec<FailureRecord>), PipelineError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
    let mut entries = Vec::new();
    let mut failed = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusEntry>(line) {
            Ok(entry) => {
                if entry.doc.doc_id.is_empty() {
                    failed.push(FailureRecord {
                        line: line_no,
                        doc_id: None,
                        error: "empty doc_id".to_string(),
                    });
                } else if !seen.insert(entry.doc.doc_id.clone()) {
                    failed.push(FailureRecord {
                        line: line_no,
                        doc_id: Some(entry.doc.doc_id.clone()),
                        error: "duplicate doc_id".to_string(),
                    });
                } else {
                    entries.push((line_no, entry));
                }
            }
            Err(e) => failed.push(FailureRecord {
                line: line_no,
                doc_id: None,
                error: format!("malformed JSON: {e}"),
            }),
        }
    }
    Ok((entries, failed))
}

/// Filesystem-safe stem for a doc id; ids that needed sanitising get a short
/// content hash suffix to avoid collisions.
fn file_stem_for(doc_id: &str) -> String {
    let sanitized: String = doc_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if sanitized == doc_id {
        sanitized
    } else {
        let digest = Sha256::digest(doc_id.as_bytes());
        let tag: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
        format!("{sanitized}-{tag}")
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let body = serde_json::to_vec_pretty(value)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
    let mut file = std::fs::File::create(path)
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
    file.write_all(&body)
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| PipelineError::Io { path: path.to_path_buf(), reason: e.to_string() })
}

fn write_summary_csv(path: &Path, results: &[DocumentOutput]) -> Result<(), PipelineError> {
    let io_err = |e: &dyn std::fmt::Display| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(&e))?;
    writer
        .write_record([
            "doc_id",
            "n_sentences",
            "total_tokens",
            "budget_tokens",
            "tokens_used",
            "compression_ratio",
            "topic_coverage",
            "bridge_retention",
            "cycle_retention",
            "rouge1",
            "rouge2",
            "rouge_l",
        ])
        .map_err(|e| io_err(&e))?;
    for r in results {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writer
            .write_record([
                r.doc_id.clone(),
                r.audit.labels.len().to_string(),
                r.total_tokens.to_string(),
                r.budget.effective_tokens.to_string(),
                r.tokens_used.to_string(),
                r.metrics.compression_ratio.to_string(),
                r.metrics.topic_coverage.to_string(),
                r.metrics.bridge_retention.to_string(),
                r.metrics.cycle_retention.to_string(),
                opt(r.metrics.rouge1),
                opt(r.metrics.rouge2),
                opt(r.metrics.rouge_l),
            ])
            .map_err(|e| io_err(&e))?;
    }
    writer.flush().map_err(|e| io_err(&e))
}
