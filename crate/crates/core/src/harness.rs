//! Experiment harness: budget sweeps, ablation grids and sensitivity scans.
//!
//! All three reuse the pipeline's per-document analysis and the shared greedy
//! budget walk, then aggregate per-document metrics into mean rows. ROUGE
//! columns aggregate only documents that carry a reference and stay empty
//! otherwise.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{Ablation, PipelineConfig};
use crate::eval::{lead_baseline, textrank_baseline, EvalReport};
use crate::pipeline::{
    evaluate_selection, CorpusEntry, DocumentAnalysis, Pipeline, PipelineError,
};
use crate::select::{greedy_select, rank, SelectionOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ours,
    TextRank,
    Lead,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ours, Method::TextRank, Method::Lead];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ours => "ours",
            Method::TextRank => "textrank",
            Method::Lead => "lead3",
        })
    }
}

impl FromStr for Method {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ours" => Ok(Method::Ours),
            "textrank" => Ok(Method::TextRank),
            "lead3" | "lead" => Ok(Method::Lead),
            other => Err(PipelineError::InvalidParameter(format!(
                "unknown method '{other}' (expected ours, textrank or lead3)"
            ))),
        }
    }
}

/// Mean metrics over a batch of documents.
#[derive(Debug, Clone)]
pub struct MeanMetrics {
    pub docs: usize,
    pub compression_ratio: f64,
    pub topic_coverage: f64,
    pub bridge_retention: f64,
    pub cycle_retention: f64,
    pub rouge1: Option<f64>,
    pub rouge2: Option<f64>,
    pub rouge_l: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub method: Method,
    pub rho: f64,
    pub metrics: MeanMetrics,
}

#[derive(Debug, Clone)]
pub struct AblationRow {
    /// "full" or the ablation flag name.
    pub variant: String,
    pub metrics: MeanMetrics,
}

#[derive(Debug, Clone)]
pub struct ParamRow {
    pub parameter: String,
    pub value: String,
    pub metrics: MeanMetrics,
}

#[derive(Debug)]
pub struct SensitivityReport {
    pub k: Vec<ParamRow>,
    pub tau: Vec<ParamRow>,
    pub delta: Vec<ParamRow>,
    pub weights: Vec<ParamRow>,
}

fn analyze_all(
    pipeline: &Pipeline,
    entries: &[CorpusEntry],
) -> Result<Vec<DocumentAnalysis>, PipelineError> {
    entries
        .par_iter()
        .map(|e| pipeline.analyze(&e.doc))
        .collect()
}

/// Runs one method's ranking through the shared budget walk.
fn select_with(
    pipeline: &Pipeline,
    analysis: &DocumentAnalysis,
    budget_tokens: usize,
    method: Method,
) -> SelectionOutcome {
    match method {
        Method::Ours => {
            let order = rank(&analysis.card.composite);
            greedy_select(
                &analysis.sentences,
                &analysis.embeddings,
                &order,
                budget_tokens,
                &pipeline.config().selection,
            )
        }
        Method::TextRank => {
            textrank_baseline(
                &analysis.sentences,
                &analysis.embeddings,
                budget_tokens,
                &pipeline.config().textrank,
            )
            .0
        }
        Method::Lead => lead_baseline(
            &analysis.sentences,
            &analysis.embeddings,
            pipeline.config().lead_head,
            budget_tokens,
        ),
    }
}

fn mean_metrics(reports: &[EvalReport]) -> MeanMetrics {
    let docs = reports.len();
    let mean = |f: &dyn Fn(&EvalReport) -> f64| -> f64 {
        if docs == 0 {
            0.0
        } else {
            reports.iter().map(f).sum::<f64>() / docs as f64
        }
    };
    let mean_opt = |f: &dyn Fn(&EvalReport) -> Option<f64>| -> Option<f64> {
        let values: Vec<f64> = reports.iter().filter_map(f).collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    };
    MeanMetrics {
        docs,
        compression_ratio: mean(&|r| r.compression_ratio),
        topic_coverage: mean(&|r| r.topic_coverage),
        bridge_retention: mean(&|r| r.bridge_retention),
        cycle_retention: mean(&|r| r.cycle_retention),
        rouge1: mean_opt(&|r| r.rouge1),
        rouge2: mean_opt(&|r| r.rouge2),
        rouge_l: mean_opt(&|r| r.rouge_l),
    }
}

fn batch_metrics(
    pipeline: &Pipeline,
    analyses: &[DocumentAnalysis],
    entries: &[CorpusEntry],
    budget_of: &dyn Fn(&DocumentAnalysis) -> usize,
    method: Method,
) -> MeanMetrics {
    let reports: Vec<EvalReport> = analyses
        .iter()
        .zip(entries)
        .map(|(analysis, entry)| {
            let budget = budget_of(analysis);
            let outcome = select_with(pipeline, analysis, budget, method);
            evaluate_selection(analysis, &outcome, budget, entry.reference.as_deref())
        })
        .collect();
    mean_metrics(&reports)
}

/// Compression-budget sweep: one row per (method, rho), means over the corpus.
pub fn budget_sweep(
    pipeline: &Pipeline,
    entries: &[CorpusEntry],
    ratios: &[f64],
    methods: &[Method],
) -> Result<Vec<SweepRow>, PipelineError> {
    for rho in ratios {
        if !(*rho > 0.0 && *rho <= 1.0) {
            return Err(PipelineError::InvalidParameter(format!(
                "sweep ratio must be in (0, 1], got {rho}"
            )));
        }
    }
    let analyses = analyze_all(pipeline, entries)?;
    let mut rows = Vec::new();
    for &rho in ratios {
        for &method in methods {
            let metrics = batch_metrics(
                pipeline,
                &analyses,
                entries,
                &|a| (rho * a.total_tokens as f64).floor() as usize,
                method,
            );
            rows.push(SweepRow { method, rho, metrics });
        }
    }
    Ok(rows)
}

/// Ablation grid: the full configuration plus each single-ablation variant,
/// evaluated at the base budget.
pub fn ablation_grid(
    base: &PipelineConfig,
    entries: &[CorpusEntry],
) -> Result<Vec<AblationRow>, PipelineError> {
    let mut variants: Vec<(String, PipelineConfig)> = vec![("full".to_string(), base.clone())];
    for ablation in Ablation::ALL {
        variants.push((ablation.to_string(), base.with_ablation(ablation)));
    }
    let mut rows = Vec::new();
    for (variant, cfg) in variants {
        let pipeline = Pipeline::new(cfg)?;
        let analyses = analyze_all(&pipeline, entries)?;
        let metrics = batch_metrics(
            &pipeline,
            &analyses,
            entries,
            &|a| pipeline.config().budget.resolve(a.total_tokens),
            Method::Ours,
        );
        rows.push(AblationRow { variant, metrics });
    }
    Ok(rows)
}

pub const K_GRID: [usize; 4] = [4, 6, 8, 12];
pub const TAU_GRID: [f64; 4] = [0.88, 0.90, 0.92, 0.95];
pub const DELTA_GRID: [usize; 4] = [0, 1, 2, 3];
pub const TASK_WEIGHT_GRID: [f64; 4] = [0.35, 0.45, 0.55, 0.65];

/// Structural weight split patterns for the weight scan: the non-task mass is
/// divided among representativeness, bridge and cycle in these proportions.
pub const WEIGHT_PATTERNS: [(&str, [f64; 3]); 3] = [
    ("rep-heavy", [0.60, 0.30, 0.10]),
    ("balanced", [0.50, 0.40, 0.10]),
    ("bridge-heavy", [0.40, 0.50, 0.10]),
];

/// Parameter sensitivity scan: k, tau and delta grids of four settings each,
/// and a thirteen-row weight scan (four task weights times three split
/// patterns, plus the cycle-free balanced split at task weight 0.45).
pub fn sensitivity_grids(
    base: &PipelineConfig,
    entries: &[CorpusEntry],
) -> Result<SensitivityReport, PipelineError> {
    let run = |cfg: PipelineConfig| -> Result<MeanMetrics, PipelineError> {
        let pipeline = Pipeline::new(cfg)?;
        let analyses = analyze_all(&pipeline, entries)?;
        Ok(batch_metrics(
            &pipeline,
            &analyses,
            entries,
            &|a| pipeline.config().budget.resolve(a.total_tokens),
            Method::Ours,
        ))
    };

    let mut k_rows = Vec::new();
    for k in K_GRID {
        let mut cfg = base.clone();
        cfg.graph.k = k;
        k_rows.push(ParamRow {
            parameter: "k".to_string(),
            value: k.to_string(),
            metrics: run(cfg)?,
        });
    }

    let mut tau_rows = Vec::new();
    for tau in TAU_GRID {
        let mut cfg = base.clone();
        cfg.selection.tau = tau;
        tau_rows.push(ParamRow {
            parameter: "tau".to_string(),
            value: tau.to_string(),
            metrics: run(cfg)?,
        });
    }

    let mut delta_rows = Vec::new();
    for delta in DELTA_GRID {
        let mut cfg = base.clone();
        cfg.graph.delta = delta;
        delta_rows.push(ParamRow {
            parameter: "delta".to_string(),
            value: delta.to_string(),
            metrics: run(cfg)?,
        });
    }

    let mut weight_rows = Vec::new();
    for t in TASK_WEIGHT_GRID {
        for (name, split) in WEIGHT_PATTERNS {
            let mut cfg = base.clone();
            cfg.weights.task = t;
            cfg.weights.rep = (1.0 - t) * split[0];
            cfg.weights.bridge = (1.0 - t) * split[1];
            cfg.weights.cycle = (1.0 - t) * split[2];
            weight_rows.push(ParamRow {
                parameter: "weights".to_string(),
                value: format!("task={t} {name}"),
                metrics: run(cfg)?,
            });
        }
    }
    // Cycle-free balanced split, renormalised over rep and bridge, at t = 0.45.
    {
        let t = 0.45;
        let mut cfg = base.clone();
        cfg.weights.task = t;
        cfg.weights.rep = (1.0 - t) * 0.50 / 0.90;
        cfg.weights.bridge = (1.0 - t) * 0.40 / 0.90;
        cfg.weights.cycle = 0.0;
        weight_rows.push(ParamRow {
            parameter: "weights".to_string(),
            value: format!("task={t} balanced-no-cycle"),
            metrics: run(cfg)?,
        });
    }

    Ok(SensitivityReport { k: k_rows, tau: tau_rows, delta: delta_rows, weights: weight_rows })
}

fn metric_fields(m: &MeanMetrics) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        m.docs.to_string(),
        m.compression_ratio.to_string(),
        m.topic_coverage.to_string(),
        m.bridge_retention.to_string(),
        m.cycle_retention.to_string(),
        opt(m.rouge1),
        opt(m.rouge2),
        opt(m.rouge_l),
    ]
}

const METRIC_HEADER: [&str; 8] = [
    "docs",
    "compression_ratio",
    "topic_coverage",
    "bridge_retention",
    "cycle_retention",
    "rouge1",
    "rouge2",
    "rouge_l",
];

fn csv_error(path: &Path, e: &dyn fmt::Display) -> PipelineError {
    PipelineError::Io { path: path.to_path_buf(), reason: e.to_string() }
}

pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), PipelineError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, &e))?;
    let mut header = vec!["method".to_string(), "rho".to_string()];
    header.extend(METRIC_HEADER.iter().map(|s| s.to_string()));
    writer.write_record(&header).map_err(|e| csv_error(path, &e))?;
    for row in rows {
        let mut record = vec![row.method.to_string(), row.rho.to_string()];
        record.extend(metric_fields(&row.metrics));
        writer.write_record(&record).map_err(|e| csv_error(path, &e))?;
    }
    writer.flush().map_err(|e| csv_error(path, &e))
}

pub fn write_ablation_csv(rows: &[AblationRow], path: &Path) -> Result<(), PipelineError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, &e))?;
    let mut header = vec!["variant".to_string()];
    header.extend(METRIC_HEADER.iter().map(|s| s.to_string()));
    writer.write_record(&header).map_err(|e| csv_error(path, &e))?;
    for row in rows {
        let mut record = vec![row.variant.clone()];
        record.extend(metric_fields(&row.metrics));
        writer.write_record(&record).map_err(|e| csv_error(path, &e))?;
    }
    writer.flush().map_err(|e| csv_error(path, &e))
}

fn write_param_csv(rows: &[ParamRow], path: &Path) -> Result<(), PipelineError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, &e))?;
    let mut header = vec!["parameter".to_string(), "value".to_string()];
    header.extend(METRIC_HEADER.iter().map(|s| s.to_string()));
    writer.write_record(&header).map_err(|e| csv_error(path, &e))?;
    for row in rows {
        let mut record = vec![row.parameter.clone(), row.value.clone()];
        record.extend(metric_fields(&row.metrics));
        writer.write_record(&record).map_err(|e| csv_error(path, &e))?;
    }
    writer.flush().map_err(|e| csv_error(path, &e))
}

/// Writes `k.csv`, `tau.csv`, `delta.csv` and `weights.csv` into `dir`.
pub fn write_sensitivity_csvs(report: &SensitivityReport, dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| PipelineError::Io { path: dir.to_path_buf(), reason: e.to_string() })?;
    write_param_csv(&report.k, &dir.join("k.csv"))?;
    write_param_csv(&report.tau, &dir.join("tau.csv"))?;
    write_param_csv(&report.delta, &dir.join("delta.csv"))?;
    write_param_csv(&report.weights, &dir.join("weights.csv"))
}
