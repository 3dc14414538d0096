//! ctxpress: budgeted structural context compression for long documents.
//!
//! Subcommands: `compress` for a single document, `run` for a JSONL corpus,
//! and the experiment drivers `sweep`, `ablate` and `sensitivity`. Options
//! follow a config file < flag override precedence.

use std::io::Read;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ctxpress_core::config::{Ablation, PipelineConfig};
use ctxpress_core::embed::ProviderKind;
use ctxpress_core::harness::{
    ablation_grid, budget_sweep, sensitivity_grids, write_ablation_csv, write_sensitivity_csvs,
    write_sweep_csv, Method,
};
use ctxpress_core::pipeline::{load_corpus, Pipeline};
use ctxpress_core::segment::RawDocument;
use ctxpress_core::select::BudgetSpec;

#[derive(Parser)]
#[command(name = "ctxpress", version, about = "Compress long documents into token-budgeted sentence subsets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. Flags override config-file values.
#[derive(Args, Debug)]
struct CommonOpts {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Global random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Token budget as a fraction of the document (exclusive with --budget-tokens)
    #[arg(long)]
    budget_ratio: Option<f64>,
    /// Absolute token budget (exclusive with --budget-ratio)
    #[arg(long)]
    budget_tokens: Option<usize>,
    /// Semantic neighbours per sentence
    #[arg(long)]
    k: Option<usize>,
    /// Sequential edge reach
    #[arg(long)]
    delta: Option<usize>,
    /// Semantic mix weight (beta defaults to 1 - alpha)
    #[arg(long)]
    alpha: Option<f64>,
    /// Sequential mix weight (alpha defaults to 1 - beta)
    #[arg(long)]
    beta: Option<f64>,
    /// De-duplication cosine threshold
    #[arg(long)]
    tau: Option<f64>,
    /// Scoring weights as task,rep,bridge,cycle
    #[arg(long)]
    weights: Option<String>,
    /// Comma-separated ablations: no_seq,no_rep,no_bridge,no_cycle,no_nms
    #[arg(long)]
    ablate: Option<String>,
    /// Embedding provider: local-hash or remote-http
    #[arg(long)]
    provider: Option<String>,
    /// Remote provider URL
    #[arg(long)]
    endpoint: Option<String>,
    /// Embedding dimension
    #[arg(long)]
    dimension: Option<usize>,
    /// Embedding cache directory
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compress one document to JSON
    Compress {
        #[command(flatten)]
        common: CommonOpts,
        /// Input text file; stdin when absent or '-'
        #[arg(long)]
        input: Option<PathBuf>,
        /// Document id used for seeding and reporting
        #[arg(long, default_value = "doc")]
        doc_id: String,
        /// Task query steering relevance scores
        #[arg(long)]
        query: Option<String>,
        /// Reference summary file for ROUGE scores
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Output path; stdout when absent
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the hybrid graph as JSON for auditing
        #[arg(long)]
        dump_graph: Option<PathBuf>,
    },
    /// Compress every document of a JSONL corpus
    Run {
        #[command(flatten)]
        common: CommonOpts,
        /// Corpus file: one JSON object per line
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for result JSONs and summary.csv
        #[arg(long)]
        out: PathBuf,
        /// Worker threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Sweep compression budgets across methods, writing a CSV
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated budget ratios
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5")]
        ratios: String,
        /// Comma-separated methods: ours,textrank,lead3
        #[arg(long, default_value = "ours,textrank,lead3")]
        methods: String,
    },
    /// Run the component ablation grid, writing a CSV
    Ablate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Run parameter sensitivity scans, writing one CSV per parameter
    Sensitivity {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for k.csv, tau.csv, delta.csv, weights.csv
        #[arg(long)]
        out: PathBuf,
    },
}

fn build_config(common: &CommonOpts) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::from_toml_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    match (common.budget_ratio, common.budget_tokens) {
        (Some(_), Some(_)) => bail!("--budget-ratio and --budget-tokens are mutually exclusive"),
        (Some(rho), None) => cfg.budget = BudgetSpec::Ratio { rho },
        (None, Some(tokens)) => cfg.budget = BudgetSpec::Absolute { tokens },
        (None, None) => {}
    }
    if let Some(k) = common.k {
        cfg.graph.k = k;
    }
    if let Some(delta) = common.delta {
        cfg.graph.delta = delta;
    }
    match (common.alpha, common.beta) {
        (Some(a), Some(b)) => {
            cfg.graph.alpha = a;
            cfg.graph.beta = b;
        }
        (Some(a), None) => {
            cfg.graph.alpha = a;
            cfg.graph.beta = 1.0 - a;
        }
        (None, Some(b)) => {
            cfg.graph.beta = b;
            cfg.graph.alpha = 1.0 - b;
        }
        (None, None) => {}
    }
    if let Some(tau) = common.tau {
        cfg.selection.tau = tau;
    }
    if let Some(weights) = &common.weights {
        let parts: Vec<f64> = weights
            .split(',')
            .map(|p| p.trim().parse::<f64>().context("weights must be four numbers"))
            .collect::<Result<_>>()?;
        if parts.len() != 4 {
            bail!("--weights expects task,rep,bridge,cycle");
        }
        cfg.weights.task = parts[0];
        cfg.weights.rep = parts[1];
        cfg.weights.bridge = parts[2];
        cfg.weights.cycle = parts[3];
    }
    if let Some(ablate) = &common.ablate {
        for flag in ablate.split(',').filter(|s| !s.trim().is_empty()) {
            cfg.ablations.insert(flag.parse::<Ablation>()?);
        }
    }
    if let Some(provider) = &common.provider {
        cfg.provider.kind = match provider.as_str() {
            "local-hash" => ProviderKind::LocalHash,
            "remote-http" => ProviderKind::RemoteHttp,
            other => bail!("unknown provider '{other}' (expected local-hash or remote-http)"),
        };
    }
    if let Some(endpoint) = &common.endpoint {
        cfg.provider.endpoint = Some(endpoint.clone());
    }
    if let Some(dim) = common.dimension {
        cfg.provider.dimension = dim;
    }
    if let Some(dir) = &common.cache_dir {
        cfg.provider.cache_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn read_input(input: &Option<PathBuf>) -> Result<String> {
    match input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)
            .with_context(|| format!("reading input {}", path.display())),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            Ok(buf)
        }
    }
}

fn load_entries(
    corpus: &std::path::Path,
) -> Result<Vec<ctxpress_core::pipeline::CorpusEntry>> {
    let (entries, failures) = load_corpus(corpus)?;
    for failure in &failures {
        eprintln!("warning: line {}: {}", failure.line, failure.error);
    }
    if entries.is_empty() {
        bail!("corpus {} contains no valid documents", corpus.display());
    }
    Ok(entries.into_iter().map(|(_, e)| e).collect())
}

fn parse_ratios(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad ratio '{s}'")))
        .collect()
}

fn parse_methods(raw: &str) -> Result<Vec<Method>> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compress { common, input, doc_id, query, reference, output, dump_graph } => {
            let cfg = build_config(&common)?;
            let pipeline = Pipeline::new(cfg)?;
            let text = read_input(&input)?;
            let reference_text = match &reference {
                Some(path) => Some(
                    std::fs::read_to_string(path)
                        .with_context(|| format!("reading reference {}", path.display()))?,
                ),
                None => None,
            };
            let doc = RawDocument { doc_id, text, query };
            let analysis = pipeline.analyze(&doc)?;
            if let Some(path) = dump_graph {
                let dump = analysis.graph.dump(&pipeline.config().graph);
                std::fs::write(&path, serde_json::to_string_pretty(&dump)?)
                    .with_context(|| format!("writing graph dump {}", path.display()))?;
            }
            let result = pipeline.compress_analysis(&analysis, reference_text.as_deref());
            let body = serde_json::to_string_pretty(&result)?;
            match output {
                Some(path) => std::fs::write(&path, format!("{body}\n"))
                    .with_context(|| format!("writing output {}", path.display()))?,
                None => println!("{body}"),
            }
            Ok(0)
        }
        Command::Run { common, corpus, out, jobs } => {
            let cfg = build_config(&common)?;
            let pipeline = Pipeline::new(cfg)?;
            let summary = pipeline.run_corpus(&corpus, &out, jobs)?;
            eprintln!(
                "processed {} document(s), {} failure(s)",
                summary.processed,
                summary.failed.len()
            );
            for failure in &summary.failed {
                eprintln!(
                    "failed: line {} ({}): {}",
                    failure.line,
                    failure.doc_id.as_deref().unwrap_or("?"),
                    failure.error
                );
            }
            Ok(if summary.failed.is_empty() { 0 } else { 1 })
        }
        Command::Sweep { common, corpus, out, ratios, methods } => {
            let cfg = build_config(&common)?;
            let pipeline = Pipeline::new(cfg)?;
            let entries = load_entries(&corpus)?;
            let rows = budget_sweep(&pipeline, &entries, &parse_ratios(&ratios)?, &parse_methods(&methods)?)?;
            write_sweep_csv(&rows, &out)?;
            eprintln!("wrote {} sweep row(s) to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Ablate { common, corpus, out } => {
            let cfg = build_config(&common)?;
            let entries = load_entries(&corpus)?;
            let rows = ablation_grid(&cfg, &entries)?;
            write_ablation_csv(&rows, &out)?;
            eprintln!("wrote {} ablation row(s) to {}", rows.len(), out.display());
            Ok(0)
        }
        Command::Sensitivity { common, corpus, out } => {
            let cfg = build_config(&common)?;
            let entries = load_entries(&corpus)?;
            let report = sensitivity_grids(&cfg, &entries)?;
            write_sensitivity_csvs(&report, &out)?;
            eprintln!("wrote sensitivity tables to {}", out.display());
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
