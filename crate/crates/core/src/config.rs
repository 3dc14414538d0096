//! Pipeline configuration: defaults, TOML loading and ablation switches.
//!
//! Every knob has a default, so an empty TOML file (or none at all) yields the
//! reference configuration. Ablations are applied by `effective()`, which
//! returns a config differing from the base in exactly the switched parameter.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::ProviderConfig;
use crate::eval::TextRankParams;
use crate::graph::GraphConfig;
use crate::score::ScoringWeights;
use crate::segment::{SegmenterConfig, TokenizerSpec};
use crate::select::{BudgetSpec, SelectionConfig};
use crate::topics::KMeansParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config file {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("failed to parse config file {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("unknown ablation '{0}' (expected no_seq, no_rep, no_bridge, no_cycle or no_nms)")]
    UnknownAblation(String),
}

/// Component switches used by the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    /// Drop sequential edges entirely and give semantic edges full weight.
    NoSeq,
    /// Zero the representativeness weight (clustering still runs).
    NoRep,
    /// Zero the bridge weight.
    NoBridge,
    /// Zero the cycle weight.
    NoCycle,
    /// Disable selection de-duplication.
    NoNms,
}

impl Ablation {
    pub const ALL: [Ablation; 5] = [
        Ablation::NoSeq,
        Ablation::NoRep,
        Ablation::NoBridge,
        Ablation::NoCycle,
        Ablation::NoNms,
    ];
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Ablation::NoSeq => "no_seq",
            Ablation::NoRep => "no_rep",
            Ablation::NoBridge => "no_bridge",
            Ablation::NoCycle => "no_cycle",
            Ablation::NoNms => "no_nms",
        };
        f.write_str(name)
    }
}

impl FromStr for Ablation {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "no_seq" => Ok(Ablation::NoSeq),
            "no_rep" => Ok(Ablation::NoRep),
            "no_bridge" => Ok(Ablation::NoBridge),
            "no_cycle" => Ok(Ablation::NoCycle),
            "no_nms" => Ok(Ablation::NoNms),
            other => Err(ConfigError::UnknownAblation(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub tokenizer: TokenizerSpec,
    pub segmenter: SegmenterConfig,
    pub provider: ProviderConfig,
    pub graph: GraphConfig,
    pub kmeans: KMeansParams,
    pub weights: ScoringWeights,
    pub budget: BudgetSpec,
    pub selection: SelectionConfig,
    pub textrank: TextRankParams,
    /// Cap on marked fundamental cycles.
    pub max_cycles: usize,
    /// Betweenness source-sample size; `None` means ceil(sqrt(n)) per document.
    pub bridge_samples: Option<usize>,
    /// Head window of the LEAD baseline.
    pub lead_head: usize,
    pub ablations: BTreeSet<Ablation>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 2026,
            tokenizer: TokenizerSpec::default(),
            segmenter: SegmenterConfig::default(),
            provider: ProviderConfig::default(),
            graph: GraphConfig::default(),
            kmeans: KMeansParams::default(),
            weights: ScoringWeights::default(),
            budget: BudgetSpec::default(),
            selection: SelectionConfig::default(),
            textrank: TextRankParams::default(),
            max_cycles: 200,
            bridge_samples: None,
            lead_head: 3,
            ablations: BTreeSet::new(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        toml::from_str(&raw).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    /// The configuration with all ablation switches applied. `no_seq` removes
    /// the sequential channel both from the mix (`beta = 0`) and from the edge
    /// set (`delta = 0`), so the remaining graph is exactly the semantic one.
    pub fn effective(&self) -> PipelineConfig {
        let mut cfg = self.clone();
        for ablation in &self.ablations {
            match ablation {
                Ablation::NoSeq => {
                    cfg.graph.alpha = 1.0;
                    cfg.graph.beta = 0.0;
                    cfg.graph.delta = 0;
                }
                Ablation::NoRep => cfg.weights.rep = 0.0,
                Ablation::NoBridge => cfg.weights.bridge = 0.0,
                Ablation::NoCycle => cfg.weights.cycle = 0.0,
                Ablation::NoNms => cfg.selection.nms_enabled = false,
            }
        }
        cfg
    }

    /// Enables one ablation on top of this config.
    pub fn with_ablation(&self, ablation: Ablation) -> PipelineConfig {
        let mut cfg = self.clone();
        cfg.ablations.insert(ablation);
        cfg
    }
}
