//! Budgeted greedy sentence selection with cosine de-duplication.
//!
//! Candidates are visited in descending composite score (ties toward the lower
//! sentence index). A candidate that does not fit the remaining budget is
//! skipped, not terminal; one too similar to an already selected sentence is
//! suppressed. Selection keeps original document order for reassembly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{cosine, Embedding};
use crate::segment::Sentence;

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("budget ratio must be in (0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("similarity threshold must be in [0, 1], got {0}")]
    InvalidTau(f64),
}

/// Token budget: absolute, or a ratio of the document's token count resolved
/// with a floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BudgetSpec {
    Absolute { tokens: usize },
    Ratio { rho: f64 },
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec::Ratio { rho: 0.30 }
    }
}

impl BudgetSpec {
    pub fn validate(&self) -> Result<(), SelectError> {
        match self {
            BudgetSpec::Absolute { .. } => Ok(()),
            BudgetSpec::Ratio { rho } => {
                if *rho > 0.0 && *rho <= 1.0 {
                    Ok(())
                } else {
                    Err(SelectError::InvalidRatio(*rho))
                }
            }
        }
    }

    /// Budget in tokens for a document of `total_tokens`.
    pub fn resolve(&self, total_tokens: usize) -> usize {
        match self {
            BudgetSpec::Absolute { tokens } => *tokens,
            BudgetSpec::Ratio { rho } => (rho * total_tokens as f64).floor() as usize,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Cosine threshold at or above which a candidate is suppressed.
    pub tau: f64,
    pub nms_enabled: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { tau: 0.92, nms_enabled: true }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectError> {
        if (0.0..=1.0).contains(&self.tau) {
            Ok(())
        } else {
            Err(SelectError::InvalidTau(self.tau))
        }
    }
}

/// Per-sentence outcome of the greedy pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Selected,
    BudgetSkipped,
    NmsSuppressed,
    NotReached,
}

#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    /// Selected sentence indices in ascending document order.
    pub selected: Vec<usize>,
    pub tokens_used: usize,
    pub verdicts: Vec<Verdict>,
    /// Set when nothing fit the budget; a warning, not an error.
    pub budget_too_small: bool,
}

/// Candidate order: composite score descending, index ascending on ties.
pub fn rank(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Greedy budgeted selection over `order`. `embeddings` drive the cosine
/// de-duplication; they are unused when `config.nms_enabled` is false.
pub fn greedy_select(
    sentences: &[Sentence],
    embeddings: &[Embedding],
    order: &[usize],
    budget_tokens: usize,
    config: &SelectionConfig,
) -> SelectionOutcome {
    let n = sentences.len();
    let mut verdicts = vec![Verdict::NotReached; n];
    let mut selected: Vec<usize> = Vec::new();
    let mut remaining = budget_tokens;

    for &i in order {
        if remaining == 0 {
            break;
        }
        let cost = sentences[i].token_count;
        if cost > remaining {
            verdicts[i] = Verdict::BudgetSkipped;
            continue;
        }
        if config.nms_enabled {
            let too_similar = selected
                .iter()
                .any(|&j| cosine(&embeddings[i], &embeddings[j]) >= config.tau);
            if too_similar {
                verdicts[i] = Verdict::NmsSuppressed;
                continue;
            }
        }
        verdicts[i] = Verdict::Selected;
        selected.push(i);
        remaining -= cost;
    }

    let budget_too_small = selected.is_empty() && n > 0;
    let tokens_used = budget_tokens - remaining;
    selected.sort_unstable();
    SelectionOutcome { selected, tokens_used, verdicts, budget_too_small }
}

/// Joins the selected sentences in document order with single spaces.
pub fn reassemble(sentences: &[Sentence], selected: &[usize]) -> String {
    let mut out = String::new();
    for (pos, &i) in selected.iter().enumerate() {
        if pos > 0 {
            out.push(' ');
        }
        out.push_str(&sentences[i].text);
    }
    out
}
