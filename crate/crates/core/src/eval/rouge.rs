//! ROUGE-1/2/L F1 for compressed-versus-reference comparison.
//!
//! Tokens are lowercased whitespace/punctuation tokens, no stemming or
//! stopword removal. N-gram variants use clipped counts. F1 is computed as
//! `2 * matches / (candidate_len + reference_len)`, which equals the harmonic
//! mean of precision and recall but avoids its intermediate rounding, so e.g.
//! a 2-token candidate fully contained in a 3-token reference scores exactly 0.8.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RougeVariant {
    One,
    Two,
    L,
}

/// Lowercased evaluation tokens of `text`.
pub fn rouge_tokens(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    crate::segment::whitespace_punct_tokens(&lowered)
        .into_iter()
        .map(str::to_string)
        .collect()
}

/// ROUGE F1 score in [0, 1]. Both sides empty yields 0.
pub fn rouge_f1(candidate: &str, reference: &str, variant: RougeVariant) -> f64 {
    let cand = rouge_tokens(candidate);
    let refr = rouge_tokens(reference);
    match variant {
        RougeVariant::One => ngram_f1(&cand, &refr, 1),
        RougeVariant::Two => ngram_f1(&cand, &refr, 2),
        RougeVariant::L => lcs_f1(&cand, &refr),
    }
}

fn ngram_f1(cand: &[String], refr: &[String], n: usize) -> f64 {
    let cand_total = cand.len().saturating_sub(n - 1);
    let ref_total = refr.len().saturating_sub(n - 1);
    if cand_total == 0 || ref_total == 0 {
        return 0.0;
    }
    let mut ref_counts: HashMap<&[String], usize> = HashMap::new();
    for gram in refr.windows(n) {
        *ref_counts.entry(gram).or_insert(0) += 1;
    }
    let mut matches = 0usize;
    for gram in cand.windows(n) {
        if let Some(count) = ref_counts.get_mut(gram) {
            if *count > 0 {
                *count -= 1;
                matches += 1;
            }
        }
    }
    2.0 * matches as f64 / (cand_total + ref_total) as f64
}

fn lcs_f1(cand: &[String], refr: &[String]) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return 0.0;
    }
    let lcs = lcs_length(cand, refr);
    2.0 * lcs as f64 / (cand.len() + refr.len()) as f64
}

/// Longest common subsequence length, rolling-row dynamic programme.
fn lcs_length(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
