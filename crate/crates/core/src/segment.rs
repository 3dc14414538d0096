//! Sentence segmentation and token counting.
//!
//! The splitter is rule based: a sentence ends at `.`, `!` or `?` (plus any
//! closing quotes or brackets) when the following non-whitespace character opens
//! a new sentence, and the word before a period is not a known abbreviation.
//! Fragments shorter than `min_fragment_tokens` are merged with a neighbour so
//! that stray initials or list markers never surface as standalone sentences.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("document produced no sentences")]
    EmptyDocument,
    #[error("failed to load tokenizer vocabulary from {path}: {reason}")]
    VocabLoad { path: PathBuf, reason: String },
}

/// Input document as it appears on the wire: an identifier, the raw text and an
/// optional task query that steers relevance scoring downstream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
}

/// A segmented sentence. `index` is the zero-based position in the document and
/// is stable across the whole pipeline; `token_count` is measured with the
/// tokenizer that was active at segmentation time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub token_count: usize,
}

/// Tokenizer selection. The default counts alphanumeric runs as one token each
/// and every other non-whitespace character as its own token; the vocab-file
/// mode counts greedy longest-prefix subword matches against a wordlist.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TokenizerSpec {
    #[default]
    WhitespacePunct,
    VocabFile { vocab: PathBuf },
}

#[derive(Debug, Clone)]
enum TokenizerMode {
    WhitespacePunct,
    Vocab { entries: HashSet<String>, max_len: usize },
}

#[derive(Debug, Clone)]
pub struct Tokenizer {
    mode: TokenizerMode,
}

impl Tokenizer {
    pub fn new(spec: &TokenizerSpec) -> Result<Self, SegmentError> {
        match spec {
            TokenizerSpec::WhitespacePunct => Ok(Tokenizer { mode: TokenizerMode::WhitespacePunct }),
            TokenizerSpec::VocabFile { vocab } => {
                let raw = std::fs::read_to_string(vocab).map_err(|e| SegmentError::VocabLoad {
                    path: vocab.clone(),
                    reason: e.to_string(),
                })?;
                let entries: HashSet<String> = raw
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(str::to_string)
                    .collect();
                if entries.is_empty() {
                    return Err(SegmentError::VocabLoad {
                        path: vocab.clone(),
                        reason: "vocabulary file contains no entries".to_string(),
                    });
                }
                let max_len = entries.iter().map(|e| e.chars().count()).max().unwrap_or(1);
                Ok(Tokenizer { mode: TokenizerMode::Vocab { entries, max_len } })
            }
        }
    }

    pub fn whitespace_punct() -> Self {
        Tokenizer { mode: TokenizerMode::WhitespacePunct }
    }

    /// Number of tokens in `text` under this tokenizer.
    pub fn count(&self, text: &str) -> usize {
        match &self.mode {
            TokenizerMode::WhitespacePunct => word_spans(text).len(),
            TokenizerMode::Vocab { entries, max_len } => word_spans(text)
                .into_iter()
                .map(|s| {
                    if s.alnum {
                        subword_count(&text[s.start..s.end], entries, *max_len)
                    } else {
                        1
                    }
                })
                .sum(),
        }
    }

    /// Truncates `text` to at most `max_tokens` tokens, cutting at a token
    /// boundary. Counting for the cut always uses the whitespace/punctuation
    /// rule so that truncation is independent of the configured vocabulary.
    pub fn truncate<'a>(&self, text: &'a str, max_tokens: usize) -> &'a str {
        Self::truncate_whitespace_punct(text, max_tokens)
    }

    fn truncate_whitespace_punct(text: &str, max_tokens: usize) -> &str {
        let spans = word_spans(text);
        if spans.len() <= max_tokens {
            return text;
        }
        let end = spans[max_tokens - 1].end;
        &text[..end]
    }
}

/// Token slices of `text` under the whitespace/punctuation rule, in order.
pub fn whitespace_punct_tokens(text: &str) -> Vec<&str> {
    word_spans(text).into_iter().map(|s| &text[s.start..s.end]).collect()
}

struct Span {
    start: usize,
    end: usize,
    alnum: bool,
}

/// Scans `text` into spans: maximal alphanumeric runs and single non-alphanumeric,
/// non-whitespace characters.
fn word_spans(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if run_start.is_none() {
                run_start = Some(i);
            }
        } else {
            if let Some(s) = run_start.take() {
                spans.push(Span { start: s, end: i, alnum: true });
            }
            if !ch.is_whitespace() {
                spans.push(Span { start: i, end: i + ch.len_utf8(), alnum: false });
            }
        }
    }
    if let Some(s) = run_start {
        spans.push(Span { start: s, end: text.len(), alnum: true });
    }
    spans
}

/// Greedy longest-prefix subword segmentation of a single word. Characters not
/// covered by any vocabulary entry are counted as one token each.
fn subword_count(word: &str, entries: &HashSet<String>, max_len: usize) -> usize {
    let chars: Vec<char> = word.chars().collect();
    let mut i = 0;
    let mut count = 0;
    while i < chars.len() {
        let upper = (chars.len() - i).min(max_len);
        let mut matched = 0;
        for len in (1..=upper).rev() {
            let candidate: String = chars[i..i + len].iter().collect();
            if entries.contains(&candidate) {
                matched = len;
                break;
            }
        }
        if matched == 0 {
            matched = 1;
        }
        i += matched;
        count += 1;
    }
    count
}

/// Segmenter knobs. `abbreviations` are matched case-insensitively against the
/// word preceding a period (without the period itself).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmenterConfig {
    pub min_fragment_tokens: usize,
    pub abbreviations: Vec<String>,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            min_fragment_tokens: 3,
            abbreviations: [
                "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e",
                "cf", "al", "fig", "eq", "no", "vol", "pp", "resp", "approx",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        }
    }
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '{', '\u{201c}', '\u{2018}', '\u{ab}'];

/// Splits `doc` into sentences, normalising internal whitespace runs to single
/// spaces and merging fragments below `config.min_fragment_tokens`.
///
/// Errors with `EmptyDocument` when the text holds no non-whitespace content.
pub fn segment(
    doc: &RawDocument,
    config: &SegmenterConfig,
    tokenizer: &Tokenizer,
) -> Result<Vec<Sentence>, SegmentError> {
    let fragments = split_fragments(&doc.text, &abbrev_set(config));
    let merged = merge_short(fragments, config.min_fragment_tokens, tokenizer);
    if merged.is_empty() {
        return Err(SegmentError::EmptyDocument);
    }
    Ok(merged
        .into_iter()
        .enumerate()
        .map(|(index, text)| {
            let token_count = tokenizer.count(&text);
            Sentence { index, text, token_count }
        })
        .collect())
}

fn abbrev_set(config: &SegmenterConfig) -> HashSet<String> {
    config.abbreviations.iter().map(|a| a.to_lowercase()).collect()
}

fn split_fragments(text: &str, abbreviations: &HashSet<String>) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut boundaries = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let (_, ch) = chars[pos];
        if ch == '.' || ch == '!' || ch == '?' {
            let mut end = pos + 1;
            while end < chars.len() && CLOSERS.contains(&chars[end].1) {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].1.is_whitespace() {
                next += 1;
            }
            let has_gap = next > end;
            let starts_new = next < chars.len()
                && (chars[next].1.is_uppercase() || OPENERS.contains(&chars[next].1));
            let blocked = ch == '.' && is_abbreviation(&chars, pos, abbreviations);
            if has_gap && starts_new && !blocked {
                let cut = if end < chars.len() { chars[end].0 } else { text.len() };
                boundaries.push(cut);
                pos = next;
                continue;
            }
        }
        pos += 1;
    }

    let mut fragments = Vec::new();
    let mut start = 0;
    for cut in boundaries {
        push_fragment(&mut fragments, &text[start..cut]);
        start = cut;
    }
    push_fragment(&mut fragments, &text[start..]);
    fragments
}

fn push_fragment(fragments: &mut Vec<String>, raw: &str) {
    let normalized = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    if !normalized.is_empty() {
        fragments.push(normalized);
    }
}

/// True when the word ending just before the period at `chars[pos]` is in the
/// abbreviation list. Internal periods are kept so entries like "e.g" match.
fn is_abbreviation(chars: &[(usize, char)], pos: usize, abbreviations: &HashSet<String>) -> bool {
    let mut word: Vec<char> = Vec::new();
    let mut i = pos;
    while i > 0 {
        let c = chars[i - 1].1;
        if c.is_alphanumeric() || c == '.' {
            word.push(c);
            i -= 1;
        } else {
            break;
        }
    }
    if word.is_empty() {
        return false;
    }
    word.reverse();
    let word: String = word.into_iter().collect();
    let trimmed = word.trim_matches('.');
    if trimmed.is_empty() {
        return false;
    }
    abbreviations.contains(&trimmed.to_lowercase())
}

fn merge_short(fragments: Vec<String>, min_tokens: usize, tokenizer: &Tokenizer) -> Vec<String> {
    let mut merged: Vec<String> = Vec::new();
    let mut pending = String::new();
    for fragment in fragments {
        let combined = if pending.is_empty() {
            fragment
        } else {
            format!("{pending} {fragment}")
        };
        if tokenizer.count(&combined) < min_tokens {
            pending = combined;
        } else {
            merged.push(combined);
            pending.clear();
        }
    }
    if !pending.is_empty() {
        match merged.last_mut() {
            Some(last) => {
                last.push(' ');
                last.push_str(&pending);
            }
            None => merged.push(pending),
        }
    }
    merged
}
