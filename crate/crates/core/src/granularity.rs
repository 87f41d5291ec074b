//! Segmentation granularity and character error rate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::discovery::TokenUsageTable;

pub const DEFAULT_CER_THRESHOLD: f64 = 0.30;

/// Leading word-boundary markers stripped (at most one) before measuring a
/// token: plain space, byte-level BPE `Ġ`, and SentencePiece `▁`.
const SPACE_MARKERS: [char; 3] = [' ', '\u{0120}', '\u{2581}'];

#[derive(Debug, Error, PartialEq)]
pub enum GranularityError {
    #[error("usage table is empty")]
    EmptyTable,
    #[error("every token is empty after stripping the boundary marker")]
    AllTokensEmpty,
    #[error("reference text is empty after normalization")]
    EmptyReference,
    #[error("line {line}: expected `utt_id<TAB>reference_text`")]
    MalformedReference { line: usize },
    #[error("duplicate reference for utterance `{0}`")]
    DuplicateReference(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularityResult {
    pub language: String,
    pub mean_length: f64,
    pub total_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CerResult {
    pub language: String,
    pub cer: f64,
    pub edit_ops: u64,
    pub ref_chars: u64,
    pub included: bool,
}

/// Code-point length after dropping at most one leading boundary marker.
pub fn token_length(text: &str) -> usize {
    let mut chars = text.chars();
    match chars.clone().next() {
        Some(c) if SPACE_MARKERS.contains(&c) => {
            chars.next();
            chars.count()
        }
        _ => chars.count(),
    }
}

/// Frequency-weighted mean token length. Tokens of stripped length zero are
/// left out of both sums.
pub fn weighted_mean_token_length(
    usage: &TokenUsageTable,
) -> Result<GranularityResult, GranularityError> {
    if usage.entries.is_empty() {
        return Err(GranularityError::EmptyTable);
    }
    let mut weighted: u128 = 0;
    let mut total: u64 = 0;
    for u in usage.entries.values() {
        let len = token_length(&u.token_text);
        if len == 0 {
            continue;
        }
        weighted += u.frequency as u128 * len as u128;
        total += u.frequency;
    }
    if total == 0 {
        return Err(GranularityError::AllTokensEmpty);
    }
    Ok(GranularityResult {
        language: usage.language.clone(),
        mean_length: weighted as f64 / total as f64,
        total_weight: total,
    })
}

/// NFC, whitespace runs collapsed to one space, trimmed. No case folding.
pub fn normalize_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Unit-cost Levenshtein distance over code points, two-row DP.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditCount {
    pub cer: f64,
    pub edit_ops: u64,
    pub ref_chars: u64,
}

pub fn compute_cer(reference: &str, hypothesis: &str) -> Result<EditCount, GranularityError> {
    let r: Vec<char> = normalize_text(reference).chars().collect();
    if r.is_empty() {
        return Err(GranularityError::EmptyReference);
    }
    let h: Vec<char> = normalize_text(hypothesis).chars().collect();
    let edits = levenshtein(&r, &h) as u64;
    Ok(EditCount {
        cer: edits as f64 / r.len() as f64,
        edit_ops: edits,
        ref_chars: r.len() as u64,
    })
}

/// Corpus-level CER for one language: summed edits over summed reference
/// lengths across `(reference, hypothesis)` pairs.
pub fn language_cer<'a>(
    language: &str,
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    threshold: f64,
) -> Result<CerResult, GranularityError> {
    let (mut edits, mut chars) = (0u64, 0u64);
    for (reference, hypothesis) in pairs {
        let e = compute_cer(reference, hypothesis)?;
        edits += e.edit_ops;
        chars += e.ref_chars;
    }
    if chars == 0 {
        return Err(GranularityError::EmptyReference);
    }
    let cer = edits as f64 / chars as f64;
    Ok(CerResult {
        language: language.to_string(),
        cer,
        edit_ops: edits,
        ref_chars: chars,
        included: cer < threshold,
    })
}

/// Splits results into `(included, excluded)` by `cer < threshold`.
pub fn cer_filter(results: Vec<CerResult>, threshold: f64) -> (Vec<CerResult>, Vec<CerResult>) {
    results.into_iter().partition(|r| r.cer < threshold)
}

/// Reads `utt_id<TAB>reference_text` lines. Blank lines are skipped.
pub fn parse_reference_tsv(text: &str) -> Result<BTreeMap<String, String>, GranularityError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, reference) = line
            .split_once('\t')
            .ok_or(GranularityError::MalformedReference { line: i + 1 })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(GranularityError::MalformedReference { line: i + 1 });
        }
        if out.insert(id.to_string(), reference.to_string()).is_some() {
            return Err(GranularityError::DuplicateReference(id.to_string()));
        }
    }
    Ok(out)
}
