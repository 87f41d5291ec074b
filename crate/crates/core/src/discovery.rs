//! Cumulative sub-token discovery and usage frequencies per language.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmodel::{CandidateRecord, Windows};

/// Minimum relative growth from the first to the last checkpoint.
pub const MIN_RELATIVE_GROWTH: f64 = 0.10;
/// Minimum coefficient of variation of the checkpoint counts.
pub const MIN_CV: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum DiscoveryError {
    #[error("every checkpoint window is empty")]
    EmptyWindowSeries,
    #[error("records mix languages `{0}` and `{1}`")]
    MixedLanguages(String, String),
    #[error("horizon {0} min is not a grid checkpoint")]
    HorizonNotOnGrid(f64),
    #[error("trajectory starts at zero; relative growth is undefined")]
    DegenerateTrajectory,
    #[error("need at least {needed} checkpoints, got {got}")]
    TooFewCheckpoints { needed: usize, got: usize },
}

/// Unique token ids observed up to each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryTrajectory {
    pub language: String,
    pub checkpoints: Vec<f64>,
    pub counts: Vec<u64>,
    /// Earliest checkpoint (minutes) at which each id was observed.
    pub first_seen: BTreeMap<u32, f64>,
}

impl DiscoveryTrajectory {
    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn final_count(&self) -> u64 {
        self.counts.last().copied().unwrap_or(0)
    }

    pub fn count_at(&self, minutes: f64) -> Option<u64> {
        self.checkpoints
            .iter()
            .position(|&c| (c - minutes).abs() <= 1e-9 * c.max(1.0))
            .map(|i| self.counts[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub frequency: u64,
    pub token_text: String,
}

/// Per-id frequencies within a horizon window. One Top-K list contributes
/// at most one occurrence per id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenUsageTable {
    pub language: String,
    pub horizon_minutes: f64,
    pub entries: BTreeMap<u32, TokenUsage>,
}

impl TokenUsageTable {
    pub fn total_frequency(&self) -> u64 {
        self.entries.values().map(|u| u.frequency).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagnationVerdict {
    pub included: bool,
    pub relative_growth: f64,
    pub cv: f64,
}

fn single_language(records: &[CandidateRecord]) -> Result<&str, DiscoveryError> {
    let first = records
        .first()
        .map(|r| r.language.as_str())
        .ok_or(DiscoveryError::EmptyWindowSeries)?;
    if let Some(other) = records.iter().find(|r| r.language != first) {
        return Err(DiscoveryError::MixedLanguages(
            first.to_string(),
            other.language.clone(),
        ));
    }
    Ok(first)
}

/// Counts unique token ids across every Top-K list of every utterance in
/// each checkpoint window. Windows are visited in checkpoint order; each
/// utterance is scanned once, at the first window that contains it.
pub fn accumulate_discovery(
    records: &[CandidateRecord],
    windows: &Windows,
) -> Result<DiscoveryTrajectory, DiscoveryError> {
    let language = single_language(records)?.to_string();
    if windows.windows.iter().all(|w| w.utt_ids.is_empty()) {
        return Err(DiscoveryError::EmptyWindowSeries);
    }
    let by_id: HashMap<&str, &CandidateRecord> =
        records.iter().map(|r| (r.utt_id.as_str(), r)).collect();

    let mut scanned: HashSet<&str> = HashSet::new();
    let mut first_seen = BTreeMap::new();
    let mut checkpoints = Vec::with_capacity(windows.windows.len());
    let mut counts = Vec::with_capacity(windows.windows.len());
    for w in &windows.windows {
        for id in &w.utt_ids {
            let Some(rec) = by_id.get(id.as_str()) else {
                continue;
            };
            if !scanned.insert(id.as_str()) {
                continue;
            }
            for step in &rec.steps {
                for c in &step.candidates {
                    first_seen.entry(c.token_id).or_insert(w.minutes);
                }
            }
        }
        checkpoints.push(w.minutes);
        counts.push(first_seen.len() as u64);
    }
    Ok(DiscoveryTrajectory {
        language,
        checkpoints,
        counts,
        first_seen,
    })
}

/// Per-id Top-K list incidence within the window at `horizon_minutes`.
pub fn token_frequencies(
    records: &[CandidateRecord],
    horizon_minutes: f64,
    windows: &Windows,
) -> Result<TokenUsageTable, DiscoveryError> {
    let window = windows
        .window_at(horizon_minutes)
        .ok_or(DiscoveryError::HorizonNotOnGrid(horizon_minutes))?;
    let language = single_language(records)?.to_string();

    let mut entries: BTreeMap<u32, TokenUsage> = BTreeMap::new();
    let mut in_step = HashSet::new();
    for rec in records
        .iter()
        .filter(|r| window.utt_ids.contains(&r.utt_id))
    {
        for step in &rec.steps {
            in_step.clear();
            for c in &step.candidates {
                if !in_step.insert(c.token_id) {
                    continue;
                }
                entries
                    .entry(c.token_id)
                    .and_modify(|u| u.frequency += 1)
                    .or_insert_with(|| TokenUsage {
                        frequency: 1,
                        token_text: c.token_text.clone(),
                    });
            }
        }
    }
    Ok(TokenUsageTable {
        language,
        horizon_minutes: window.minutes,
        entries,
    })
}

/// Flags trajectories with too little growth from baseline or too little
/// spread. CV uses the population standard deviation over all checkpoints.
pub fn stagnation_check(
    trajectory: &DiscoveryTrajectory,
) -> Result<StagnationVerdict, DiscoveryError> {
    let counts = &trajectory.counts;
    if counts.len() < 2 {
        return Err(DiscoveryError::TooFewCheckpoints {
            needed: 2,
            got: counts.len(),
        });
    }
    if counts[0] == 0 {
        return Err(DiscoveryError::DegenerateTrajectory);
    }
    let first = counts[0] as f64;
    let last = *counts.last().unwrap() as f64;
    let relative_growth = last / first - 1.0;

    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let cv = var.sqrt() / mean;

    Ok(StagnationVerdict {
        included: relative_growth >= MIN_RELATIVE_GROWTH && cv >= MIN_CV,
        relative_growth,
        cv,
    })
}
