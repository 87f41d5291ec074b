//! Seeded synthetic data with known ground truth.
//!
//! All randomness comes from SplitMix64 (64-bit state). Each utterance gets
//! its own stream derived from `(seed, utterance index)`, so any prefix of a
//! generated log is independent of how long the log is.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::discovery::{DiscoveryTrajectory, TokenUsage, TokenUsageTable};
use crate::logmodel::{CandidateEntry, CandidateRecord, CheckpointGrid, DecodingStep};
use crate::satfit::eval_saturation;

const STREAM_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub language: String,
    /// Saturation amplitude `A`.
    pub amplitude: f64,
    /// Saturation rate `k` per minute.
    pub rate: f64,
    /// Saturation offset `B`.
    pub offset: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub vocab_size: u32,
    pub utterance_seconds: f64,
    pub steps_per_utterance: usize,
    pub k: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            language: "syn".into(),
            amplitude: 20000.0,
            rate: 0.02,
            offset: 500.0,
            alpha: 1.1,
            beta: 5.0,
            c: 1000.0,
            vocab_size: 4000,
            utterance_seconds: 6.0,
            steps_per_utterance: 12,
            k: 50,
        }
    }
}

/// Independent generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SplitMix64 {
    let mut base = SplitMix64::seed_from_u64(seed);
    let mixed = base.random::<u64>() ^ stream.wrapping_add(1).wrapping_mul(STREAM_MIX);
    SplitMix64::seed_from_u64(mixed)
}

/// Model counts on the grid plus seeded Gaussian noise, rounded, floored at
/// zero and clamped to be non-decreasing.
pub fn synth_trajectory(
    spec: &SynthSpec,
    grid: &CheckpointGrid,
    noise_sigma: f64,
) -> DiscoveryTrajectory {
    let mut rng = stream_rng(spec.seed, u64::MAX);
    let noise = (noise_sigma > 0.0).then(|| Normal::new(0.0, noise_sigma).expect("finite sigma"));
    let checkpoints = grid.checkpoints();
    let mut counts = Vec::with_capacity(checkpoints.len());
    let mut floor = 0u64;
    for &t in &checkpoints {
        let eps = noise.as_ref().map_or(0.0, |n| n.sample(&mut rng));
        let v = (eval_saturation(spec.amplitude, spec.rate, spec.offset, t) + eps)
            .round()
            .max(0.0) as u64;
        floor = floor.max(v);
        counts.push(floor);
    }
    DiscoveryTrajectory {
        language: spec.language.clone(),
        checkpoints,
        counts,
        first_seen: BTreeMap::new(),
    }
}

/// Unnormalized rank weights `(r + beta)^-alpha` for ranks `1..=vocab`.
fn rank_weights(spec: &SynthSpec) -> Vec<f64> {
    (1..=spec.vocab_size)
        .map(|r| (r as f64 + spec.beta).powf(-spec.alpha))
        .collect()
}

/// Deterministic token string for a synthetic id: one to three letters,
/// every third id carrying a leading space marker.
pub fn synthetic_token_text(id: u32) -> String {
    let mut s = String::new();
    if id.is_multiple_of(3) {
        s.push(' ');
    }
    let mut n = id as usize % (26 + 26 * 26 + 26 * 26 * 26);
    let mut letters = Vec::new();
    loop {
        letters.push((b'a' + (n % 26) as u8) as char);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    s.extend(letters.iter().rev());
    s
}

/// Tallies `n_draws` i.i.d. inverse-CDF draws from the rank law. Token id
/// is `rank - 1`.
pub fn synth_rank_sample(spec: &SynthSpec, n_draws: u64) -> TokenUsageTable {
    let weights = rank_weights(spec);
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = stream_rng(spec.seed, u64::MAX - 1);
    let mut tally = vec![0u64; weights.len()];
    for _ in 0..n_draws {
        let u = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        tally[idx] += 1;
    }
    TokenUsageTable {
        language: spec.language.clone(),
        horizon_minutes: 0.0,
        entries: tally
            .into_iter()
            .enumerate()
            .filter(|&(_, f)| f > 0)
            .map(|(i, f)| {
                (
                    i as u32,
                    TokenUsage {
                        frequency: f,
                        token_text: synthetic_token_text(i as u32),
                    },
                )
            })
            .collect(),
    }
}

/// A generated log plus the generator's own bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthLog {
    pub records: Vec<CandidateRecord>,
    /// Index of the utterance in which each id first appears.
    pub first_exposure: BTreeMap<u32, usize>,
    /// Number of Top-K lists each id appears in, over the whole log.
    pub draw_counts: BTreeMap<u32, u64>,
    /// Cumulative end time in seconds of each utterance.
    pub utterance_end_s: Vec<f64>,
}

impl SynthLog {
    /// Ground-truth unique-id count for the audio prefix ending at
    /// `minutes`.
    pub fn expected_count(&self, minutes: f64) -> usize {
        let budget = minutes * 60.0;
        let n_utts = self
            .utterance_end_s
            .iter()
            .take_while(|&&e| e <= budget * (1.0 + 1e-12))
            .count();
        self.first_exposure
            .values()
            .filter(|&&u| u < n_utts)
            .count()
    }
}

/// Utterances of `utterance_seconds` each, enough to cover `total_minutes`.
/// Every step's Top-K is a weighted sample without replacement from the
/// rank law (exponential-key method), listed by descending weight with
/// log-probabilities renormalized over the K chosen ids.
pub fn synth_candidate_log(spec: &SynthSpec, total_minutes: f64) -> SynthLog {
    let weights = rank_weights(spec);
    let k = spec.k.min(weights.len());
    let n_utts = ((total_minutes * 60.0) / spec.utterance_seconds - 1e-9)
        .ceil()
        .max(1.0) as usize;

    let mut records = Vec::with_capacity(n_utts);
    let mut first_exposure = BTreeMap::new();
    let mut draw_counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut utterance_end_s = Vec::with_capacity(n_utts);
    let mut keys: Vec<(f64, u32)> = Vec::with_capacity(weights.len());

    for u in 0..n_utts {
        let mut rng = stream_rng(spec.seed, u as u64);
        let mut steps = Vec::with_capacity(spec.steps_per_utterance);
        for _ in 0..spec.steps_per_utterance {
            keys.clear();
            keys.extend(weights.iter().enumerate().map(|(id, &w)| {
                let v = 1.0 - rng.random::<f64>();
                (v.ln() / w, id as u32)
            }));
            if k < keys.len() {
                keys.select_nth_unstable_by(k, |a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            }
            let mut chosen: Vec<u32> = keys[..k].iter().map(|&(_, id)| id).collect();
            chosen.sort_unstable();
            let mass: f64 = chosen.iter().map(|&id| weights[id as usize]).sum();
            let candidates = chosen
                .iter()
                .map(|&id| {
                    *draw_counts.entry(id).or_default() += 1;
                    first_exposure.entry(id).or_insert(u);
                    CandidateEntry {
                        token_id: id,
                        token_text: synthetic_token_text(id),
                        logprob: (weights[id as usize] / mass).ln().min(0.0),
                    }
                })
                .collect();
            steps.push(DecodingStep { candidates });
        }
        records.push(CandidateRecord {
            utt_id: format!("{}-{:06}", spec.language, u),
            language: spec.language.clone(),
            duration_s: spec.utterance_seconds,
            steps,
        });
        utterance_end_s.push((u + 1) as f64 * spec.utterance_seconds);
    }

    SynthLog {
        records,
        first_exposure,
        draw_counts,
        utterance_end_s,
    }
}
