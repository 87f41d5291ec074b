//! Sub-token discovery analysis for multilingual ASR decoder logs.
//!
//! The pipeline reads per-step Top-K candidate logs, builds nested
//! cumulative-audio windows, counts unique sub-token ids per window, fits
//! exponential saturation curves, fits rank-frequency laws, measures
//! segmentation granularity and CER, and runs cross-language statistics.

pub mod discovery;
pub mod granularity;
pub mod logmodel;
pub mod report;
pub mod satfit;
pub mod simulate;
pub mod stats;
pub mod zipf;
