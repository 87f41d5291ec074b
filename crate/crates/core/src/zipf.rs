//! Rank-frequency distributions with plain Zipf and Zipf-Mandelbrot fits.
//!
//! Both laws are fitted by least squares on `ln f` against `ln r` (or
//! `ln(r + beta)`), over every rank. Model choice uses the Gaussian AIC
//! `n ln(RSS/n) + 2p` on those log-space residuals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discovery::TokenUsageTable;

/// Upper end of the `beta` search interval.
pub const BETA_MAX: f64 = 1000.0;
/// Width at which the golden-section search on `beta` stops.
pub const BETA_TOLERANCE: f64 = 1e-6;
/// Residual sums below this (per point) are rounding noise and are clamped,
/// so exact data yields a finite AIC.
const RSS_FLOOR_PER_POINT: f64 = 1e-20;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Error, PartialEq)]
pub enum ZipfError {
    #[error("usage table is empty")]
    EmptyTable,
    #[error("need at least {needed} ranks, got {got}")]
    DegenerateRanks { needed: usize, got: usize },
    #[error("fits cover different points ({0} vs {1})")]
    MismatchedPoints(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFrequency {
    pub ranks: Vec<u32>,
    pub freqs: Vec<u64>,
    pub token_ids: Vec<u32>,
}

impl RankFrequency {
    /// Builds a distribution from already-sorted frequencies; ids are the
    /// zero-based rank positions.
    pub fn from_sorted(freqs: Vec<u64>) -> Self {
        let n = freqs.len() as u32;
        Self {
            ranks: (1..=n).collect(),
            token_ids: (0..n).collect(),
            freqs,
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn points(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.ranks.iter().map(|&r| r as f64).collect(),
            self.freqs.iter().map(|&f| f as f64).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    pub c: f64,
    pub alpha: f64,
    pub rss_log: f64,
    pub aic: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfMandelbrotFit {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rss_log: f64,
    pub aic: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankModel {
    Zipf,
    ZipfMandelbrot,
}

impl RankModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RankModel::Zipf => "zipf",
            RankModel::ZipfMandelbrot => "zipf-mandelbrot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelChoice {
    pub model: RankModel,
    pub delta_aic: f64,
}

pub fn aic(n_points: usize, rss_log: f64, n_params: usize) -> f64 {
    let n = n_points as f64;
    n * (rss_log / n).ln() + 2.0 * n_params as f64
}

/// Sorts by frequency descending, ties by ascending token id.
pub fn rank_frequencies(usage: &TokenUsageTable) -> Result<RankFrequency, ZipfError> {
    if usage.entries.is_empty() {
        return Err(ZipfError::EmptyTable);
    }
    let mut rows: Vec<(u32, u64)> = usage
        .entries
        .iter()
        .map(|(&id, u)| (id, u.frequency))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(RankFrequency {
        ranks: (1..=rows.len() as u32).collect(),
        token_ids: rows.iter().map(|r| r.0).collect(),
        freqs: rows.iter().map(|r| r.1).collect(),
    })
}

fn log_freqs(freqs: &[f64]) -> Vec<f64> {
    freqs.iter().map(|f| f.ln()).collect()
}

struct Line {
    intercept: f64,
    slope: f64,
    rss: f64,
}

fn ols_line(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    Line {
        intercept,
        slope,
        rss,
    }
}

fn shifted_line(ranks: &[f64], logf: &[f64], beta: f64) -> Line {
    let x: Vec<f64> = ranks.iter().map(|&r| (r + beta).ln()).collect();
    ols_line(&x, logf)
}

fn floor_rss(rss: f64, n: usize) -> f64 {
    rss.max(RSS_FLOOR_PER_POINT * n as f64)
}

pub fn fit_zipf(rf: &RankFrequency) -> Result<ZipfFit, ZipfError> {
    let (ranks, freqs) = rf.points();
    fit_zipf_values(&ranks, &freqs)
}

/// Plain Zipf fit on real-valued `(rank, frequency)` points.
pub fn fit_zipf_values(ranks: &[f64], freqs: &[f64]) -> Result<ZipfFit, ZipfError> {
    let n = ranks.len().min(freqs.len());
    if n < 3 {
        return Err(ZipfError::DegenerateRanks { needed: 3, got: n });
    }
    let logf = log_freqs(&freqs[..n]);
    let line = shifted_line(&ranks[..n], &logf, 0.0);
    let rss_log = floor_rss(line.rss, n);
    Ok(ZipfFit {
        c: line.intercept.exp(),
        alpha: -line.slope,
        rss_log,
        aic: aic(n, rss_log, 2),
        n_points: n,
    })
}

/// Golden-section search for `argmin rss(beta)` on `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Fits `ln f = ln C - alpha ln(r + beta)`. The inner `(ln C, alpha)` problem
/// is closed-form OLS; `beta` is found by a coarse log-spaced scan of
/// `[0, BETA_MAX]` to bracket the minimum, then golden-section refinement.
/// `beta = 0` is always a candidate, so the result never fits worse than
/// plain Zipf.
pub fn fit_zipf_mandelbrot(rf: &RankFrequency) -> Result<ZipfMandelbrotFit, ZipfError> {
    let (ranks, freqs) = rf.points();
    fit_zipf_mandelbrot_values(&ranks, &freqs)
}

/// Zipf-Mandelbrot fit on real-valued `(rank, frequency)` points.
pub fn fit_zipf_mandelbrot_values(
    ranks: &[f64],
    freqs: &[f64],
) -> Result<ZipfMandelbrotFit, ZipfError> {
    let n = ranks.len().min(freqs.len());
    if n < 4 {
        return Err(ZipfError::DegenerateRanks { needed: 4, got: n });
    }
    let ranks = &ranks[..n];
    let logf = log_freqs(&freqs[..n]);
    let rss_at = |beta: f64| shifted_line(ranks, &logf, beta).rss;

    const SCAN: usize = 160;
    let mut grid = Vec::with_capacity(SCAN + 2);
    grid.push(0.0);
    for i in 0..=SCAN {
        grid.push(1e-4 * (BETA_MAX / 1e-4).powf(i as f64 / SCAN as f64));
    }
    let scanned: Vec<f64> = grid.iter().map(|&b| rss_at(b)).collect();
    let best = scanned
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (mut beta, mut rss) = golden_section(rss_at, lo, hi, BETA_TOLERANCE);
    if scanned[best] < rss {
        beta = grid[best];
        rss = scanned[best];
    }

    let rss_zero = floor_rss(scanned[0], n);
    if floor_rss(rss, n) >= rss_zero {
        beta = 0.0;
    }
    let line = shifted_line(ranks, &logf, beta);
    let rss_log = floor_rss(line.rss, n).min(rss_zero);
    Ok(ZipfMandelbrotFit {
        c: line.intercept.exp(),
        alpha: -line.slope,
        beta,
        rss_log,
        aic: aic(n, rss_log, 3),
        n_points: n,
    })
}

/// Picks the lower-AIC model; ties go to plain Zipf.
pub fn select_model_aic(zipf: &ZipfFit, zm: &ZipfMandelbrotFit) -> Result<ModelChoice, ZipfError> {
    if zipf.n_points != zm.n_points {
        return Err(ZipfError::MismatchedPoints(zipf.n_points, zm.n_points));
    }
    Ok(if zm.aic < zipf.aic {
        ModelChoice {
            model: RankModel::ZipfMandelbrot,
            delta_aic: zipf.aic - zm.aic,
        }
    } else {
        ModelChoice {
            model: RankModel::Zipf,
            delta_aic: zm.aic - zipf.aic,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::TokenUsage;
    use approx::assert_relative_eq;

    /// Exact real-valued frequencies bypass integer rounding.
    fn exact(f: impl Fn(f64) -> f64, n: u32) -> (Vec<f64>, Vec<f64>) {
        let r: Vec<f64> = (1..=n).map(|r| r as f64).collect();
        let y = r.iter().map(|&r| f(r).ln()).collect();
        (r, y)
    }

    fn fit_exact_zm(r: &[f64], y: &[f64]) -> (f64, f64, f64) {
        let rss = |b: f64| shifted_line(r, y, b).rss;
        let (b, _) = golden_section(rss, 0.0, BETA_MAX, BETA_TOLERANCE);
        let l = shifted_line(r, y, b);
        (l.intercept.exp(), -l.slope, b)
    }

    #[test]
    fn tie_break_by_id() {
        let mut entries = std::collections::BTreeMap::new();
        for (id, f) in [(5u32, 10u64), (2, 10), (9, 3)] {
            entries.insert(
                id,
                TokenUsage {
                    frequency: f,
                    token_text: String::new(),
                },
            );
        }
        let usage = TokenUsageTable {
            language: "xx".into(),
            horizon_minutes: 120.0,
            entries,
        };
        let rf = rank_frequencies(&usage).unwrap();
        assert_eq!(rf.ranks, [1, 2, 3]);
        assert_eq!(rf.token_ids, [2, 5, 9]);
        assert_eq!(rf.freqs, [10, 10, 3]);
    }

    #[test]
    fn empty_table() {
        let usage = TokenUsageTable {
            language: "xx".into(),
            horizon_minutes: 120.0,
            entries: Default::default(),
        };
        assert_eq!(rank_frequencies(&usage), Err(ZipfError::EmptyTable));
    }

    #[test]
    fn exact_power_law() {
        let (r, y) = exact(|r| 100.0 / r, 100);
        let l = shifted_line(&r, &y, 0.0);
        assert!((-l.slope - 1.0).abs() < 1e-9);
        assert!((l.intercept.exp() - 100.0).abs() < 1e-6);
        assert!(l.rss < 1e-20);
    }

    #[test]
    fn constant_frequencies_give_zero_slope() {
        let fit = fit_zipf(&RankFrequency::from_sorted(vec![7; 20])).unwrap();
        assert!(fit.alpha.abs() < 1e-9);
        assert_relative_eq!(fit.c, 7.0, max_relative = 1e-12);
    }

    #[test]
    fn zm_golden_recovers_exact() {
        let (r, y) = exact(|r| 1000.0 * (r + 10.0).powf(-1.7), 500);
        let (c, a, b) = fit_exact_zm(&r, &y);
        assert_relative_eq!(c, 1000.0, max_relative = 1e-3);
        assert_relative_eq!(a, 1.7, max_relative = 1e-3);
        assert_relative_eq!(b, 10.0, max_relative = 1e-3);
    }

    #[test]
    fn degenerate_ranks() {
        let rf = RankFrequency::from_sorted(vec![5, 3]);
        assert_eq!(
            fit_zipf(&rf),
            Err(ZipfError::DegenerateRanks { needed: 3, got: 2 })
        );
        let rf = RankFrequency::from_sorted(vec![5, 3, 1]);
        assert!(fit_zipf(&rf).is_ok());
        assert_eq!(
            fit_zipf_mandelbrot(&rf),
            Err(ZipfError::DegenerateRanks { needed: 4, got: 3 })
        );
    }

    #[test]
    fn aic_penalty_arithmetic() {
        let z = ZipfFit {
            c: 1.0,
            alpha: 1.0,
            rss_log: 10.0,
            aic: aic(10, 10.0, 2),
            n_points: 10,
        };
        let zm = ZipfMandelbrotFit {
            c: 1.0,
            alpha: 1.0,
            beta: 0.0,
            rss_log: 10.0,
            aic: aic(10, 10.0, 3),
            n_points: 10,
        };
        assert_eq!(z.aic, 4.0);
        assert_eq!(zm.aic, 6.0);
        let choice = select_model_aic(&z, &zm).unwrap();
        assert_eq!(choice.model, RankModel::Zipf);
        assert_eq!(choice.delta_aic, 2.0);

        let other = ZipfMandelbrotFit { n_points: 11, ..zm };
        assert_eq!(
            select_model_aic(&z, &other),
            Err(ZipfError::MismatchedPoints(10, 11))
        );
    }

    #[test]
    fn zm_reduces_to_zipf_on_plain_data() {
        let freqs: Vec<u64> = (1..=300u64).map(|r| 3_000_000 / (r * r)).collect();
        let rf = RankFrequency::from_sorted(freqs);
        let z = fit_zipf(&rf).unwrap();
        let zm = fit_zipf_mandelbrot(&rf).unwrap();
        assert!(zm.rss_log <= z.rss_log);
    }
}
