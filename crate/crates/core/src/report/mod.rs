//! Per-language pipeline, cross-language statistics and report output.

mod emit;
pub mod svg;

pub use emit::{
    emit_report, figures, read_summary_csv, report_json, stats_csv, summary_csv, OutputFormat,
};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discovery::{
    accumulate_discovery, stagnation_check, token_frequencies, DiscoveryTrajectory,
};
use crate::granularity::{
    language_cer, parse_reference_tsv, weighted_mean_token_length, GranularityError,
    DEFAULT_CER_THRESHOLD,
};
use crate::logmodel::{
    assign_checkpoints, read_language_meta, validate_record, CandidateRecord, CheckpointGrid,
    LanguageMeta, LogError, LogReader, MetaError, Script, WindowDiagnostic, DEFAULT_K,
};
use crate::satfit::{asymptote_fraction_at, coverage_at, fit_saturation, SaturationFit};
use crate::stats::{ols_regression, pearson_corr, CorrelationResult, Design, RegressionResult};
use crate::zipf::{
    fit_zipf, fit_zipf_mandelbrot, rank_frequencies, select_model_aic, RankFrequency, RankModel,
    ZipfFit, ZipfMandelbrotFit,
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error("reference transcripts: {0}")]
    References(#[from] GranularityError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no languages passed the inclusion filters")]
    NoLanguagesIncluded,
    #[error("nothing to write: summary list is empty")]
    EmptySummaries,
    #[error("failed to write {path}: {message}")]
    IoFailure { path: PathBuf, message: String },
    #[error("failed to read {path}: {message}")]
    ReadFailure { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub grid: CheckpointGrid,
    pub k: usize,
    /// Checkpoint for rank-frequency, granularity and discovery totals.
    pub horizon_minutes: f64,
    /// Checkpoint whose utterances feed the CER filter.
    pub cer_horizon_minutes: f64,
    pub cer_threshold: f64,
    pub exclude_languages: BTreeSet<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            grid: CheckpointGrid::default(),
            k: DEFAULT_K,
            horizon_minutes: 120.0,
            cer_horizon_minutes: 10.0,
            cer_threshold: DEFAULT_CER_THRESHOLD,
            exclude_languages: BTreeSet::new(),
        }
    }
}

impl PipelineConfig {
    fn check(&self) -> Result<(), ReportError> {
        if self.k == 0 {
            return Err(ReportError::Config("k must be positive".into()));
        }
        for (name, h) in [
            ("horizon", self.horizon_minutes),
            ("CER horizon", self.cer_horizon_minutes),
        ] {
            if self.grid.index_of(h).is_none() {
                return Err(ReportError::Config(format!(
                    "{name} {h} min is not a checkpoint of the grid"
                )));
            }
        }
        if self.cer_threshold.is_nan() || self.cer_threshold <= 0.0 {
            return Err(ReportError::Config("CER threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineInput {
    pub records: Vec<CandidateRecord>,
    pub meta: Vec<LanguageMeta>,
    pub references: Option<BTreeMap<String, String>>,
}

/// One row of the per-language report. Column order of the CSV output
/// follows field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageSummary {
    pub language: String,
    pub script: Option<Script>,
    pub train_hours: Option<f64>,
    pub tokens_discovered_at_horizon: Option<u64>,
    pub t90_minutes: Option<f64>,
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    #[serde(rename = "k")]
    pub rate: Option<f64>,
    #[serde(rename = "B")]
    pub offset: Option<f64>,
    pub fit_r_squared: Option<f64>,
    pub zipf_alpha: Option<f64>,
    pub zm_alpha: Option<f64>,
    pub zm_beta: Option<f64>,
    pub chosen_model: Option<RankModel>,
    pub delta_aic: Option<f64>,
    pub mean_token_length: Option<f64>,
    pub cer: Option<f64>,
    pub included_cer: bool,
    pub included_growth: bool,
    /// `1 - exp(-k h)` at the horizon.
    pub coverage_at_horizon: Option<f64>,
    /// Fitted value at the horizon over `A + B`.
    pub asymptote_fraction_at_horizon: Option<f64>,
    pub relative_growth: Option<f64>,
    pub growth_cv: Option<f64>,
}

impl LanguageSummary {
    fn empty(language: &str) -> Self {
        Self {
            language: language.to_string(),
            script: None,
            train_hours: None,
            tokens_discovered_at_horizon: None,
            t90_minutes: None,
            amplitude: None,
            rate: None,
            offset: None,
            fit_r_squared: None,
            zipf_alpha: None,
            zm_alpha: None,
            zm_beta: None,
            chosen_model: None,
            delta_aic: None,
            mean_token_length: None,
            cer: None,
            included_cer: true,
            included_growth: false,
            coverage_at_horizon: None,
            asymptote_fraction_at_horizon: None,
            relative_growth: None,
            growth_cv: None,
        }
    }

    /// Part of the cross-language analyses of discovery, rank laws and
    /// granularity.
    pub fn in_statistics(&self) -> bool {
        self.included_cer && self.train_hours.is_some()
    }

    /// Part of the saturation-time analyses.
    pub fn in_saturation_statistics(&self) -> bool {
        self.in_statistics() && self.included_growth && self.t90_minutes.is_some()
    }
}

/// Intermediate results kept for figures.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageDetail {
    pub language: String,
    pub trajectory: Option<DiscoveryTrajectory>,
    pub fit: Option<SaturationFit>,
    pub rank_frequency: Option<RankFrequency>,
    pub zipf: Option<ZipfFit>,
    pub zm: Option<ZipfMandelbrotFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationAnalysis {
    pub name: String,
    pub subset: String,
    pub result: Option<CorrelationResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionAnalysis {
    pub name: String,
    pub subset: String,
    pub result: Option<RegressionResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n_languages: usize,
    pub n_in_statistics: usize,
    pub n_in_saturation_statistics: usize,
    pub tokens_mean: Option<f64>,
    pub tokens_median: Option<f64>,
    pub tokens_min: Option<f64>,
    pub tokens_max: Option<f64>,
    pub t90_median: Option<f64>,
    pub t90_q1: Option<f64>,
    pub t90_q3: Option<f64>,
    pub coverage_at_horizon_mean: Option<f64>,
    pub asymptote_fraction_at_horizon_mean: Option<f64>,
    pub fit_r_squared_mean: Option<f64>,
    pub fit_r_squared_min: Option<f64>,
    pub zipf_alpha_mean: Option<f64>,
    pub zipf_alpha_sd: Option<f64>,
    pub zm_beta_min: Option<f64>,
    pub zm_beta_max: Option<f64>,
    pub zm_preferred_fraction: Option<f64>,
    pub mean_token_length_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsBlock {
    pub descriptives: Descriptives,
    pub correlations: Vec<CorrelationAnalysis>,
    pub regressions: Vec<RegressionAnalysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub config: PipelineConfig,
    pub summaries: Vec<LanguageSummary>,
    pub stats: StatsBlock,
    pub details: Vec<LanguageDetail>,
    pub warnings: Vec<String>,
}

/// Reads several logs as one stream; utterance ids must be unique across
/// all of them.
pub fn read_logs(paths: &[PathBuf]) -> Result<Vec<CandidateRecord>, ReportError> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    for path in paths {
        let file = std::fs::File::open(path).map_err(|e| ReportError::ReadFailure {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let reader =
            LogReader::new(std::io::BufReader::new(file)).with_seen_ids(seen.iter().cloned());
        for rec in reader {
            let rec = rec?;
            seen.insert(rec.utt_id.clone());
            out.push(rec);
        }
    }
    Ok(out)
}

/// Loads logs, optional metadata and optional reference transcripts.
pub fn load_input(
    log_paths: &[PathBuf],
    meta_path: Option<&Path>,
    transcript_path: Option<&Path>,
) -> Result<PipelineInput, ReportError> {
    let records = read_logs(log_paths)?;
    let meta = match meta_path {
        Some(p) => read_language_meta(p)?,
        None => Vec::new(),
    };
    let references = match transcript_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ReportError::ReadFailure {
                path: p.to_path_buf(),
                message: e.to_string(),
            })?;
            Some(parse_reference_tsv(&text)?)
        }
        None => None,
    };
    Ok(PipelineInput {
        records,
        meta,
        references,
    })
}

pub fn run_pipeline_files(
    log_paths: &[PathBuf],
    meta_path: Option<&Path>,
    transcript_path: Option<&Path>,
    config: &PipelineConfig,
) -> Result<PipelineOutput, ReportError> {
    run_pipeline(load_input(log_paths, meta_path, transcript_path)?, config)
}

fn group_by_language(
    records: Vec<CandidateRecord>,
    exclude: &BTreeSet<String>,
) -> BTreeMap<String, Vec<CandidateRecord>> {
    let mut groups: BTreeMap<String, Vec<CandidateRecord>> = BTreeMap::new();
    for r in records {
        if exclude.contains(&r.language) {
            continue;
        }
        groups.entry(r.language.clone()).or_default().push(r);
    }
    groups
}

/// Per-language summaries, plot details and warnings.
pub type LanguageResults = (Vec<LanguageSummary>, Vec<LanguageDetail>, Vec<String>);

/// Per-language results without the cross-language step. Languages are
/// processed independently and returned in code order.
pub fn summarize_languages(
    input: PipelineInput,
    config: &PipelineConfig,
) -> Result<LanguageResults, ReportError> {
    config.check()?;
    let meta: BTreeMap<String, LanguageMeta> = input
        .meta
        .into_iter()
        .map(|m| (m.language.clone(), m))
        .collect();
    let groups = group_by_language(input.records, &config.exclude_languages);
    let refs = input.references.as_ref();

    let per_language: Vec<(LanguageSummary, LanguageDetail, Vec<String>)> = groups
        .par_iter()
        .map(|(lang, records)| analyze_language(lang, records, meta.get(lang), refs, config))
        .collect();

    let mut summaries = Vec::with_capacity(per_language.len());
    let mut details = Vec::with_capacity(per_language.len());
    let mut warnings = Vec::new();
    for (s, d, w) in per_language {
        summaries.push(s);
        details.push(d);
        warnings.extend(w);
    }
    Ok((summaries, details, warnings))
}

/// Runs every per-language stage, then the cross-language statistics.
pub fn run_pipeline(
    input: PipelineInput,
    config: &PipelineConfig,
) -> Result<PipelineOutput, ReportError> {
    let (summaries, details, warnings) = summarize_languages(input, config)?;
    if !summaries.iter().any(LanguageSummary::in_statistics) {
        return Err(ReportError::NoLanguagesIncluded);
    }
    let stats = cross_language_stats(&summaries);
    Ok(PipelineOutput {
        config: config.clone(),
        summaries,
        stats,
        details,
        warnings,
    })
}

fn analyze_language(
    lang: &str,
    records: &[CandidateRecord],
    meta: Option<&LanguageMeta>,
    refs: Option<&BTreeMap<String, String>>,
    config: &PipelineConfig,
) -> (LanguageSummary, LanguageDetail, Vec<String>) {
    let mut warnings = Vec::new();
    let mut summary = LanguageSummary::empty(lang);
    let mut detail = LanguageDetail {
        language: lang.to_string(),
        trajectory: None,
        fit: None,
        rank_frequency: None,
        zipf: None,
        zm: None,
    };
    match meta {
        Some(m) => {
            summary.script = Some(m.script);
            summary.train_hours = Some(m.train_hours);
        }
        None => warnings.push(format!("{lang}: no metadata; excluded from statistics")),
    }

    let bad = records
        .iter()
        .filter(|r| !validate_record(r, config.k).is_empty())
        .count();
    if bad > 0 {
        warnings.push(format!(
            "{lang}: {bad} record(s) violate the Top-{} contract",
            config.k
        ));
    }

    let windows = match assign_checkpoints(records, &config.grid) {
        Ok(w) => w,
        Err(e) => {
            warnings.push(format!("{lang}: {e}"));
            return (summary, detail, warnings);
        }
    };
    for d in &windows.diagnostics {
        let WindowDiagnostic::InsufficientAudio {
            total_minutes,
            max_minutes,
        } = d;
        warnings.push(format!(
            "{lang}: only {total_minutes:.1} of {max_minutes} minutes of audio"
        ));
    }

    if let Some(refs) = refs {
        if let Some(window) = windows.window_at(config.cer_horizon_minutes) {
            let hyps: Vec<(String, &str)> = records
                .iter()
                .filter(|r| window.utt_ids.contains(&r.utt_id))
                .filter_map(|r| refs.get(&r.utt_id).map(|t| (r.top1_text(), t.as_str())))
                .collect();
            if hyps.is_empty() {
                warnings.push(format!(
                    "{lang}: no reference transcripts in the CER window"
                ));
            } else {
                match language_cer(
                    lang,
                    hyps.iter().map(|(h, r)| (*r, h.as_str())),
                    config.cer_threshold,
                ) {
                    Ok(c) => {
                        summary.cer = Some(c.cer);
                        summary.included_cer = c.included;
                    }
                    Err(e) => warnings.push(format!("{lang}: CER: {e}")),
                }
            }
        }
    }

    let trajectory = match accumulate_discovery(records, &windows) {
        Ok(t) => t,
        Err(e) => {
            warnings.push(format!("{lang}: {e}"));
            return (summary, detail, warnings);
        }
    };
    summary.tokens_discovered_at_horizon = trajectory.count_at(config.horizon_minutes);
    match stagnation_check(&trajectory) {
        Ok(v) => {
            summary.included_growth = v.included;
            summary.relative_growth = Some(v.relative_growth);
            summary.growth_cv = Some(v.cv);
            if !v.included {
                warnings.push(format!("{lang}: stagnant discovery growth"));
            }
        }
        Err(e) => warnings.push(format!("{lang}: {e}")),
    }
    match fit_saturation(&trajectory) {
        Ok(fit) => {
            summary.t90_minutes = Some(fit.t90_minutes);
            summary.amplitude = Some(fit.amplitude);
            summary.rate = Some(fit.rate);
            summary.offset = Some(fit.offset);
            summary.fit_r_squared = Some(fit.r_squared);
            summary.coverage_at_horizon = Some(coverage_at(&fit, config.horizon_minutes));
            summary.asymptote_fraction_at_horizon =
                Some(asymptote_fraction_at(&fit, config.horizon_minutes));
            detail.fit = Some(fit);
        }
        Err(e) => warnings.push(format!("{lang}: saturation fit: {e}")),
    }
    detail.trajectory = Some(trajectory);

    let usage = match token_frequencies(records, config.horizon_minutes, &windows) {
        Ok(u) if !u.is_empty() => u,
        Ok(_) => {
            warnings.push(format!("{lang}: no tokens within the horizon"));
            return (summary, detail, warnings);
        }
        Err(e) => {
            warnings.push(format!("{lang}: {e}"));
            return (summary, detail, warnings);
        }
    };
    match weighted_mean_token_length(&usage) {
        Ok(g) => summary.mean_token_length = Some(g.mean_length),
        Err(e) => warnings.push(format!("{lang}: granularity: {e}")),
    }
    if let Ok(rf) = rank_frequencies(&usage) {
        let zipf = fit_zipf(&rf);
        let zm = fit_zipf_mandelbrot(&rf);
        if let Ok(z) = &zipf {
            summary.zipf_alpha = Some(z.alpha);
        }
        if let Ok(m) = &zm {
            summary.zm_alpha = Some(m.alpha);
            summary.zm_beta = Some(m.beta);
        }
        match (&zipf, &zm) {
            (Ok(z), Ok(m)) => {
                if let Ok(choice) = select_model_aic(z, m) {
                    summary.chosen_model = Some(choice.model);
                    summary.delta_aic = Some(choice.delta_aic);
                }
            }
            _ => warnings.push(format!("{lang}: too few ranks for rank-frequency fits")),
        }
        detail.zipf = zipf.ok();
        detail.zm = zm.ok();
        detail.rank_frequency = Some(rf);
    }
    (summary, detail, warnings)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn sample_sd(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    (v.len() > 1)
        .then(|| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

/// Linear-interpolation quantile on sorted data.
fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn correlate(
    name: &str,
    subset: &str,
    rows: &[&LanguageSummary],
    x: impl Fn(&LanguageSummary) -> Option<f64>,
    y: impl Fn(&LanguageSummary) -> Option<f64>,
) -> CorrelationAnalysis {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|s| Some((x(s)?, y(s)?))).unzip();
    let (result, note) = match pearson_corr(&xs, &ys) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CorrelationAnalysis {
        name: name.to_string(),
        subset: subset.to_string(),
        result,
        note,
    }
}

fn log_hours(s: &LanguageSummary) -> Option<f64> {
    s.train_hours.map(f64::log10)
}

fn regress(
    name: &str,
    subset: &str,
    rows: &[&LanguageSummary],
    response: impl Fn(&LanguageSummary) -> Option<f64>,
    with_hours: bool,
    with_script: bool,
) -> RegressionAnalysis {
    let rows: Vec<&&LanguageSummary> = rows
        .iter()
        .filter(|s| response(s).is_some() && s.script.is_some() && s.train_hours.is_some())
        .collect();
    let y: Vec<f64> = rows.iter().filter_map(|s| response(s)).collect();
    let mut design = Design::with_intercept(rows.len());
    let built = (|| {
        if with_hours {
            design.add_column(
                "log10_train_hours",
                rows.iter().filter_map(|s| log_hours(s)).collect(),
            )?;
        }
        if with_script {
            let scripts: Vec<Script> = rows.iter().filter_map(|s| s.script).collect();
            design.add_dummies("script", &scripts, &Script::Latin)?;
        }
        ols_regression(&design, &y)
    })();
    let (result, note) = match built {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    RegressionAnalysis {
        name: name.to_string(),
        subset: subset.to_string(),
        result,
        note,
    }
}

/// Cross-language analyses. Rows failing the CER filter or lacking
/// metadata are left out entirely; rows failing the growth filter are left
/// out of the saturation-time analyses only.
pub fn cross_language_stats(summaries: &[LanguageSummary]) -> StatsBlock {
    let all: Vec<&LanguageSummary> = summaries.iter().filter(|s| s.in_statistics()).collect();
    let latin: Vec<&LanguageSummary> = all
        .iter()
        .copied()
        .filter(|s| s.script == Some(Script::Latin))
        .collect();
    let sat: Vec<&LanguageSummary> = all
        .iter()
        .copied()
        .filter(|s| s.in_saturation_statistics())
        .collect();
    let sat_latin: Vec<&LanguageSummary> = sat
        .iter()
        .copied()
        .filter(|s| s.script == Some(Script::Latin))
        .collect();

    let tokens = |s: &LanguageSummary| s.tokens_discovered_at_horizon.map(|v| v as f64);
    let t90 = |s: &LanguageSummary| s.t90_minutes;
    let alpha = |s: &LanguageSummary| s.zipf_alpha;
    let length = |s: &LanguageSummary| s.mean_token_length;

    let correlations = vec![
        correlate("tokens_vs_log10_hours", "all", &all, log_hours, tokens),
        correlate("tokens_vs_log10_hours", "latin", &latin, log_hours, tokens),
        correlate("t90_vs_log10_hours", "all", &sat, log_hours, t90),
        correlate("t90_vs_log10_hours", "latin", &sat_latin, log_hours, t90),
        correlate("zipf_alpha_vs_log10_hours", "all", &all, log_hours, alpha),
        correlate(
            "zipf_alpha_vs_log10_hours",
            "latin",
            &latin,
            log_hours,
            alpha,
        ),
        correlate("mean_length_vs_log10_hours", "all", &all, log_hours, length),
        correlate(
            "mean_length_vs_log10_hours",
            "latin",
            &latin,
            log_hours,
            length,
        ),
    ];
    let regressions = vec![
        regress("tokens_by_script", "all", &all, tokens, false, true),
        regress(
            "t90_by_log10_hours_and_script",
            "all",
            &sat,
            t90,
            true,
            true,
        ),
        regress(
            "mean_length_by_log10_hours",
            "latin",
            &latin,
            length,
            true,
            false,
        ),
    ];

    let collect = |rows: &[&LanguageSummary], f: &dyn Fn(&LanguageSummary) -> Option<f64>| {
        rows.iter().filter_map(|s| f(s)).collect::<Vec<f64>>()
    };
    let tok = sorted(collect(&all, &tokens));
    let t90s = sorted(collect(&sat, &t90));
    let r2 = collect(&sat, &|s| s.fit_r_squared);
    let alphas = collect(&all, &alpha);
    let betas = sorted(collect(&all, &|s| s.zm_beta));
    let chosen: Vec<bool> = all
        .iter()
        .filter_map(|s| s.chosen_model)
        .map(|m| m == RankModel::ZipfMandelbrot)
        .collect();

    let descriptives = Descriptives {
        n_languages: summaries.len(),
        n_in_statistics: all.len(),
        n_in_saturation_statistics: sat.len(),
        tokens_mean: mean(&tok),
        tokens_median: quantile(&tok, 0.5),
        tokens_min: tok.first().copied(),
        tokens_max: tok.last().copied(),
        t90_median: quantile(&t90s, 0.5),
        t90_q1: quantile(&t90s, 0.25),
        t90_q3: quantile(&t90s, 0.75),
        coverage_at_horizon_mean: mean(&collect(&sat, &|s| s.coverage_at_horizon)),
        asymptote_fraction_at_horizon_mean: mean(&collect(&sat, &|s| {
            s.asymptote_fraction_at_horizon
        })),
        fit_r_squared_mean: mean(&r2),
        fit_r_squared_min: r2.iter().copied().reduce(f64::min),
        zipf_alpha_mean: mean(&alphas),
        zipf_alpha_sd: sample_sd(&alphas),
        zm_beta_min: betas.first().copied(),
        zm_beta_max: betas.last().copied(),
        zm_preferred_fraction: (!chosen.is_empty())
            .then(|| chosen.iter().filter(|&&c| c).count() as f64 / chosen.len() as f64),
        mean_token_length_mean: mean(&collect(&all, &length)),
    };

    StatsBlock {
        descriptives,
        correlations,
        regressions,
    }
}
