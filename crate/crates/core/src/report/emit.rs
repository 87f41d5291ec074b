//! Writing a finished pipeline run as CSV tables, a JSON document or SVG
//! figures.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};

use super::svg::{Axis, Chart, Scale, PALETTE};
use super::{LanguageSummary, PipelineOutput, ReportError};
use crate::logmodel::Script;
use crate::satfit::eval_saturation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(format!("unknown format `{other}` (csv, json, svg)")),
        }
    }
}

fn write_file(path: PathBuf, contents: &[u8]) -> Result<PathBuf, ReportError> {
    fs::write(&path, contents).map_err(|e| ReportError::IoFailure {
        path: path.clone(),
        message: e.to_string(),
    })?;
    Ok(path)
}

fn csv_failure(path: &Path, e: impl ToString) -> ReportError {
    ReportError::IoFailure {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes the report into `out_dir` (created if needed) and returns the
/// paths written. Output is a pure function of `output`.
pub fn emit_report(
    output: &PipelineOutput,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    if output.summaries.is_empty() {
        return Err(ReportError::EmptySummaries);
    }
    fs::create_dir_all(out_dir).map_err(|e| csv_failure(out_dir, e))?;
    match format {
        OutputFormat::Csv => Ok(vec![
            write_file(
                out_dir.join("summary.csv"),
                &summary_csv(&output.summaries)?,
            )?,
            write_file(out_dir.join("trajectories.csv"), &trajectories_csv(output)?)?,
            write_file(out_dir.join("stats.csv"), &stats_csv(output)?)?,
        ]),
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&report_json(output))
                .map_err(|e| csv_failure(&out_dir.join("report.json"), e))?;
            Ok(vec![write_file(
                out_dir.join("report.json"),
                (text + "\n").as_bytes(),
            )?])
        }
        OutputFormat::Svg => figures(output)
            .into_iter()
            .map(|(name, svg)| write_file(out_dir.join(name), svg.as_bytes()))
            .collect(),
    }
}

pub fn summary_csv(rows: &[LanguageSummary]) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| csv_failure(Path::new("summary.csv"), e))?;
    }
    w.into_inner()
        .map_err(|e| csv_failure(Path::new("summary.csv"), e))
}

/// Parses a `summary.csv` written by [`emit_report`].
pub fn read_summary_csv(path: &Path) -> Result<Vec<LanguageSummary>, ReportError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| ReportError::ReadFailure {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| ReportError::ReadFailure {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

fn trajectories_csv(output: &PipelineOutput) -> Result<Vec<u8>, ReportError> {
    let path = Path::new("trajectories.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["language", "minutes", "tokens_discovered", "fitted"])
        .map_err(|e| csv_failure(path, e))?;
    for d in &output.details {
        let Some(t) = &d.trajectory else { continue };
        for (m, c) in t.checkpoints.iter().zip(&t.counts) {
            let fitted = d
                .fit
                .as_ref()
                .map(|f| f.eval(*m).to_string())
                .unwrap_or_default();
            w.write_record([d.language.clone(), m.to_string(), c.to_string(), fitted])
                .map_err(|e| csv_failure(path, e))?;
        }
    }
    w.into_inner().map_err(|e| csv_failure(path, e))
}

pub fn stats_csv(output: &PipelineOutput) -> Result<Vec<u8>, ReportError> {
    let path = Path::new("stats.csv");
    let mut rows: Vec<[String; 5]> = Vec::new();
    let mut push = |a: &str, s: &str, t: &str, k: &str, v: String| {
        rows.push([a.into(), s.into(), t.into(), k.into(), v]);
    };
    if let Value::Object(map) =
        serde_json::to_value(&output.stats.descriptives).map_err(|e| csv_failure(path, e))?
    {
        for (k, v) in map {
            let v = match v {
                Value::Null => String::new(),
                other => other.to_string(),
            };
            push("descriptives", "", "", &k, v);
        }
    }
    for c in &output.stats.correlations {
        match &c.result {
            Some(r) => {
                push(&c.name, &c.subset, "", "r", r.r.to_string());
                push(&c.name, &c.subset, "", "p", r.p_two_tailed.to_string());
                push(&c.name, &c.subset, "", "n", r.n.to_string());
            }
            None => push(
                &c.name,
                &c.subset,
                "",
                "note",
                c.note.clone().unwrap_or_default(),
            ),
        }
    }
    for g in &output.stats.regressions {
        match &g.result {
            Some(r) => {
                for c in &r.coefficients {
                    push(
                        &g.name,
                        &g.subset,
                        &c.name,
                        "estimate",
                        c.estimate.to_string(),
                    );
                    push(
                        &g.name,
                        &g.subset,
                        &c.name,
                        "std_error",
                        c.std_error.to_string(),
                    );
                    push(&g.name, &g.subset, &c.name, "t", c.t.to_string());
                    push(&g.name, &g.subset, &c.name, "p", c.p.to_string());
                }
                push(&g.name, &g.subset, "", "r_squared", r.r_squared.to_string());
                push(
                    &g.name,
                    &g.subset,
                    "",
                    "adj_r_squared",
                    r.adj_r_squared.to_string(),
                );
                push(
                    &g.name,
                    &g.subset,
                    "",
                    "f_statistic",
                    r.f_statistic.to_string(),
                );
                push(&g.name, &g.subset, "", "f_p", r.f_p.to_string());
                push(&g.name, &g.subset, "", "n", r.n.to_string());
            }
            None => push(
                &g.name,
                &g.subset,
                "",
                "note",
                g.note.clone().unwrap_or_default(),
            ),
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["analysis", "subset", "term", "statistic", "value"])
        .map_err(|e| csv_failure(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_failure(path, e))?;
    }
    w.into_inner().map_err(|e| csv_failure(path, e))
}

pub fn report_json(output: &PipelineOutput) -> Value {
    let c = &output.config;
    json!({
        "config": {
            "step_minutes": c.grid.step_minutes(),
            "max_minutes": c.grid.max_minutes(),
            "k": c.k,
            "horizon_minutes": c.horizon_minutes,
            "cer_horizon_minutes": c.cer_horizon_minutes,
            "cer_threshold": c.cer_threshold,
            "exclude_languages": c.exclude_languages,
        },
        "languages": output.summaries,
        "trajectories": output.details.iter().filter_map(|d| {
            let t = d.trajectory.as_ref()?;
            Some(json!({
                "language": d.language,
                "minutes": t.checkpoints,
                "tokens_discovered": t.counts,
            }))
        }).collect::<Vec<_>>(),
        "stats": output.stats,
        "warnings": output.warnings,
    })
}

fn script_color(s: Option<Script>) -> &'static str {
    match s {
        Some(s) => PALETTE[Script::ALL.iter().position(|x| *x == s).unwrap_or(0) % PALETTE.len()],
        None => "#000000",
    }
}

fn script_legend(chart: &mut Chart, rows: &[&LanguageSummary]) {
    let mut present: Vec<Script> = rows.iter().filter_map(|s| s.script).collect();
    present.sort();
    present.dedup();
    for s in present {
        chart.legend_entry(s.as_str(), script_color(Some(s)));
    }
}

/// Log-spaced subset of ranks `1..=n`, always keeping the endpoints.
fn thin_ranks(n: usize, max_points: usize) -> Vec<usize> {
    if n <= max_points {
        return (1..=n).collect();
    }
    let mut out: Vec<usize> = (0..max_points)
        .map(|i| {
            let f = i as f64 / (max_points - 1) as f64;
            (n as f64).powf(f).round() as usize
        })
        .collect();
    out.dedup();
    out
}

/// The five report figures as `(file name, svg text)`.
pub fn figures(output: &PipelineOutput) -> Vec<(String, String)> {
    let stats_rows: Vec<&LanguageSummary> = output
        .summaries
        .iter()
        .filter(|s| s.in_statistics())
        .collect();
    let horizon = output.config.horizon_minutes;
    let mut out = Vec::new();

    let discovery_points = |f: fn(&LanguageSummary) -> Option<f64>| {
        stats_rows
            .iter()
            .filter_map(|s| Some((s.train_hours?, f(s)?, s)))
            .collect::<Vec<_>>()
    };

    // Discovery against training hours.
    let pts = discovery_points(|s| s.tokens_discovered_at_horizon.map(|v| v as f64));
    let mut c = Chart::new(
        &format!("Unique tokens discovered by {horizon} min"),
        Axis::fit("training hours", Scale::Log10, pts.iter().map(|p| p.0)),
        Axis::fit("unique tokens", Scale::Linear, pts.iter().map(|p| p.1)),
    );
    for (x, y, s) in &pts {
        c.circles(&[(*x, *y)], script_color(s.script), 4.0);
        c.label(*x, *y, &s.language, "#333");
    }
    script_legend(&mut c, &stats_rows);
    out.push(("fig_discovery.svg".to_string(), c.render()));

    // Saturation curves.
    let max_t = output.config.grid.max_minutes();
    let sat: Vec<_> = output
        .details
        .iter()
        .zip(&output.summaries)
        .filter(|(_, s)| s.in_saturation_statistics())
        .filter_map(|(d, _)| Some((d, d.trajectory.as_ref()?, d.fit.as_ref()?)))
        .collect();
    let mut c = Chart::new(
        "Token discovery and saturation fits",
        Axis::fit("audio minutes", Scale::Linear, [0.0, max_t]).with_range(0.0, max_t * 1.02),
        Axis::fit(
            "unique tokens",
            Scale::Linear,
            sat.iter().flat_map(|(_, t, _)| t.counts_f64()).chain([0.0]),
        ),
    );
    for (i, (d, t, f)) in sat.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let observed: Vec<(f64, f64)> = t.checkpoints.iter().copied().zip(t.counts_f64()).collect();
        c.circles(&observed, color, 2.5);
        let curve: Vec<(f64, f64)> = (0..=(max_t.ceil() as usize))
            .map(|m| {
                let m = m as f64;
                (m, eval_saturation(f.amplitude, f.rate, f.offset, m))
            })
            .collect();
        c.polyline(&curve, color, 1.3, false);
        if f.t90_minutes <= max_t {
            c.diamond(f.t90_minutes, f.eval(f.t90_minutes), color, 5.0);
        }
        c.legend_entry(&d.language, color);
    }
    if sat.is_empty() {
        c.note("no language passed the growth filter");
    }
    out.push(("fig_saturation.svg".to_string(), c.render()));

    // Rank-frequency on log-log axes.
    let rank: Vec<_> = output
        .details
        .iter()
        .zip(&output.summaries)
        .filter(|(_, s)| s.in_statistics())
        .filter_map(|(d, _)| Some((d, d.rank_frequency.as_ref()?)))
        .collect();
    let top = rank
        .iter()
        .filter_map(|(_, rf)| rf.freqs.first().copied())
        .max()
        .unwrap_or(1) as f64;
    let longest = rank.iter().map(|(_, rf)| rf.len()).max().unwrap_or(1);
    let mut c = Chart::new(
        &format!("Rank-frequency at {horizon} min"),
        Axis::fit("rank", Scale::Log10, [1.0, longest as f64]),
        Axis::fit(
            "frequency",
            Scale::Log10,
            rank.iter()
                .flat_map(|(_, rf)| rf.freqs.iter().map(|&f| f as f64))
                .chain([top]),
        ),
    );
    for (i, (d, rf)) in rank.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = thin_ranks(rf.len(), 200)
            .into_iter()
            .map(|r| (r as f64, rf.freqs[r - 1] as f64))
            .collect();
        c.polyline(&pts, color, 1.0, false);
        c.legend_entry(&d.language, color);
    }
    let reference: Vec<(f64, f64)> = thin_ranks(longest, 50)
        .into_iter()
        .map(|r| (r as f64, top / r as f64))
        .collect();
    c.polyline(&reference, "#000000", 1.2, true);
    c.legend_entry("slope -1", "#000000");
    out.push(("fig_rank_frequency.svg".to_string(), c.render()));

    // Token length against training hours.
    let pts = discovery_points(|s| s.mean_token_length);
    let mut c = Chart::new(
        "Mean token length",
        Axis::fit("training hours", Scale::Log10, pts.iter().map(|p| p.0)),
        Axis::fit(
            "characters per token",
            Scale::Linear,
            pts.iter().map(|p| p.1),
        ),
    );
    for (x, y, s) in &pts {
        c.circles(&[(*x, *y)], script_color(s.script), 4.0);
        c.label(*x, *y, &s.language, "#333");
    }
    let trend = output
        .stats
        .regressions
        .iter()
        .find(|r| r.name == "mean_length_by_log10_hours")
        .and_then(|r| r.result.as_ref());
    if let Some(r) = trend {
        if let (Some(a), Some(b)) = (
            r.coefficient("intercept"),
            r.coefficient("log10_train_hours"),
        ) {
            let xs: Vec<f64> = pts
                .iter()
                .filter(|p| p.2.script == Some(Script::Latin))
                .map(|p| p.0)
                .collect();
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() {
                let line = [lo, hi].map(|h| (h, a.estimate + b.estimate * h.log10()));
                c.polyline(&line, script_color(Some(Script::Latin)), 1.5, true);
            }
        }
    }
    script_legend(&mut c, &stats_rows);
    out.push(("fig_length_vs_hours.svg".to_string(), c.render()));

    // CER per language with the inclusion threshold.
    let threshold = output.config.cer_threshold;
    let mut cer: Vec<(&LanguageSummary, f64)> = output
        .summaries
        .iter()
        .filter_map(|s| Some((s, s.cer?)))
        .collect();
    cer.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.language.cmp(&b.0.language)));
    let mut c = Chart::new(
        "Character error rate",
        Axis::fit("language", Scale::Linear, [0.0]),
        Axis::fit(
            "CER",
            Scale::Linear,
            cer.iter().map(|p| p.1).chain([0.0, threshold]),
        ),
    );
    let bars: Vec<(String, f64, &str)> = cer
        .iter()
        .map(|(s, v)| {
            let color = if s.included_cer { "#1f77b4" } else { "#d62728" };
            (s.language.clone(), *v, color)
        })
        .collect();
    c.bars(&bars);
    c.hline(threshold, "#000000", true);
    if cer.is_empty() {
        c.note("no reference transcripts supplied");
    } else {
        c.legend_entry("included", "#1f77b4");
        c.legend_entry("excluded", "#d62728");
    }
    out.push(("fig_cer.svg".to_string(), c.render()));

    out
}
