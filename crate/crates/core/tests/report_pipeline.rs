use std::collections::BTreeMap;

use tokensat::logmodel::{CandidateEntry, CandidateRecord, DecodingStep, LanguageMeta, Script};
use tokensat::report::{
    emit_report, figures, read_summary_csv, report_json, run_pipeline, summarize_languages,
    LanguageSummary, OutputFormat, PipelineConfig, PipelineInput, ReportError,
};
use tokensat::simulate::{synth_candidate_log, synthetic_token_text, SynthLog, SynthSpec};

const LANGS: [(&str, u64, u32, Script, f64); 3] = [
    ("aa", 1, 3000, Script::Latin, 12.0),
    ("bb", 2, 6000, Script::Latin, 340.0),
    ("cc", 3, 9000, Script::Cyrillic, 2500.0),
];

fn synth(lang: &str, seed: u64, vocab: u32) -> SynthLog {
    let spec = SynthSpec {
        seed,
        language: lang.into(),
        vocab_size: vocab,
        k: 10,
        alpha: 1.05,
        beta: 4.0,
        utterance_seconds: 30.0,
        steps_per_utterance: 10,
        ..SynthSpec::default()
    };
    synth_candidate_log(&spec, 120.0)
}

fn meta() -> Vec<LanguageMeta> {
    LANGS
        .iter()
        .map(|&(l, _, _, script, hours)| LanguageMeta {
            language: l.into(),
            script,
            train_hours: hours,
            reference_text_available: false,
        })
        .collect()
}

fn config() -> PipelineConfig {
    PipelineConfig {
        k: 10,
        ..PipelineConfig::default()
    }
}

fn corpus() -> (Vec<CandidateRecord>, BTreeMap<String, SynthLog>) {
    let mut records = Vec::new();
    let mut logs = BTreeMap::new();
    for &(l, seed, vocab, _, _) in &LANGS {
        let log = synth(l, seed, vocab);
        records.extend(log.records.iter().cloned());
        logs.insert(l.to_string(), log);
    }
    (records, logs)
}

fn input(records: Vec<CandidateRecord>) -> PipelineInput {
    PipelineInput {
        records,
        meta: meta(),
        references: None,
    }
}

/// Slope of the log-log least-squares line through the rank-ordered draw
/// counts, computed from scratch.
fn oracle_alpha(counts: &BTreeMap<u32, u64>) -> f64 {
    let mut rows: Vec<(u32, u64)> = counts.iter().map(|(&i, &f)| (i, f)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .enumerate()
        .map(|(i, &(_, f))| (((i + 1) as f64).ln(), (f as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

fn oracle_mean_length(counts: &BTreeMap<u32, u64>) -> f64 {
    let (mut num, mut den) = (0u64, 0u64);
    for (&id, &f) in counts {
        let len = synthetic_token_text(id)
            .trim_start_matches(' ')
            .chars()
            .count() as u64;
        num += f * len;
        den += f;
    }
    num as f64 / den as f64
}

#[test]
fn end_to_end_matches_generator_truth() {
    let (records, logs) = corpus();
    let out = run_pipeline(input(records), &config()).unwrap();
    assert_eq!(out.summaries.len(), 3);
    for s in &out.summaries {
        let log = &logs[&s.language];
        assert_eq!(
            s.tokens_discovered_at_horizon,
            Some(log.expected_count(120.0) as u64),
            "{}",
            s.language
        );
        let alpha = s.zipf_alpha.unwrap();
        assert!((alpha - oracle_alpha(&log.draw_counts)).abs() < 1e-9);
        let len = s.mean_token_length.unwrap();
        assert!((len - oracle_mean_length(&log.draw_counts)).abs() < 1e-12);
        assert!(s.included_cer && s.included_growth);
        assert!(s.in_saturation_statistics());
        let t90 = s.t90_minutes.unwrap();
        assert!((t90 - 10f64.ln() / s.rate.unwrap()).abs() < 1e-9);
    }
    let d = &out.stats.descriptives;
    assert_eq!((d.n_languages, d.n_in_statistics), (3, 3));
    let trajectory = &out.details[0].trajectory.as_ref().unwrap();
    assert_eq!(trajectory.checkpoints.len(), 12);
}

fn constant_language() -> Vec<CandidateRecord> {
    (0..300)
        .map(|i| CandidateRecord {
            utt_id: format!("flat-{i}"),
            language: "zz".into(),
            duration_s: 30.0,
            steps: vec![DecodingStep {
                candidates: vec![CandidateEntry {
                    token_id: 7,
                    token_text: "▁same".into(),
                    logprob: 0.0,
                }],
            }],
        })
        .collect()
}

#[test]
fn languages_are_independent() {
    let (records, _) = corpus();
    let (base, _, _) = summarize_languages(input(records.clone()), &config()).unwrap();

    let mut with_flat = records.clone();
    with_flat.extend(constant_language());
    let (more, _, warnings) = summarize_languages(input(with_flat), &config()).unwrap();
    assert_eq!(&more[..3], &base[..]);
    let flat = &more[3];
    assert_eq!(flat.language, "zz");
    assert!(!flat.included_growth);
    assert_eq!(flat.t90_minutes, None);
    assert_eq!(flat.tokens_discovered_at_horizon, Some(1));
    assert!(!flat.in_statistics(), "no metadata for zz");
    assert!(warnings.iter().any(|w| w.starts_with("zz: stagnant")));

    let without_bb: Vec<_> = records.into_iter().filter(|r| r.language != "bb").collect();
    let (fewer, _, _) = summarize_languages(input(without_bb), &config()).unwrap();
    assert_eq!(fewer, vec![base[0].clone(), base[2].clone()]);

    let mut cfg = config();
    cfg.exclude_languages.insert("bb".into());
    let (excluded, _, _) = summarize_languages(input(corpus().0), &cfg).unwrap();
    assert_eq!(excluded, fewer);
}

#[test]
fn cer_filter_removes_language_from_statistics() {
    let (records, _) = corpus();
    let mut refs = BTreeMap::new();
    for r in &records {
        let text = if r.language == "cc" {
            "completely unrelated reference".to_string()
        } else {
            r.top1_text()
        };
        refs.insert(r.utt_id.clone(), text);
    }
    let out = run_pipeline(
        PipelineInput {
            records,
            meta: meta(),
            references: Some(refs),
        },
        &config(),
    )
    .unwrap();
    let by: BTreeMap<&str, &LanguageSummary> = out
        .summaries
        .iter()
        .map(|s| (s.language.as_str(), s))
        .collect();
    assert_eq!(by["aa"].cer, Some(0.0));
    assert!(by["aa"].included_cer);
    assert!(by["cc"].cer.unwrap() >= 0.30);
    assert!(!by["cc"].included_cer);
    assert_eq!(out.stats.descriptives.n_in_statistics, 2);
}

#[test]
fn csv_and_json_round_trip() {
    let (records, _) = corpus();
    let out = run_pipeline(input(records), &config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&out, OutputFormat::Csv, dir.path()).unwrap();
    assert_eq!(written.len(), 3);
    let back = read_summary_csv(&dir.path().join("summary.csv")).unwrap();
    assert_eq!(back, out.summaries);

    let header = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let first = header.lines().next().unwrap();
    assert!(
        first.starts_with("language,script,train_hours,tokens_discovered_at_horizon,t90_minutes")
    );

    let traj = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 3 * 12);

    emit_report(&out, OutputFormat::Json, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v, report_json(&out));
    let langs: Vec<LanguageSummary> = serde_json::from_value(v["languages"].clone()).unwrap();
    assert_eq!(langs, out.summaries);
}

#[test]
fn figures_are_well_formed() {
    let (records, _) = corpus();
    let out = run_pipeline(input(records), &config()).unwrap();
    let figs = figures(&out);
    let names: Vec<&str> = figs.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "fig_discovery.svg",
            "fig_saturation.svg",
            "fig_rank_frequency.svg",
            "fig_length_vs_hours.svg",
            "fig_cer.svg"
        ]
    );
    for (name, svg) in &figs {
        let doc = roxmltree::Document::parse(svg).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg", "{name}");
    }
    // Log axes label decades.
    let rank = roxmltree::Document::parse(&figs[2].1).unwrap();
    let labels: Vec<&str> = rank
        .descendants()
        .filter(|n| n.has_tag_name("text"))
        .filter_map(|n| n.text())
        .collect();
    for decade in ["1", "10", "100", "1000"] {
        assert!(
            labels.contains(&decade),
            "missing tick {decade}: {labels:?}"
        );
    }
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        emit_report(&out, OutputFormat::Svg, dir.path())
            .unwrap()
            .len(),
        5
    );
}

#[test]
fn nothing_to_report() {
    assert!(matches!(
        run_pipeline(PipelineInput::default(), &config()),
        Err(ReportError::NoLanguagesIncluded)
    ));
    let (records, _) = corpus();
    let no_meta = PipelineInput {
        records,
        meta: Vec::new(),
        references: None,
    };
    assert!(matches!(
        run_pipeline(no_meta, &config()),
        Err(ReportError::NoLanguagesIncluded)
    ));
}
