use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use tokensat::logmodel::{
    assign_checkpoints, validate_record, write_log, CheckpointGrid, WindowDiagnostic, DEFAULT_K,
};
use tokensat::report::{
    emit_report, load_input, read_logs, run_pipeline, stats_csv, summarize_languages,
    LanguageSummary, OutputFormat, PipelineConfig, ReportError,
};
use tokensat::simulate::{synth_candidate_log, SynthSpec};

#[derive(Parser)]
#[command(
    name = "tokensat",
    version,
    about = "Sub-token discovery and saturation analysis for ASR candidate logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check logs against the schema and the Top-K contract.
    Validate(Common),
    /// Unique-token discovery trajectories.
    Discover(Common),
    /// Saturation fits and T90.
    Fit(Common),
    /// Zipf and Zipf-Mandelbrot fits at the horizon.
    Zipf(Common),
    /// Mean token length and CER.
    Granularity(Common),
    /// Cross-language correlations and regressions.
    Stats(Common),
    /// Full pipeline: tables, JSON and figures.
    Report(Common),
    /// Write a synthetic candidate log.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Common {
    /// Candidate logs (JSON Lines).
    #[arg(long, num_args = 1.., required = true)]
    logs: Vec<PathBuf>,
    /// Language metadata CSV.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Reference transcripts, `utt_id<TAB>text`.
    #[arg(long)]
    refs: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 10.0)]
    step_min: f64,
    #[arg(long, default_value_t = 120.0)]
    max_min: f64,
    #[arg(long, default_value_t = 0.30)]
    cer_threshold: f64,
    #[arg(long, default_value_t = 10.0)]
    cer_horizon_min: f64,
    #[arg(long, default_value_t = 120.0)]
    horizon_min: f64,
    #[arg(long, num_args = 1..)]
    exclude_language: Vec<String>,
    /// Output directory. Tables go to stdout when absent, except for
    /// `report`, which defaults to `./report`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or svg. `report` writes all three when absent.
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "syn")]
    language: String,
    /// Minutes of audio to generate.
    #[arg(long, default_value_t = 120.0)]
    minutes: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 1.1)]
    alpha: f64,
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    #[arg(long, default_value_t = 4000)]
    vocab_size: u32,
    #[arg(long, default_value_t = 6.0)]
    utterance_seconds: f64,
    #[arg(long, default_value_t = 12)]
    steps_per_utterance: usize,
    /// Output directory; the log is written to `<language>.jsonl`.
    /// Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    NoLanguages,
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::NoLanguagesIncluded => Failure::NoLanguages,
            other => Failure::Input(other.to_string()),
        }
    }
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, Failure> {
        let grid = CheckpointGrid::new(self.step_min, self.max_min)
            .map_err(|e| Failure::Input(e.to_string()))?;
        Ok(PipelineConfig {
            grid,
            k: self.k,
            horizon_minutes: self.horizon_min,
            cer_horizon_minutes: self.cer_horizon_min,
            cer_threshold: self.cer_threshold,
            exclude_languages: self
                .exclude_language
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>(),
        })
    }

    fn table_format(&self) -> Result<OutputFormat, Failure> {
        match self.format.unwrap_or(OutputFormat::Csv) {
            OutputFormat::Svg => Err(Failure::Input(
                "svg output is only available from `report`".into(),
            )),
            f => Ok(f),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

/// Sends `text` to `<out>/<name>` or to stdout.
fn deliver(out: Option<&Path>, name: &str, text: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(e.to_string())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Selected summary columns as CSV or JSON.
fn project(rows: &[LanguageSummary], columns: &[&str], format: OutputFormat) -> String {
    let objects: Vec<Map<String, Value>> = rows
        .iter()
        .map(|r| {
            let Value::Object(all) = serde_json::to_value(r).expect("summary serializes") else {
                unreachable!()
            };
            columns
                .iter()
                .map(|c| (c.to_string(), all.get(*c).cloned().unwrap_or(Value::Null)))
                .collect()
        })
        .collect();
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&objects).expect("values serialize") + "\n"
        }
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(columns).expect("in-memory write");
            for o in &objects {
                w.write_record(columns.iter().map(|c| cell(&o[*c])))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
        }
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn validate(args: &Common) -> Result<(), Failure> {
    let config = args.config()?;
    let records = read_logs(&args.logs)?;
    let mut problems = 0usize;
    for r in &records {
        for d in validate_record(r, args.k) {
            println!("{}: {d}", r.utt_id);
            problems += 1;
        }
    }
    let mut languages: Vec<&str> = records.iter().map(|r| r.language.as_str()).collect();
    languages.sort_unstable();
    languages.dedup();
    for lang in &languages {
        let subset: Vec<_> = records
            .iter()
            .filter(|r| r.language == *lang)
            .cloned()
            .collect();
        let windows =
            assign_checkpoints(&subset, &config.grid).map_err(|e| Failure::Input(e.to_string()))?;
        for WindowDiagnostic::InsufficientAudio {
            total_minutes,
            max_minutes,
        } in &windows.diagnostics
        {
            eprintln!("warning: {lang}: only {total_minutes:.1} of {max_minutes} minutes of audio");
        }
    }
    eprintln!(
        "{} records, {} languages, {problems} diagnostics",
        records.len(),
        languages.len()
    );
    if problems > 0 {
        Err(Failure::Input(format!("{problems} diagnostics")))
    } else {
        Ok(())
    }
}

fn per_language(args: &Common, name: &str, columns: &[&str]) -> Result<(), Failure> {
    let config = args.config()?;
    let format = args.table_format()?;
    let input = load_input(&args.logs, args.meta.as_deref(), args.refs.as_deref())?;
    let (summaries, _, warnings) = summarize_languages(input, &config)?;
    print_warnings(&warnings);
    let ext = if format == OutputFormat::Json {
        "json"
    } else {
        "csv"
    };
    deliver(
        args.out.as_deref(),
        &format!("{name}.{ext}"),
        &project(&summaries, columns, format),
    )
}

fn discover(args: &Common) -> Result<(), Failure> {
    let config = args.config()?;
    let format = args.table_format()?;
    let input = load_input(&args.logs, args.meta.as_deref(), None)?;
    let (summaries, details, warnings) = summarize_languages(input, &config)?;
    print_warnings(&warnings);
    let text = match format {
        OutputFormat::Json => {
            let rows: Vec<Value> = details
                .iter()
                .zip(&summaries)
                .filter_map(|(d, s)| {
                    let t = d.trajectory.as_ref()?;
                    Some(json!({
                        "language": d.language,
                        "minutes": t.checkpoints,
                        "tokens_discovered": t.counts,
                        "relative_growth": s.relative_growth,
                        "growth_cv": s.growth_cv,
                        "included_growth": s.included_growth,
                    }))
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("values serialize") + "\n"
        }
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["language", "minutes", "tokens_discovered"])
                .expect("in-memory write");
            for d in &details {
                let Some(t) = &d.trajectory else { continue };
                for (m, c) in t.checkpoints.iter().zip(&t.counts) {
                    w.write_record([d.language.clone(), m.to_string(), c.to_string()])
                        .expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
        }
    };
    let ext = if format == OutputFormat::Json {
        "json"
    } else {
        "csv"
    };
    deliver(args.out.as_deref(), &format!("discovery.{ext}"), &text)
}

fn stats(args: &Common) -> Result<(), Failure> {
    let config = args.config()?;
    let format = args.table_format()?;
    let input = load_input(&args.logs, args.meta.as_deref(), args.refs.as_deref())?;
    let output = run_pipeline(input, &config)?;
    print_warnings(&output.warnings);
    match format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(&output.stats).expect("values serialize");
            deliver(args.out.as_deref(), "stats.json", &(text + "\n"))
        }
        _ => {
            let bytes = stats_csv(&output)?;
            let text = String::from_utf8(bytes).expect("utf-8 csv");
            deliver(args.out.as_deref(), "stats.csv", &text)
        }
    }
}

fn report(args: &Common) -> Result<(), Failure> {
    let config = args.config()?;
    let input = load_input(&args.logs, args.meta.as_deref(), args.refs.as_deref())?;
    let output = run_pipeline(input, &config)?;
    print_warnings(&output.warnings);
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    let formats = match args.format {
        Some(f) => vec![f],
        None => vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
    };
    for f in formats {
        for path in emit_report(&output, f, &out)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    if args.k == 0 || args.k > args.vocab_size as usize {
        return Err(Failure::Input(
            "k must be between 1 and the vocabulary size".into(),
        ));
    }
    if !(args.minutes > 0.0 && args.utterance_seconds > 0.0) {
        return Err(Failure::Input(
            "minutes and utterance length must be positive".into(),
        ));
    }
    let spec = SynthSpec {
        seed: args.seed,
        language: args.language.clone(),
        alpha: args.alpha,
        beta: args.beta,
        vocab_size: args.vocab_size,
        utterance_seconds: args.utterance_seconds,
        steps_per_utterance: args.steps_per_utterance,
        k: args.k,
        ..SynthSpec::default()
    };
    let log = synth_candidate_log(&spec, args.minutes);
    let mut buf = Vec::new();
    write_log(&log.records, &mut buf).map_err(|e| Failure::Input(e.to_string()))?;
    deliver(
        args.out.as_deref(),
        &format!("{}.jsonl", args.language),
        &String::from_utf8(buf).expect("utf-8 json"),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Discover(a) => discover(a),
        Command::Fit(a) => per_language(
            a,
            "fit",
            &[
                "language",
                "A",
                "k",
                "B",
                "fit_r_squared",
                "t90_minutes",
                "coverage_at_horizon",
                "asymptote_fraction_at_horizon",
                "included_growth",
            ],
        ),
        Command::Zipf(a) => per_language(
            a,
            "zipf",
            &[
                "language",
                "zipf_alpha",
                "zm_alpha",
                "zm_beta",
                "chosen_model",
                "delta_aic",
            ],
        ),
        Command::Granularity(a) => per_language(
            a,
            "granularity",
            &["language", "mean_token_length", "cer", "included_cer"],
        ),
        Command::Stats(a) => stats(a),
        Command::Report(a) => report(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NoLanguages) => {
            eprintln!("error: no languages passed the inclusion filters");
            ExitCode::from(2)
        }
    }
}
