//! Candidate-log and language-metadata formats, plus cumulative checkpoint
//! windowing.
//!
//! A candidate log is JSON Lines, one utterance per line:
//!
//! ```text
//! {"utt_id": "u1", "language": "de", "duration_s": 4.2,
//!  "steps": [{"topk": [{"id": 13, "s": " the", "lp": -0.11}, ...]}, ...]}
//! ```
//!
//! Records are yielded in file order. File order is also the utterance order
//! used to build the nested checkpoint windows.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Default Top-K list length.
pub const DEFAULT_K: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEntry {
    #[serde(rename = "id")]
    pub token_id: u32,
    #[serde(rename = "s")]
    pub token_text: String,
    /// Natural-log probability, finite and `<= 0`.
    #[serde(rename = "lp")]
    pub logprob: f64,
}

/// Ranked Top-K candidates for one emitted hypothesis token.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DecodingStep {
    #[serde(rename = "topk")]
    pub candidates: Vec<CandidateEntry>,
}

/// One utterance's decoding trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub utt_id: String,
    pub language: String,
    pub duration_s: f64,
    pub steps: Vec<DecodingStep>,
}

impl CandidateRecord {
    /// Hypothesis text reconstructed from the rank-1 candidate of every step.
    pub fn top1_text(&self) -> String {
        self.steps
            .iter()
            .filter_map(|s| s.candidates.first())
            .map(|c| c.token_text.as_str())
            .collect()
    }

    /// Serializes the record as a single JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("candidate records always serialize")
    }
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: malformed JSON: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: invalid field `{field}`: {reason}")]
    SchemaViolation {
        line: usize,
        field: String,
        reason: String,
    },
    #[error("duplicate utterance id `{0}`")]
    DuplicateUttId(String),
    #[error("no records to window")]
    EmptyCorpus,
    #[error("invalid checkpoint grid: {0}")]
    InvalidGrid(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Streaming reader over a JSON Lines candidate log.
///
/// Blank lines are skipped. Once an error is yielded the stream should be
/// considered poisoned; callers usually collect into `Result<Vec<_>, _>`.
pub struct LogReader<R> {
    input: R,
    line_no: usize,
    seen: HashSet<String>,
    buf: String,
}

impl<R: BufRead> LogReader<R> {
    pub fn new(input: R) -> Self {
        Self {
            input,
            line_no: 0,
            seen: HashSet::new(),
            buf: String::new(),
        }
    }

    pub fn with_seen_ids(mut self, ids: impl IntoIterator<Item = String>) -> Self {
        self.seen.extend(ids);
        self
    }
}

impl<R: BufRead> Iterator for LogReader<R> {
    type Item = Result<CandidateRecord, LogError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.line_no += 1;
                    return Some(Err(LogError::MalformedLine {
                        line: self.line_no,
                        message: e.to_string(),
                    }));
                }
            }
            self.line_no += 1;
            let line = self.buf.trim();
            if line.is_empty() {
                continue;
            }
            let record = match parse_line(line, self.line_no) {
                Ok(r) => r,
                Err(e) => return Some(Err(e)),
            };
            if !self.seen.insert(record.utt_id.clone()) {
                return Some(Err(LogError::DuplicateUttId(record.utt_id)));
            }
            return Some(Ok(record));
        }
    }
}

/// Parses a whole line-delimited stream into records, in file order.
pub fn parse_log_stream<R: BufRead>(input: R) -> Result<Vec<CandidateRecord>, LogError> {
    LogReader::new(input).collect()
}

pub fn read_log_file(path: &Path) -> Result<Vec<CandidateRecord>, LogError> {
    let file = std::fs::File::open(path).map_err(|source| LogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_log_stream(std::io::BufReader::new(file))
}

pub fn write_log<'a, W: Write>(
    records: impl IntoIterator<Item = &'a CandidateRecord>,
    mut out: W,
) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn schema(line: usize, field: impl Into<String>, reason: impl Into<String>) -> LogError {
    LogError::SchemaViolation {
        line,
        field: field.into(),
        reason: reason.into(),
    }
}

fn parse_line(text: &str, line: usize) -> Result<CandidateRecord, LogError> {
    let value: Value = serde_json::from_str(text).map_err(|e| LogError::MalformedLine {
        line,
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema(line, "<root>", "expected a JSON object"))?;

    let get_str = |key: &str| -> Result<String, LogError> {
        match obj.get(key) {
            None => Err(schema(line, key, "missing")),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(schema(line, key, "expected a string")),
        }
    };
    let utt_id = get_str("utt_id")?;
    if utt_id.is_empty() {
        return Err(schema(line, "utt_id", "must be non-empty"));
    }
    let language = get_str("language")?;
    if language.is_empty() {
        return Err(schema(line, "language", "must be non-empty"));
    }
    let duration_s = match obj.get("duration_s") {
        None => return Err(schema(line, "duration_s", "missing")),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| schema(line, "duration_s", "expected a number"))?,
    };
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(schema(line, "duration_s", "must be a positive number"));
    }

    let raw_steps = match obj.get("steps") {
        None => return Err(schema(line, "steps", "missing")),
        Some(Value::Array(a)) => a,
        Some(_) => return Err(schema(line, "steps", "expected an array")),
    };
    let mut steps = Vec::with_capacity(raw_steps.len());
    for (si, raw) in raw_steps.iter().enumerate() {
        let topk = match raw.get("topk") {
            Some(Value::Array(a)) => a,
            Some(_) => {
                return Err(schema(
                    line,
                    format!("steps[{si}].topk"),
                    "expected an array",
                ))
            }
            None => return Err(schema(line, format!("steps[{si}].topk"), "missing")),
        };
        let mut candidates = Vec::with_capacity(topk.len());
        for (ci, c) in topk.iter().enumerate() {
            let field = |name: &str| format!("steps[{si}].topk[{ci}].{name}");
            let token_id = c
                .get("id")
                .ok_or_else(|| schema(line, field("id"), "missing"))?
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| {
                    schema(line, field("id"), "expected a non-negative 32-bit integer")
                })?;
            let token_text = match c.get("s") {
                Some(Value::String(s)) => s.clone(),
                Some(_) => return Err(schema(line, field("s"), "expected a string")),
                None => return Err(schema(line, field("s"), "missing")),
            };
            let logprob = c
                .get("lp")
                .ok_or_else(|| schema(line, field("lp"), "missing"))?
                .as_f64()
                .ok_or_else(|| schema(line, field("lp"), "expected a number"))?;
            if !(logprob.is_finite() && logprob <= 0.0) {
                return Err(schema(line, field("lp"), "must be finite and <= 0"));
            }
            candidates.push(CandidateEntry {
                token_id,
                token_text,
                logprob,
            });
        }
        steps.push(DecodingStep { candidates });
    }

    Ok(CandidateRecord {
        utt_id,
        language,
        duration_s,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Diagnostic {
    KMismatch {
        step: usize,
        found: usize,
        expected: usize,
    },
    UnsortedCandidates {
        step: usize,
    },
    DuplicateCandidate {
        step: usize,
        token_id: u32,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KMismatch {
                step,
                found,
                expected,
            } => write!(f, "step {step}: {found} candidates, expected {expected}"),
            Self::UnsortedCandidates { step } => {
                write!(
                    f,
                    "step {step}: candidates not sorted by descending logprob"
                )
            }
            Self::DuplicateCandidate { step, token_id } => {
                write!(f, "step {step}: token id {token_id} listed more than once")
            }
        }
    }
}

/// Checks the per-step Top-K contract. An empty result means the record is
/// well formed for `expected_k`.
pub fn validate_record(record: &CandidateRecord, expected_k: usize) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (step, s) in record.steps.iter().enumerate() {
        if s.candidates.len() != expected_k {
            out.push(Diagnostic::KMismatch {
                step,
                found: s.candidates.len(),
                expected: expected_k,
            });
        }
        if s.candidates.windows(2).any(|w| w[0].logprob < w[1].logprob) {
            out.push(Diagnostic::UnsortedCandidates { step });
        }
        let mut ids = HashSet::with_capacity(s.candidates.len());
        for c in &s.candidates {
            if !ids.insert(c.token_id) {
                out.push(Diagnostic::DuplicateCandidate {
                    step,
                    token_id: c.token_id,
                });
            }
        }
    }
    out
}

/// Cumulative-duration checkpoints `step, 2*step, ..., max` in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointGrid {
    step_minutes: f64,
    max_minutes: f64,
}

impl Default for CheckpointGrid {
    fn default() -> Self {
        Self {
            step_minutes: 10.0,
            max_minutes: 120.0,
        }
    }
}

impl CheckpointGrid {
    pub fn new(step_minutes: f64, max_minutes: f64) -> Result<Self, LogError> {
        if !(step_minutes.is_finite() && step_minutes > 0.0) {
            return Err(LogError::InvalidGrid("step must be positive".into()));
        }
        if !(max_minutes.is_finite() && max_minutes > 0.0) {
            return Err(LogError::InvalidGrid("max must be positive".into()));
        }
        let n = (max_minutes / step_minutes).round();
        if n < 1.0 || ((n * step_minutes) - max_minutes).abs() > 1e-9 * max_minutes {
            return Err(LogError::InvalidGrid(format!(
                "max {max_minutes} is not an integer multiple of step {step_minutes}"
            )));
        }
        Ok(Self {
            step_minutes,
            max_minutes,
        })
    }

    pub fn step_minutes(&self) -> f64 {
        self.step_minutes
    }

    pub fn max_minutes(&self) -> f64 {
        self.max_minutes
    }

    pub fn len(&self) -> usize {
        (self.max_minutes / self.step_minutes).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn checkpoints(&self) -> Vec<f64> {
        (1..=self.len())
            .map(|i| i as f64 * self.step_minutes)
            .collect()
    }

    /// Index of the checkpoint equal to `minutes`, if it lies on the grid.
    pub fn index_of(&self, minutes: f64) -> Option<usize> {
        self.checkpoints()
            .iter()
            .position(|&c| (c - minutes).abs() <= 1e-9 * c.max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointWindow {
    pub minutes: f64,
    pub utt_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WindowDiagnostic {
    InsufficientAudio {
        total_minutes: f64,
        max_minutes: f64,
    },
}

/// Nested cumulative windows, ordered by checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Windows {
    pub windows: Vec<CheckpointWindow>,
    pub diagnostics: Vec<WindowDiagnostic>,
}

impl Windows {
    pub fn checkpoints(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.minutes).collect()
    }

    pub fn window_at(&self, minutes: f64) -> Option<&CheckpointWindow> {
        self.windows
            .iter()
            .find(|w| (w.minutes - minutes).abs() <= 1e-9 * w.minutes.max(1.0))
    }
}

/// Assigns each utterance to every checkpoint whose budget covers its
/// cumulative end time. An utterance straddling a boundary only joins the
/// next checkpoint, so windows are prefixes of `records` and always nested.
pub fn assign_checkpoints(
    records: &[CandidateRecord],
    grid: &CheckpointGrid,
) -> Result<Windows, LogError> {
    if records.is_empty() {
        return Err(LogError::EmptyCorpus);
    }
    let mut ends = Vec::with_capacity(records.len());
    let mut cum = 0.0;
    for r in records {
        cum += r.duration_s;
        ends.push(cum);
    }
    let mut windows = Vec::with_capacity(grid.len());
    let mut prefix = 0usize;
    for minutes in grid.checkpoints() {
        let budget_s = minutes * 60.0;
        while prefix < ends.len() && ends[prefix] <= budget_s * (1.0 + 1e-12) {
            prefix += 1;
        }
        windows.push(CheckpointWindow {
            minutes,
            utt_ids: records[..prefix].iter().map(|r| r.utt_id.clone()).collect(),
        });
    }
    let mut diagnostics = Vec::new();
    let total_minutes = cum / 60.0;
    if total_minutes < grid.max_minutes() {
        diagnostics.push(WindowDiagnostic::InsufficientAudio {
            total_minutes,
            max_minutes: grid.max_minutes(),
        });
    }
    Ok(Windows {
        windows,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Script {
    Latin,
    Cyrillic,
    Arabic,
    Devanagari,
    #[serde(rename = "CJ")]
    Cj,
    Hangul,
    Thai,
    Hebrew,
    Other,
}

impl Script {
    pub const ALL: [Script; 9] = [
        Script::Latin,
        Script::Cyrillic,
        Script::Arabic,
        Script::Devanagari,
        Script::Cj,
        Script::Hangul,
        Script::Thai,
        Script::Hebrew,
        Script::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Script::Latin => "Latin",
            Script::Cyrillic => "Cyrillic",
            Script::Arabic => "Arabic",
            Script::Devanagari => "Devanagari",
            Script::Cj => "CJ",
            Script::Hangul => "Hangul",
            Script::Thai => "Thai",
            Script::Hebrew => "Hebrew",
            Script::Other => "Other",
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Script {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageMeta {
    pub language: String,
    pub script: Script,
    pub train_hours: f64,
    pub reference_text_available: bool,
}

#[derive(Debug, Error)]
pub enum MetaError {
    #[error("row {row}: unknown script `{value}`")]
    UnknownScript { row: usize, value: String },
    #[error("row {row}: training hours must be positive")]
    NonPositiveHours { row: usize },
    #[error("duplicate language `{0}`")]
    DuplicateLanguage(String),
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("expected header `language,script,train_hours`")]
    BadHeader,
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses `language,script,train_hours[,reference_text_available]` CSV.
/// Lines starting with `#` are comments. Row numbers in errors are 1-based
/// file lines, so the first data row after the header is row 2.
pub fn load_language_meta(text: &str) -> Result<Vec<LanguageMeta>, MetaError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|_| MetaError::BadHeader)?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let has_flag = match cols.as_slice() {
        ["language", "script", "train_hours"] => false,
        ["language", "script", "train_hours", "reference_text_available"] => true,
        _ => return Err(MetaError::BadHeader),
    };

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| MetaError::Malformed {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let expected = if has_flag { 4 } else { 3 };
        if rec.len() != expected {
            return Err(MetaError::Malformed {
                row,
                message: format!("expected {expected} columns, found {}", rec.len()),
            });
        }
        let language = rec[0].to_string();
        if language.is_empty() {
            return Err(MetaError::Malformed {
                row,
                message: "empty language code".into(),
            });
        }
        let script = rec[1]
            .parse::<Script>()
            .map_err(|_| MetaError::UnknownScript {
                row,
                value: rec[1].to_string(),
            })?;
        let train_hours: f64 = rec[2].parse().map_err(|_| MetaError::Malformed {
            row,
            message: format!("train_hours `{}` is not a number", &rec[2]),
        })?;
        if !(train_hours.is_finite() && train_hours > 0.0) {
            return Err(MetaError::NonPositiveHours { row });
        }
        let reference_text_available = if has_flag {
            match rec[3].to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" | "" => false,
                other => {
                    return Err(MetaError::Malformed {
                        row,
                        message: format!("bad boolean `{other}`"),
                    })
                }
            }
        } else {
            false
        };
        if !seen.insert(language.clone()) {
            return Err(MetaError::DuplicateLanguage(language));
        }
        out.push(LanguageMeta {
            language,
            script,
            train_hours,
            reference_text_available,
        });
    }
    Ok(out)
}

pub fn read_language_meta(path: &Path) -> Result<Vec<LanguageMeta>, MetaError> {
    let text = std::fs::read_to_string(path).map_err(|source| MetaError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_language_meta(&text)
}

pub fn write_language_meta(rows: &[LanguageMeta]) -> String {
    let mut out = String::from("language,script,train_hours,reference_text_available\n");
    for m in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            m.language, m.script, m.train_hours, m.reference_text_available
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: u32, lp: f64) -> CandidateEntry {
        CandidateEntry {
            token_id: id,
            token_text: format!("t{id}"),
            logprob: lp,
        }
    }

    fn rec(id: &str, dur: f64) -> CandidateRecord {
        CandidateRecord {
            utt_id: id.into(),
            language: "de".into(),
            duration_s: dur,
            steps: vec![],
        }
    }

    #[test]
    fn parses_one_line() {
        let line = r#"{"utt_id":"a","language":"de","duration_s":3.5,"steps":[{"topk":[{"id":1,"s":"a","lp":-0.1},{"id":2,"s":"b","lp":-1.0},{"id":3,"s":"c","lp":-2.0}]},{"topk":[{"id":4,"s":" d","lp":-0.2},{"id":5,"s":"e","lp":-0.3},{"id":6,"s":"f","lp":-4.0}]}]}"#;
        let recs = parse_log_stream(line.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].steps.len(), 2);
        assert_eq!(recs[0].steps[1].candidates[0].token_text, " d");
        assert!(validate_record(&recs[0], 3).is_empty());
    }

    #[test]
    fn truncated_line_is_malformed() {
        let err = parse_log_stream(r#"{"utt_id": "a""#.as_bytes()).unwrap_err();
        assert!(matches!(err, LogError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let cases = [
            (r#"{"language":"de","duration_s":1,"steps":[]}"#, "utt_id"),
            (
                r#"{"utt_id":"a","language":"de","duration_s":0,"steps":[]}"#,
                "duration_s",
            ),
            (r#"{"utt_id":"a","language":"de","duration_s":1}"#, "steps"),
            (
                r#"{"utt_id":"a","language":"de","duration_s":1,"steps":[{"topk":[{"id":1,"s":"x","lp":0.5}]}]}"#,
                "steps[0].topk[0].lp",
            ),
            (
                r#"{"utt_id":"a","language":"de","duration_s":1,"steps":[{"topk":[{"id":-1,"s":"x","lp":-0.5}]}]}"#,
                "steps[0].topk[0].id",
            ),
        ];
        for (line, want) in cases {
            match parse_log_stream(line.as_bytes()).unwrap_err() {
                LogError::SchemaViolation { line: 1, field, .. } => assert_eq!(field, want),
                other => panic!("{line}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_utt_ids_rejected() {
        let a = rec("x", 1.0).to_json_line();
        let text = format!("{a}\n\n{a}\n");
        assert!(matches!(
            parse_log_stream(text.as_bytes()),
            Err(LogError::DuplicateUttId(id)) if id == "x"
        ));
    }

    #[test]
    fn validate_reports_k_and_order() {
        let mut r = rec("a", 1.0);
        r.steps.push(DecodingStep {
            candidates: (0..50).map(|i| entry(i, -(i as f64))).collect(),
        });
        assert!(validate_record(&r, 50).is_empty());
        r.steps.push(DecodingStep {
            candidates: (0..49).map(|i| entry(i, -(i as f64))).collect(),
        });
        assert_eq!(
            validate_record(&r, 50),
            vec![Diagnostic::KMismatch {
                step: 1,
                found: 49,
                expected: 50
            }]
        );

        let unsorted = CandidateRecord {
            steps: vec![DecodingStep {
                candidates: vec![entry(1, -1.0), entry(2, -0.5)],
            }],
            ..rec("b", 1.0)
        };
        assert_eq!(
            validate_record(&unsorted, 2),
            vec![Diagnostic::UnsortedCandidates { step: 0 }]
        );
    }

    #[test]
    fn exact_budget_windows() {
        let recs = vec![rec("u1", 300.0), rec("u2", 300.0), rec("u3", 300.0)];
        let grid = CheckpointGrid::new(10.0, 20.0).unwrap();
        let w = assign_checkpoints(&recs, &grid).unwrap();
        let ids = |i: usize| w.windows[i].utt_ids.iter().cloned().collect::<Vec<_>>();
        assert_eq!(ids(0), ["u1", "u2"]);
        assert_eq!(ids(1), ["u1", "u2", "u3"]);
    }

    #[test]
    fn straddling_utterance_waits_for_its_checkpoint() {
        let w = assign_checkpoints(&[rec("u1", 3600.0)], &CheckpointGrid::default()).unwrap();
        for win in &w.windows {
            assert_eq!(
                win.utt_ids.is_empty(),
                win.minutes < 60.0,
                "{}",
                win.minutes
            );
        }
        assert_eq!(w.diagnostics.len(), 1);
    }

    #[test]
    fn empty_corpus_errors() {
        assert!(matches!(
            assign_checkpoints(&[], &CheckpointGrid::default()),
            Err(LogError::EmptyCorpus)
        ));
    }

    #[test]
    fn grid_requires_integer_multiple() {
        assert!(CheckpointGrid::new(10.0, 125.0).is_err());
        assert!(CheckpointGrid::new(0.0, 120.0).is_err());
        let g = CheckpointGrid::new(7.5, 30.0).unwrap();
        assert_eq!(g.checkpoints(), [7.5, 15.0, 22.5, 30.0]);
        assert_eq!(g.index_of(22.5), Some(2));
        assert_eq!(g.index_of(20.0), None);
    }

    #[test]
    fn meta_rows_and_errors() {
        let m =
            load_language_meta("language,script,train_hours\n# comment\nde,Latin,13344\n").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].script, Script::Latin);
        assert_eq!(m[0].train_hours, 13344.0);

        assert!(matches!(
            load_language_meta("language,script,train_hours\nxx,Klingon,5\n"),
            Err(MetaError::UnknownScript { row: 2, .. })
        ));
        assert!(matches!(
            load_language_meta("language,script,train_hours\nxx,Thai,0\n"),
            Err(MetaError::NonPositiveHours { row: 2 })
        ));
        assert!(matches!(
            load_language_meta("language,script,train_hours\nxx,Thai,1\nxx,Thai,2\n"),
            Err(MetaError::DuplicateLanguage(c)) if c == "xx"
        ));
        assert!(matches!(
            load_language_meta("lang,script\n"),
            Err(MetaError::BadHeader)
        ));
    }
}
