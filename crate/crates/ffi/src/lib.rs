//! C ABI over `tokensat`.
//!
//! Every fallible call returns a [`TsatStatus`]. On failure a description
//! is kept per thread and can be read with [`tsat_last_error_message`].
//! Strings returned by this library are freed with [`tsat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use tokensat::granularity::{compute_cer, parse_reference_tsv};
use tokensat::logmodel::{
    load_language_meta, read_language_meta, CandidateRecord, CheckpointGrid, LogReader,
};
use tokensat::report::{
    emit_report, report_json, run_pipeline, OutputFormat, PipelineConfig, PipelineInput,
    PipelineOutput, ReportError,
};
use tokensat::satfit::{compute_t90, fit_saturation_curve, FitOptions};
use tokensat::stats::pearson_corr;
use tokensat::zipf::{fit_zipf, fit_zipf_mandelbrot, select_model_aic, RankFrequency, RankModel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    FitFailed = 4,
    NoLanguages = 5,
    IoError = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: TsatStatus, msg: impl Into<String>) -> TsatStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`TsatStatus::Panic`].
fn guard(f: impl FnOnce() -> TsatStatus) -> TsatStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TsatStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, TsatStatus> {
    if p.is_null() {
        return Err(fail(TsatStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TsatStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// # Safety
/// `p` must be null or point to `n` readable values.
unsafe fn slice_arg<'a, T>(p: *const T, n: usize, name: &str) -> Result<&'a [T], TsatStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(TsatStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn tsat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsat_compute_t90(rate: f64, out: *mut f64) -> TsatStatus {
    guard(|| {
        if out.is_null() {
            return fail(TsatStatus::NullPointer, "out is null");
        }
        match compute_t90(rate) {
            Ok(t) => {
                *out = t;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::InvalidArgument, e.to_string()),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TsatSaturationFit {
    pub amplitude: f64,
    pub rate: f64,
    pub offset: f64,
    pub r_squared: f64,
    pub t90_minutes: f64,
    pub iterations: u32,
    pub converged: bool,
}

/// Fits `A(1 - exp(-k t)) + B` to `n` points.
///
/// # Safety
/// `t` and `y` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsat_saturation_fit(
    t: *const f64,
    y: *const f64,
    n: usize,
    out: *mut TsatSaturationFit,
) -> TsatStatus {
    guard(|| {
        let t = tri!(slice_arg(t, n, "t"));
        let y = tri!(slice_arg(y, n, "y"));
        if out.is_null() {
            return fail(TsatStatus::NullPointer, "out is null");
        }
        match fit_saturation_curve(t, y, &FitOptions::default()) {
            Ok(f) => {
                *out = TsatSaturationFit {
                    amplitude: f.amplitude,
                    rate: f.rate,
                    offset: f.offset,
                    r_squared: f.r_squared,
                    t90_minutes: f.t90_minutes,
                    iterations: f.iterations as u32,
                    converged: f.converged,
                };
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::FitFailed, e.to_string()),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TsatRankFit {
    pub zipf_c: f64,
    pub zipf_alpha: f64,
    pub zipf_aic: f64,
    pub zm_c: f64,
    pub zm_alpha: f64,
    pub zm_beta: f64,
    pub zm_aic: f64,
    /// AIC of Zipf minus AIC of Zipf-Mandelbrot.
    pub delta_aic: f64,
    /// 1 when Zipf-Mandelbrot is preferred, 0 for plain Zipf.
    pub zm_preferred: bool,
}

/// Fits both rank laws to frequencies listed in rank order (descending).
///
/// # Safety
/// `freqs` must point to `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsat_rank_fit(
    freqs: *const u64,
    n: usize,
    out: *mut TsatRankFit,
) -> TsatStatus {
    guard(|| {
        let freqs = tri!(slice_arg(freqs, n, "freqs"));
        if out.is_null() {
            return fail(TsatStatus::NullPointer, "out is null");
        }
        if freqs.windows(2).any(|w| w[0] < w[1]) {
            return fail(TsatStatus::InvalidArgument, "freqs must be non-increasing");
        }
        let rf = RankFrequency::from_sorted(freqs.to_vec());
        let fitted = fit_zipf(&rf).and_then(|z| {
            let m = fit_zipf_mandelbrot(&rf)?;
            Ok((z, m, select_model_aic(&z, &m)?))
        });
        match fitted {
            Ok((z, m, choice)) => {
                *out = TsatRankFit {
                    zipf_c: z.c,
                    zipf_alpha: z.alpha,
                    zipf_aic: z.aic,
                    zm_c: m.c,
                    zm_alpha: m.alpha,
                    zm_beta: m.beta,
                    zm_aic: m.aic,
                    delta_aic: choice.delta_aic,
                    zm_preferred: choice.model == RankModel::ZipfMandelbrot,
                };
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::FitFailed, e.to_string()),
        }
    })
}

/// Character error rate of `hypothesis` against `reference`.
///
/// # Safety
/// Both strings must be NUL-terminated UTF-8; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsat_cer(
    reference: *const c_char,
    hypothesis: *const c_char,
    out: *mut f64,
) -> TsatStatus {
    guard(|| {
        let r = tri!(str_arg(reference, "reference"));
        let h = tri!(str_arg(hypothesis, "hypothesis"));
        if out.is_null() {
            return fail(TsatStatus::NullPointer, "out is null");
        }
        match compute_cer(r, h) {
            Ok(c) => {
                *out = c.cer;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Pearson correlation and its two-tailed p-value.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `r` and `p` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsat_pearson(
    x: *const f64,
    y: *const f64,
    n: usize,
    r: *mut f64,
    p: *mut f64,
) -> TsatStatus {
    guard(|| {
        let x = tri!(slice_arg(x, n, "x"));
        let y = tri!(slice_arg(y, n, "y"));
        if r.is_null() || p.is_null() {
            return fail(TsatStatus::NullPointer, "output pointer is null");
        }
        match pearson_corr(x, y) {
            Ok(c) => {
                *r = c.r;
                *p = c.p_two_tailed;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Opaque pipeline state: accumulated inputs, configuration and the last
/// result.
pub struct TsatPipeline {
    input: PipelineInput,
    config: PipelineConfig,
    output: Option<PipelineOutput>,
}

impl TsatPipeline {
    fn add_records(&mut self, reader: impl std::io::BufRead) -> TsatStatus {
        let seen = self.input.records.iter().map(|r| r.utt_id.clone());
        let parsed: Result<Vec<CandidateRecord>, _> =
            LogReader::new(reader).with_seen_ids(seen).collect();
        match parsed {
            Ok(mut recs) => {
                self.input.records.append(&mut recs);
                self.output = None;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::ParseError, e.to_string()),
        }
    }
}

unsafe fn handle<'a>(h: *mut TsatPipeline) -> Result<&'a mut TsatPipeline, TsatStatus> {
    h.as_mut()
        .ok_or_else(|| fail(TsatStatus::NullPointer, "pipeline handle is null"))
}

/// New pipeline with default configuration. Free with
/// [`tsat_pipeline_free`].
#[no_mangle]
pub extern "C" fn tsat_pipeline_new() -> *mut TsatPipeline {
    Box::into_raw(Box::new(TsatPipeline {
        input: PipelineInput::default(),
        config: PipelineConfig::default(),
        output: None,
    }))
}

/// # Safety
/// `h` must be null or a handle from [`tsat_pipeline_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_free(h: *mut TsatPipeline) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_grid(
    h: *mut TsatPipeline,
    step_minutes: f64,
    max_minutes: f64,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        match CheckpointGrid::new(step_minutes, max_minutes) {
            Ok(g) => {
                p.config.grid = g;
                p.config.horizon_minutes = g.max_minutes();
                p.config.cer_horizon_minutes = g.step_minutes();
                p.output = None;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_k(h: *mut TsatPipeline, k: usize) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        if k == 0 {
            return fail(TsatStatus::InvalidArgument, "k must be positive");
        }
        p.config.k = k;
        p.output = None;
        TsatStatus::Ok
    })
}

/// Sets the rank-frequency horizon and the CER horizon, both in minutes.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_horizons(
    h: *mut TsatPipeline,
    horizon_minutes: f64,
    cer_horizon_minutes: f64,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        p.config.horizon_minutes = horizon_minutes;
        p.config.cer_horizon_minutes = cer_horizon_minutes;
        p.output = None;
        TsatStatus::Ok
    })
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_cer_threshold(
    h: *mut TsatPipeline,
    threshold: f64,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        p.config.cer_threshold = threshold;
        p.output = None;
        TsatStatus::Ok
    })
}

/// # Safety
/// `h` must be a live handle; `language` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_exclude_language(
    h: *mut TsatPipeline,
    language: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let lang = tri!(str_arg(language, "language"));
        p.config.exclude_languages.insert(lang.to_string());
        p.output = None;
        TsatStatus::Ok
    })
}

/// Appends every record of a JSON Lines log file.
///
/// # Safety
/// `h` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_add_log(
    h: *mut TsatPipeline,
    path: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let path = tri!(str_arg(path, "path"));
        match std::fs::File::open(path) {
            Ok(f) => p.add_records(BufReader::new(f)),
            Err(e) => fail(TsatStatus::IoError, format!("{path}: {e}")),
        }
    })
}

/// Appends records from JSON Lines text held in memory.
///
/// # Safety
/// `h` must be a live handle; `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_add_log_text(
    h: *mut TsatPipeline,
    text: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let text = tri!(str_arg(text, "text"));
        p.add_records(text.as_bytes())
    })
}

/// Loads language metadata from a CSV file, replacing any earlier table.
///
/// # Safety
/// `h` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_meta(
    h: *mut TsatPipeline,
    path: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let path = tri!(str_arg(path, "path"));
        match read_language_meta(std::path::Path::new(path)) {
            Ok(m) => {
                p.input.meta = m;
                p.output = None;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::ParseError, e.to_string()),
        }
    })
}

/// Same as [`tsat_pipeline_set_meta`] with the CSV held in memory.
///
/// # Safety
/// `h` must be a live handle; `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_meta_text(
    h: *mut TsatPipeline,
    text: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let text = tri!(str_arg(text, "text"));
        match load_language_meta(text) {
            Ok(m) => {
                p.input.meta = m;
                p.output = None;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::ParseError, e.to_string()),
        }
    })
}

/// Loads reference transcripts (`utt_id<TAB>text`), enabling the CER
/// filter.
///
/// # Safety
/// `h` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_set_refs(
    h: *mut TsatPipeline,
    path: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let path = tri!(str_arg(path, "path"));
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(TsatStatus::IoError, format!("{path}: {e}")),
        };
        match parse_reference_tsv(&text) {
            Ok(r) => {
                p.input.references = Some(r);
                p.output = None;
                TsatStatus::Ok
            }
            Err(e) => fail(TsatStatus::ParseError, e.to_string()),
        }
    })
}

/// Runs the full analysis on everything added so far.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_run(h: *mut TsatPipeline) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        match run_pipeline(p.input.clone(), &p.config) {
            Ok(o) => {
                p.output = Some(o);
                TsatStatus::Ok
            }
            Err(ReportError::NoLanguagesIncluded) => fail(
                TsatStatus::NoLanguages,
                "no languages passed the inclusion filters",
            ),
            Err(e) => fail(TsatStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Number of languages in the last result, or 0 before a successful run.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_language_count(h: *const TsatPipeline) -> usize {
    h.as_ref()
        .and_then(|p| p.output.as_ref())
        .map_or(0, |o| o.summaries.len())
}

/// The last result as a JSON document. Returns null before a successful
/// run. Free with [`tsat_string_free`].
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_summary_json(h: *const TsatPipeline) -> *mut c_char {
    clear_error();
    let Some(p) = h.as_ref() else {
        set_error("pipeline handle is null");
        return ptr::null_mut();
    };
    let Some(out) = &p.output else {
        set_error("pipeline has not been run");
        return ptr::null_mut();
    };
    let text = report_json(out).to_string().replace('\0', "");
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// Writes report files for the last result. `format` is `csv`, `json` or
/// `svg`.
///
/// # Safety
/// `h` must be a live handle; `out_dir` and `format` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tsat_pipeline_write_report(
    h: *mut TsatPipeline,
    out_dir: *const c_char,
    format: *const c_char,
) -> TsatStatus {
    guard(|| {
        let p = tri!(handle(h));
        let dir = tri!(str_arg(out_dir, "out_dir"));
        let format: OutputFormat = match tri!(str_arg(format, "format")).parse() {
            Ok(f) => f,
            Err(e) => return fail(TsatStatus::InvalidArgument, e),
        };
        let Some(out) = &p.output else {
            return fail(TsatStatus::InvalidArgument, "pipeline has not been run");
        };
        match emit_report(out, format, &PathBuf::from(dir)) {
            Ok(_) => TsatStatus::Ok,
            Err(e) => fail(TsatStatus::IoError, e.to_string()),
        }
    })
}
