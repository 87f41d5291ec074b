use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tokensat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Two synthetic languages plus a metadata file in `dir`.
fn fixture(dir: &Path) -> (Vec<PathBuf>, PathBuf) {
    let mut logs = Vec::new();
    for (lang, seed, vocab) in [("aa", "1", "2000"), ("bb", "2", "5000")] {
        let o = run(&[
            "synth",
            "--seed",
            seed,
            "--language",
            lang,
            "--k",
            "8",
            "--vocab-size",
            vocab,
            "--utterance-seconds",
            "30",
            "--steps-per-utterance",
            "6",
            "--out",
            p(dir),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        logs.push(dir.join(format!("{lang}.jsonl")));
    }
    let meta = dir.join("meta.csv");
    std::fs::write(
        &meta,
        "language,script,train_hours\naa,Latin,20\nbb,Cyrillic,800\n",
    )
    .unwrap();
    (logs, meta)
}

fn with_logs<'a>(cmd: &'a str, logs: &'a [PathBuf], rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd, "--k", "8", "--logs"];
    v.extend(logs.iter().map(|l| p(l)));
    v.extend(rest);
    v
}

#[test]
fn synth_validate_report() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, meta) = fixture(dir.path());

    let o = run(&with_logs("validate", &logs, &[]));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let out = dir.path().join("report");
    let o = run(&with_logs(
        "report",
        &logs,
        &["--meta", p(&meta), "--out", p(&out)],
    ));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in [
        "summary.csv",
        "trajectories.csv",
        "stats.csv",
        "report.json",
        "fig_discovery.svg",
        "fig_saturation.svg",
        "fig_rank_frequency.svg",
        "fig_length_vs_hours.svg",
        "fig_cer.svg",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let rows = tokensat::report::read_summary_csv(&out.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn stage_commands_print_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, meta) = fixture(dir.path());

    let o = run(&with_logs("discover", &logs, &[]));
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("language,minutes,tokens_discovered")
    );
    assert_eq!(text.lines().count(), 1 + 2 * 12);

    let o = run(&with_logs("fit", &logs, &["--format", "json"]));
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v[0]["t90_minutes"].as_f64().unwrap() > 0.0);

    let o = run(&with_logs("zipf", &logs, &[]));
    assert!(stdout(&o).starts_with("language,zipf_alpha,zm_alpha,zm_beta,chosen_model,delta_aic"));

    let o = run(&with_logs("granularity", &logs, &[]));
    assert!(stdout(&o).starts_with("language,mean_token_length,cer,included_cer"));

    let o = run(&with_logs("stats", &logs, &["--meta", p(&meta)]));
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("analysis,subset,term,statistic,value"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (logs, _) = fixture(dir.path());

    // No metadata: nothing can enter the statistics.
    let o = run(&with_logs("stats", &logs, &[]));
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"utt_id\": \"x\"\n").unwrap();
    let o = run(&["validate", "--logs", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    // Wrong K is a contract violation.
    let o = run(&["validate", "--k", "50", "--logs", p(&logs[0])]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["report", "--logs", p(&dir.path().join("missing.jsonl"))]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&with_logs("report", &logs, &["--horizon-min", "55"]));
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn synth_is_deterministic() {
    let a = run(&[
        "synth",
        "--seed",
        "9",
        "--minutes",
        "2",
        "--vocab-size",
        "300",
    ]);
    let b = run(&[
        "synth",
        "--seed",
        "9",
        "--minutes",
        "2",
        "--vocab-size",
        "300",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "synth",
        "--seed",
        "10",
        "--minutes",
        "2",
        "--vocab-size",
        "300",
    ]);
    assert_ne!(a.stdout, c.stdout);
}
