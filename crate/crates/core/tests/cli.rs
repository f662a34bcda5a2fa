use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tgrmpt::io::{load_ground_truth, load_tracker_output, write_tracker_output};
use tgrmpt::report::MetricReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tgrmpt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, preset: &str) -> PathBuf {
    let d = dir.join(preset);
    ok(&["synth", "--preset", preset, "--out", s(&d)]);
    d
}

fn track(data: &Path, out: &Path, extra: &[&str]) {
    let files: Vec<String> =
        ["det_wb.txt", "det_hs.txt", "emb_wb.bin", "emb_hs.bin"].iter().map(|f| s(&data.join(f)).to_string()).collect();
    let mut args = vec![
        "track",
        "--detections-wb",
        &files[0],
        "--detections-hs",
        &files[1],
        "--embeddings-wb",
        &files[2],
        "--embeddings-hs",
        &files[3],
        "--out",
        s(out),
    ];
    args.extend_from_slice(extra);
    ok(&args);
}

fn read_report(path: &Path) -> MetricReport {
    MetricReport::parse_tsv(&std::fs::read_to_string(path).unwrap(), path).unwrap()
}

#[test]
fn track_is_deterministic_and_logs_its_config() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), "same-cloth");
    let (a, b) = (tmp.path().join("a.txt"), tmp.path().join("b.txt"));
    track(&data, &a, &[]);
    track(&data, &b, &[]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let log = std::fs::read_to_string(tmp.path().join("a.txt.log")).unwrap();
    assert!(log.lines().any(|l| l == "tau=0.85"));
    assert!(log.lines().any(|l| l == "age=inf"));
}

#[test]
fn eval_of_ground_truth_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), "long-occlusion");
    let gt = load_ground_truth(&data.join("gt.txt")).unwrap();
    let res = tmp.path().join("res.txt");
    write_tracker_output(&gt.wb, &res).unwrap();
    let report = tmp.path().join("r.tsv");
    ok(&["eval", "--gt", s(&data.join("gt.txt")), "--res", s(&res), "--out", s(&report)]);
    let r = read_report(&report);
    for m in ["MOTA", "IDF1", "HOTA", "TGRHOTA"] {
        assert_eq!(r.value(m, "seq01"), Some(1.0), "{m}");
        assert_eq!(r.value(m, "ALL"), Some(1.0), "{m}");
    }
}

#[test]
fn finite_age_fragments_identities() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), "long-occlusion");
    let (inf, short) = (tmp.path().join("inf.txt"), tmp.path().join("30.txt"));
    track(&data, &inf, &[]);
    track(&data, &short, &["--age", "30"]);
    let ids_inf = load_tracker_output(&inf).unwrap().ids().len();
    let ids_30 = load_tracker_output(&short).unwrap().ids().len();
    assert!(ids_30 > ids_inf, "{ids_30} vs {ids_inf}");
}

#[test]
fn age_sweep_peaks_at_infinity() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("age.tsv");
    ok(&["ablate", "--preset", "long-occlusion", "--sweep", "age=10,30,100,inf", "--out", s(&out)]);
    let r = read_report(&out);
    let idf1 = |v: &str| r.value("IDF1", &format!("age={v}")).unwrap();
    for v in ["10", "30", "100"] {
        assert!(idf1("inf") > idf1(v), "age={v}");
    }
}

#[test]
fn tau_sweep_rises_then_levels() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tau.tsv");
    ok(&["ablate", "--preset", "same-cloth", "--sweep", "tau=0.3,0.5,0.7,0.85", "--out", s(&out)]);
    let r = read_report(&out);
    let h: Vec<f64> =
        ["0.3", "0.5", "0.7", "0.85"].iter().map(|t| r.value("HOTA", &format!("tau={t}")).unwrap()).collect();
    assert!(h[1] > h[0] + 0.05, "{h:?}");
    assert!(h[2] >= h[1] && h[3] >= h[2] - 1e-3, "{h:?}");
}

#[test]
fn usage_errors_exit_2_and_leave_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), "fig4");
    let out = tmp.path().join("o.txt");
    let r = run(&[
        "track",
        "--detections-wb",
        s(&data.join("det_wb.txt")),
        "--embeddings-wb",
        s(&data.join("emb_wb.bin")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("--detections-hs"));
    assert!(!out.exists());

    assert_eq!(run(&["ablate", "--preset", "fig4", "--sweep", "tau="]).status.code(), Some(2));
    assert_eq!(run(&["ablate", "--preset", "fig4", "--sweep", "speed=1"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--gt", "x"]).status.code(), Some(2));
    assert_eq!(run(&["track", "--bogus"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.txt");
    let r = run(&["eval", "--gt", s(&missing), "--res", s(&missing)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("nope.txt"));

    let bad = tmp.path().join("bad.txt");
    std::fs::write(&bad, "1,1,0,0,10\n").unwrap();
    let r = run(&["eval", "--gt", s(&bad), "--res", s(&bad)]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn fig4_synth_writes_scripted_results() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), "fig4");
    let out = tmp.path().join("r.tsv");
    let gt = s(&data.join("gt.txt")).to_string();
    ok(&[
        "eval",
        "--gt",
        &gt,
        "--res",
        s(&data.join("res_return.txt")),
        "--seq",
        "return",
        "--gt",
        &gt,
        "--res",
        s(&data.join("res_abandon.txt")),
        "--seq",
        "abandon",
        "--out",
        s(&out),
    ]);
    let r = read_report(&out);
    assert_eq!(r.value("AssA", "return"), r.value("AssA", "abandon"));
    assert!(r.value("TGRHOTA", "return").unwrap() > r.value("TGRHOTA", "abandon").unwrap());
}

#[test]
fn synth_seed_override_changes_data() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["synth", "--preset", "same-cloth", "--out", s(&a)]);
    ok(&["synth", "--preset", "same-cloth", "--seed", "12", "--out", s(&b)]);
    assert_ne!(std::fs::read(a.join("det_wb.txt")).unwrap(), std::fs::read(b.join("det_wb.txt")).unwrap());
    assert!(std::fs::read_to_string(b.join("spec.txt")).unwrap().contains("seed = 12"));
}
