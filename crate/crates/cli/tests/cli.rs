use std::path::Path;
use std::process::{Command, Output};

fn cmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmc"))
        .args(args)
        .env("CMC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("uni.csv");
    let out = cmc(&["simulate", "logistic-uni", "--seed", "3", "--out", s(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# preset=logistic-uni"));

    let res = dir.path().join("res");
    let out = cmc(&[
        "analyze", "--input", s(&csv), "--x", "x", "--y", "y", "--segment-length", "32", "--out", s(&res),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["surface_x_to_y.csv", "profile_y_to_x.csv", "ccm_x_to_y.csv", "summary.json"] {
        assert!(res.join(f).exists(), "missing {f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(res.join("summary.json")).unwrap()).unwrap();
    let fwd = summary["mean_strength_x_to_y"].as_f64().unwrap();
    let rev = summary["mean_strength_y_to_x"].as_f64().unwrap();
    assert!(fwd > 5.0 * rev, "{fwd} vs {rev}");
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    assert!(cmc(&["simulate", "logistic-circ", "--out", s(&csv)]).status.success());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = cmc(&["analyze", "--input", s(&csv), "--x", "x", "--y", "y", "--max-shift", "5", "--min-shift", "-5", "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("surface_x_to_y.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cmc(&["simulate", "no-such-preset", "--out", "x.csv"]).status.code(), Some(2));
    assert_eq!(cmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        cmc(&["simulate", "wilson-cowan-v1v4", "--out", s(&dir.path().join("w.csv"))]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("missing.csv");
    let out = dir.path().join("o");
    assert_eq!(
        cmc(&["analyze", "--input", s(&missing), "--x", "a", "--y", "b", "--out", s(&out)]).status.code(),
        Some(3)
    );

    let constant = dir.path().join("constant.csv");
    let mut text = String::from("# sample_rate=1\na,b\n");
    for i in 0..200 {
        text.push_str(&format!("1.0,{}\n", (i as f64 * 0.7).sin()));
    }
    std::fs::write(&constant, text).unwrap();
    assert_eq!(
        cmc(&["analyze", "--input", s(&constant), "--x", "a", "--y", "b", "--out", s(&out)]).status.code(),
        Some(4)
    );

    assert_eq!(
        cmc(&["analyze", "--input", s(&constant), "--x", "a", "--y", "b", "--dimension", "0", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_writes_tables_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmc(&["sweep", "coupling", "--values", "0,0.1", "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("coupling_summary.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}
