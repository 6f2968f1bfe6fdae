use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gradflow");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn run_json(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("run.json")).unwrap()).unwrap()
}

fn blobs(dir: &Path, seed: &str) {
    ok(&["synth", "--seed", seed, "--out", p(dir)]);
}

#[test]
fn synth_default_and_repeat() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    blobs(&a, "9");
    blobs(&b, "9");
    let data = fs::read_to_string(a.join("data.csv")).unwrap();
    assert_eq!(data.lines().count(), 300);
    assert!(data.lines().all(|l| l.split(',').count() == 2));
    let mask = fs::read_to_string(a.join("mask.csv")).unwrap();
    assert_eq!(mask.lines().count(), 301);
    for f in ["data.csv", "mask.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn synth_rejects_nonpositive_stdev() {
    let tmp = tempfile::tempdir().unwrap();
    for blob in ["0,0:0:10", "0,0:-1:10"] {
        let out = run(&["synth", "--blob", blob, "--out", p(tmp.path())]);
        assert_eq!(out.status.code(), Some(4), "{blob}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("stdev"));
    }
    let out = run(&["synth", "--blob", "0,0:1", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cluster_three_blobs() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    blobs(&s, "1");
    let out = tmp.path().join("out");
    // k = 6 over-segments these blobs; see the README
    ok(&[
        "cluster", p(&s.join("data.csv")), "--neighbors", "20", "--smoothing-steps", "2",
        "--mask", p(&s.join("mask.csv")), "--out", p(&out),
    ]);
    let j = run_json(&out);
    assert_eq!(j["cluster_count"], 3);
    assert!(j["report"]["ari_labeled"].as_f64().unwrap() >= 0.95);
    assert_eq!(j["config"]["neighbors"], 20);
    assert!(j["sigma"].as_f64().unwrap() > 0.0);
    for f in ["labels.csv", "preservation.csv", "mixed.csv", "accuracy.txt", "breakdown.csv", "density.csv", "flow.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(!out.join("classmap.ppm").exists());
    assert_eq!(fs::read_to_string(out.join("accuracy.txt")).unwrap(), "100.0\n");
}

#[test]
fn cluster_defaults_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    blobs(tmp.path(), "2");
    let out = tmp.path().join("out");
    let res = ok(&["cluster", p(&tmp.path().join("data.csv")), "--out", p(&out)]);
    let j = run_json(&out);
    assert_eq!(j["config"]["neighbors"], 40);
    assert_eq!(j["config"]["smoothing_steps"], 38);
    assert_eq!(j["config"]["flow_direction"], "max");
    assert!(j["report"].is_null());
    assert!(!out.join("accuracy.txt").exists());
    assert!(String::from_utf8_lossy(&res.stderr).contains("no --mask"));
}

#[test]
fn kmeans_three_blobs_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    blobs(&s, "1");
    let mut labels = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        ok(&[
            "kmeans", p(&s.join("data.csv")), "--clusters", "3", "--seed", "1",
            "--mask", p(&s.join("mask.csv")), "--out", p(&out),
        ]);
        let j = run_json(&out);
        assert!(j["report"]["ari_labeled"].as_f64().unwrap() >= 0.95);
        assert_eq!(j["cluster_count"], 3);
        labels.push(fs::read(out.join("labels.csv")).unwrap());
        labels.push(fs::read(out.join("centroids.csv")).unwrap());
    }
    assert_eq!(labels[0], labels[2]);
    assert_eq!(labels[1], labels[3]);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.csv");
    let out = run(&["cluster", p(&missing), "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    let ragged = tmp.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();
    let out = run(&["kmeans", p(&ragged), "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    blobs(tmp.path(), "3");
    let data = tmp.path().join("data.csv");
    let out = run(&["kmeans", p(&data), "--clusters", "0", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["cluster", p(&data), "--neighbors", "300", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["cluster", p(&data), "--rows", "7", "--cols", "7", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["cluster", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(run(&["--help"]).status.success());

    let short = tmp.path().join("short.csv");
    fs::write(&short, "0\n1\n").unwrap();
    let out = run(&["kmeans", p(&data), "--mask", p(&short), "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn envi_input_class_map_and_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("cube");
    ok(&[
        "synth", "--kind", "mixture", "--rows", "20", "--cols", "25", "--bands", "12",
        "--materials", "4", "--envi", "--out", p(&s),
    ]);
    let cache = tmp.path().join("cache");
    let mask = s.join("mask.csv");
    let mut outputs = Vec::new();
    for (i, input) in [s.join("data.hdr"), s.join("data.hdr"), s.join("data.csv")].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let mut args = vec![
            "cluster", p(input), "-k", "15", "--cache-dir", p(&cache), "--out", p(&out),
            "--mask", p(&mask),
        ];
        if i == 2 {
            args.extend(["--rows", "20", "--cols", "25"]);
        }
        ok(&args);
        let j = run_json(&out);
        outputs.push((
            j["graph_cached"].as_bool().unwrap(),
            fs::read(out.join("labels.csv")).unwrap(),
            fs::read(out.join("classmap.ppm")).unwrap(),
        ));
    }
    assert!(!outputs[0].0);
    assert!(outputs[1].0);
    assert_eq!(outputs[0].1, outputs[1].1);
    assert_eq!(outputs[0].2, outputs[1].2);
    // the CSV keeps full precision, the cube is float32: a different digest
    assert!(!outputs[2].0);
    assert!(outputs[0].2.starts_with(b"P6\n25 20\n255\n"));
    assert_eq!(outputs[2].2.len(), outputs[0].2.len());
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 2);
}

#[test]
fn eval_matches_cluster_report() {
    let tmp = tempfile::tempdir().unwrap();
    let s = tmp.path().join("s");
    ok(&["synth", "--kind", "mixture", "--rows", "15", "--cols", "20", "--bands", "8", "--materials", "5", "--out", p(&s)]);
    let mask = s.join("mask.csv");
    let first = tmp.path().join("first");
    ok(&["kmeans", p(&s.join("data.csv")), "--clusters", "6", "--mask", p(&mask), "--out", p(&first)]);
    let second = tmp.path().join("second");
    let res = ok(&["eval", "--labels", p(&first.join("labels.csv")), "--mask", p(&mask), "--matched", "--out", p(&second)]);
    for f in ["preservation.csv", "mixed.csv", "accuracy.txt", "breakdown.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
    assert!(String::from_utf8_lossy(&res.stdout).contains("one-to-one"));
    let out = run(&["eval", "--labels", p(&first.join("labels.csv")), "--mask", p(&mask), "--mixed-threshold", "150", "--out", p(&second)]);
    assert_eq!(out.status.code(), Some(4));
}
