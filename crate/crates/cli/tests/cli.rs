use std::path::Path;
use std::process::{Command, Output};

fn pumpnoise(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pumpnoise"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pumpnoise(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    pumpnoise(dir, args).status.code().expect("exit code")
}

/// Two noisy, linearly separable classes in three features.
fn write_patterns(path: &Path, n: usize) {
    let mut text = String::new();
    for i in 0..n {
        let label = if i % 2 == 0 { "+1" } else { "-1" };
        let shift = if i % 2 == 0 { 0.6 } else { -0.6 };
        let a = shift + ((i * 37) % 17) as f64 / 17.0 - 0.5;
        let b = ((i * 11) % 13) as f64 / 13.0 - 0.5;
        let c = ((i * 5) % 7) as f64 / 7.0;
        text.push_str(&format!("{label} 1:{a} 2:{b} 3:{c}\n"));
    }
    std::fs::write(path, text).unwrap();
}

/// `Accuracy = <number>% (<int>/<int>)`.
fn is_accuracy_line(line: &str) -> bool {
    let Some(rest) = line.strip_prefix("Accuracy = ") else {
        return false;
    };
    let Some((num, tail)) = rest.split_once("% (") else {
        return false;
    };
    let Some(frac) = tail.strip_suffix(')') else {
        return false;
    };
    let Some((c, t)) = frac.split_once('/') else {
        return false;
    };
    let digits = |s: &str| !s.is_empty() && s.chars().all(|ch| ch.is_ascii_digit());
    !num.is_empty() && num.chars().all(|ch| ch.is_ascii_digit() || ch == '.') && digits(c) && digits(t)
}

#[test]
fn grid_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_patterns(&d.join("train.sparse"), 60);
    ok(d, &["grid", "--train", "train.sparse", "--k", "5", "--seed", "0", "-o", "a.csv"]);
    ok(d, &["grid", "--train", "train.sparse", "--k", "5", "--seed", "0", "-o", "b.csv"]);
    let a = std::fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("C,gamma,accuracy"));
    assert_eq!(text.lines().count(), 1 + 11 * 10);

    ok(d, &["grid", "--train", "train.sparse", "--k", "5"]);
    assert!(d.join("train.sparse.grid.csv").exists());
}

#[test]
fn train_predict_and_cv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_patterns(&d.join("train"), 80);
    write_patterns(&d.join("test"), 21);
    let scaled = ok(d, &["scale", "-i", "train", "-o", "train.scale", "-s", "range1"]);
    assert!(!scaled.is_empty());
    ok(d, &["scale", "-i", "test", "-o", "test.scale", "-r", "range1"]);
    ok(d, &["train", "-i", "train.scale", "-c", "4", "-k", "linear"]);
    assert!(d.join("train.scale.model").exists());

    let stdout = ok(d, &["predict", "test.scale", "train.scale.model", "out"]);
    let line = stdout.trim_end();
    assert!(is_accuracy_line(line), "{line:?}");
    assert!(line.ends_with("/21)"), "{line:?}");
    let predictions = std::fs::read_to_string(d.join("out")).unwrap();
    assert_eq!(predictions.lines().count(), 21);
    assert!(predictions.lines().all(|l| l == "1" || l == "-1"));

    let cv = ok(d, &["cv", "-i", "train.scale", "--k", "5", "-k", "linear"]);
    assert!(cv.starts_with("Cross Validation Accuracy = "), "{cv}");

    let config = ok(d, &["config"]);
    let parsed: serde_json::Value = serde_json::from_str(&config).unwrap();
    assert!(parsed.get("stft").is_some());
}

#[test]
fn synthetic_pipeline_finds_the_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "-o", "day.bin", "--duration", "3600", "--seed", "1", "--schedule", "600:1500,2400:3000"]);
    assert!(d.join("schedule.json").exists());
    ok(d, &["slice", "-i", "day.bin", "-o", "on.bin", "--start", "+700", "--end", "+1400"]);
    ok(d, &["slice", "-i", "day.bin", "-o", "off.bin", "--start", "+1600", "--end", "+2300"]);
    for name in ["on", "off", "day"] {
        ok(d, &["spectrogram", "-i", &format!("{name}.bin"), "-o", &format!("{name}.spec")]);
    }
    ok(d, &["featurize", "--pos", "on.spec", "--neg", "off.spec", "-o", "train"]);
    ok(d, &["scale", "-i", "train", "-o", "train.scale", "-s", "range1"]);
    ok(d, &["grid", "--train", "train.scale", "--k", "5", "--seed", "0", "--model", "train.scale.model"]);
    let summary = ok(
        d,
        &[
            "detect", "--spectrogram", "day.spec", "-m", "train.scale.model", "-r", "range1", "-p", "report",
            "--truth", "schedule.json",
        ],
    );
    let iou: f64 = summary
        .split("IoU ")
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| panic!("no IoU in {summary:?}"));
    assert!(iou >= 0.9, "{summary}");
    for suffix in [".json", ".spectrogram.dat", ".labels.dat"] {
        assert!(d.join(format!("report{suffix}")).exists());
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["train", "--bogus"]), 1);
    assert_eq!(code(d, &["nonsense"]), 1);
    assert_eq!(code(d, &["train", "-i", "missing.sparse"]), 2);
    assert_eq!(code(d, &["predict", "missing", "missing.model", "out"]), 2);

    std::fs::write(d.join("bad.sparse"), "+1 2:1 1:3\n").unwrap();
    assert_eq!(code(d, &["train", "-i", "bad.sparse"]), 1);
    std::fs::write(d.join("one_class.sparse"), "+1 1:1\n+1 1:2\n").unwrap();
    assert_eq!(code(d, &["train", "-i", "one_class.sparse"]), 1);
    assert_eq!(code(d, &["synth", "-o", "x.bin", "--duration", "10", "--schedule", "5:20"]), 1);
    assert_eq!(code(d, &["synth", "-o", "no/such/dir/x.bin", "--duration", "10"]), 2);

    assert_eq!(code(d, &["--help"]), 0);
    assert_eq!(code(d, &["--version"]), 0);
    for sub in [
        "slice", "downsample", "spectrogram", "featurize", "scale", "train", "cv", "grid", "predict", "detect", "synth",
        "config",
    ] {
        let out = pumpnoise(d, &[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{sub} --help");
    }
}
