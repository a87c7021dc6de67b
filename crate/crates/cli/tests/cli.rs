//! CLI behavior: exit codes and the small end-to-end pipeline.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rfexplain"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rfexplain-cli-{}-{name}", std::process::id()));
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bad_flag_is_usage_error() {
    let out = bin().args(["train", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_study_is_usage_error() {
    let out = bin().args(["repro", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_is_io_error() {
    let out = bin()
        .args([
            "train",
            "--data",
            "/no/such/file.csv",
            "--target",
            "y",
            "--task",
            "regression",
            "--out",
            "/tmp/never-written.json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_uci_file_is_io_error() {
    let dir = tmp_dir("wwq-missing");
    let out = bin()
        .args(["repro", "wwq", "--data"])
        .arg(dir.join("absent.csv"))
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn small_pipeline_round_trip() {
    let dir = tmp_dir("pipeline");
    let data = dir.join("toy.csv");
    let model = dir.join("model.json");
    let contrib = dir.join("contrib.json");

    let out = bin()
        .args(["simulate", "--n", "200", "--seed", "3", "--out"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = bin()
        .args(["train", "--data"])
        .arg(&data)
        .args([
            "--target",
            "target",
            "--ignore",
            "g_true",
            "--task",
            "regression",
            "--ntree",
            "25",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&model)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(model.exists());
    // manifest beside the model
    assert!(dir.join("model.json.manifest.json").exists());

    let out = bin()
        .args(["decompose", "--model"])
        .arg(&model)
        .args(["--data"])
        .arg(&data)
        .args(["--target", "target", "--ignore", "g_true", "--oob", "--out"])
        .arg(&contrib)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("max reconstruction residual") && stdout.contains("pass"),
        "{stdout}"
    );

    let out = bin()
        .args(["gov", "--model"])
        .arg(&model)
        .args(["--data"])
        .arg(&data)
        .args([
            "--target",
            "target",
            "--ignore",
            "g_true",
            "--feature",
            "x1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("x1"));

    std::fs::remove_dir_all(dir).ok();
}

/// Results are independent of the worker thread count.
#[test]
fn thread_count_does_not_change_results() {
    let dir = tmp_dir("threads");
    let data = dir.join("toy.csv");
    let model = dir.join("model.json");
    assert!(bin()
        .args(["simulate", "--n", "150", "--seed", "5", "--out"])
        .arg(&data)
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .args(["train", "--data"])
        .arg(&data)
        .args([
            "--target",
            "target",
            "--ignore",
            "g_true",
            "--task",
            "regression",
            "--ntree",
            "15",
            "--seed",
            "5",
            "--threads",
            "1",
            "--out",
        ])
        .arg(&model)
        .status()
        .unwrap()
        .success());
    let single = std::fs::read(&model).unwrap();
    for threads in ["2", "4"] {
        assert!(bin()
            .args(["train", "--data"])
            .arg(&data)
            .args([
                "--target",
                "target",
                "--ignore",
                "g_true",
                "--task",
                "regression",
                "--ntree",
                "15",
                "--seed",
                "5",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&model)
            .status()
            .unwrap()
            .success());
        assert_eq!(single, std::fs::read(&model).unwrap(), "{threads} threads");
    }
    // FF_THREADS is the env fallback
    assert!(bin()
        .env("FF_THREADS", "3")
        .args(["train", "--data"])
        .arg(&data)
        .args([
            "--target",
            "target",
            "--ignore",
            "g_true",
            "--task",
            "regression",
            "--ntree",
            "15",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&model)
        .status()
        .unwrap()
        .success());
    assert_eq!(single, std::fs::read(&model).unwrap());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn simulate_rejects_bad_rho() {
    let out = bin()
        .args([
            "simulate",
            "--n",
            "100",
            "--rho",
            "1.5",
            "--out",
            "/tmp/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

/// The wwq workflow end to end on a synthetic stand-in file: the pipeline
/// must run and reach its checks (which fail on fake data — exit 1), never
/// crash.
#[test]
fn wwq_workflow_runs_on_stand_in_data() {
    let dir = tmp_dir("wwq-standin");
    let file = dir.join("wine.csv");
    let mut text = String::from(
        "\"fixed acidity\";\"volatile acidity\";\"citric acid\";\"residual sugar\";\"chlorides\";\"free sulfur dioxide\";\"total sulfur dioxide\";\"density\";\"pH\";\"sulphates\";\"alcohol\";\"quality\"\n",
    );
    for i in 0..80 {
        let x = i as f64 / 10.0;
        text.push_str(&format!(
            "{};{};{};{};{};{};{};{};{};{};{};{}\n",
            7.0 + (x * 0.7).sin(),
            0.2 + 0.01 * (i % 7) as f64,
            0.3,
            1.0 + x,
            0.05,
            30.0 + x,
            100.0 + x,
            0.99 + 0.0001 * x,
            3.0 + 0.01 * (i % 5) as f64,
            0.5,
            9.0 + 0.2 * (i % 9) as f64,
            4 + (i % 5)
        ));
    }
    std::fs::write(&file, text).unwrap();
    let out = bin()
        .args(["repro", "wwq", "--data"])
        .arg(&file)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    // fake data cannot hit the published bands, but the workflow completes
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("oob explained variance"), "{stdout}");
    assert!(dir.join("out/manifest.json").exists());
    std::fs::remove_dir_all(dir).ok();
}

/// Same for the cmc workflow: headerless load, binary flags categorical,
/// simplex suite rendered.
#[test]
fn cmc_workflow_runs_on_stand_in_data() {
    let dir = tmp_dir("cmc-standin");
    let file = dir.join("cmc.data");
    let mut text = String::new();
    for i in 0..90 {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            20 + (i % 25),
            1 + (i % 4),
            1 + ((i / 2) % 4),
            i % 8,
            i % 2,
            (i / 3) % 2,
            1 + (i % 4),
            1 + ((i / 5) % 4),
            (i / 7) % 2,
            1 + (i % 3)
        ));
    }
    std::fs::write(&file, text).unwrap();
    let out = bin()
        .args(["repro", "cmc", "--data"])
        .arg(&file)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("oob error rate"), "{stdout}");
    // the simplex suite was rendered
    assert!(dir.join("out/simplex_pred_class.svg").exists());
    assert!(dir.join("out/aligned_n_children.svg").exists());
    std::fs::remove_dir_all(dir).ok();
}
