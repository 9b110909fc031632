use std::path::Path;
use std::process::{Command, Output};

use illusion_core::audio::{write_wav, AudioClip};

fn illusion(args: &[&str]) -> Output {
    illusion_in(args, None)
}

fn illusion_in(args: &[&str], config_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_illusion"));
    cmd.args(args).env_remove("ILLUSION_CONFIG");
    if let Some(p) = config_env {
        cmd.env("ILLUSION_CONFIG", p);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(illusion(&["--help"]).status.code(), Some(0));
    assert_eq!(illusion(&["--version"]).status.code(), Some(0));
    assert_eq!(illusion(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(illusion(&["plan"]).status.code(), Some(1));
    let oov = illusion(&["phonemize", "zzxqy"]);
    assert_eq!(oov.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&oov.stderr).contains("zzxqy"));
    assert_eq!(illusion(&["--lexicon", "/nonexistent/dict", "phonemize", "bat"]).status.code(), Some(2));
}

#[test]
fn phonemize_and_plan() {
    let o = illusion(&["phonemize", "Bat,", "worlds"]);
    assert_eq!(stdout(&o), "bat\tB AE T\nworlds\tW ER L D Z\n");
    let o = illusion(&["plan", "bat", "--confusions"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let pos = |w: &str| text.find(&format!("    {w}\t")).unwrap_or_else(|| panic!("{w} missing:\n{text}"));
    assert!(pos("vat") < pos("fat") && pos("fat") < pos("pat"));
    let o = illusion(&["plan", "see"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "see\tS IY\nnot attemptable\n");
}

#[test]
fn attemptable_counts() {
    let o = illusion(&["attemptable"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text.lines().filter(|l| l.ends_with(",true")).count(), 147);
}

#[test]
fn training_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    let o = illusion(&["synth-labels", "--seed", "3", "--out", labels.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = illusion(&[
            "train", "--data", labels.to_str().unwrap(), "--trials", "100", "--seed", "7", "--threads", threads,
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    assert_eq!(a, run("b.json", "1"));
    assert_eq!(a, run("c.json", "3"));

    let model = dir.path().join("a.json");
    let o = illusion(&["--model", model.to_str().unwrap(), "predict", "bat", "vat"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("word,prediction\nbat,"));
    let o = illusion(&["--model", model.to_str().unwrap(), "calibrate", "--data", labels.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_writes_one_file_per_factor() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("word.wav");
    let clip = AudioClip::new(
        (0..3200).map(|i| (i as f64 * 0.07).sin() * 0.5).collect(),
        16000,
    )
    .unwrap();
    write_wav(&input, &clip).unwrap();
    let out_dir = dir.path().join("out");
    let o = illusion(&[
        "audio", "sweep", input.to_str().unwrap(), "--factors", "1.3,1.5,1.7,1.9", "--cutoffs", "1000",
        "--attens", "-12", "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut files: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files.len(), 5);
    assert!(files.contains(&"manifest.csv".to_string()));
    assert_eq!(files.iter().filter(|f| f.ends_with(".wav")).count(), 4);
    let o = illusion(&["audio", "transform", "--factor", "4", input.to_str().unwrap(), "/tmp/never.wav"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("illusion.conf");
    std::fs::write(&cfg, "# sampling\nseed = 5\n").unwrap();
    let sample = |args: &[&str], env: Option<&Path>| {
        let mut full = args.to_vec();
        full.extend(["corpus", "sample", "--n", "20", "--top-k", "30"]);
        let o = illusion_in(&full, env);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let seed5 = sample(&["--seed", "5"], None);
    let seed9 = sample(&["--seed", "9"], None);
    assert_ne!(seed5, seed9);
    assert_eq!(sample(&["--config", cfg.to_str().unwrap()], None), seed5);
    assert_eq!(sample(&[], Some(&cfg)), seed5);
    assert_eq!(sample(&["--config", cfg.to_str().unwrap(), "--seed", "9"], None), seed9);
    assert_eq!(sample(&["--seed", "9"], Some(&cfg)), seed9);

    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = illusion_in(&["rules"], Some(&cfg));
    assert_eq!(o.status.code(), Some(2));
}
