//! Determinism acceptance check: every subcommand, run twice with the
//! same flags and seed, must produce byte-identical CSV output.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

fn run(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_horseshoe"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "horseshoe {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_same_bytes(a: &Path, b: &Path, label: &str) {
    let (ba, bb) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert!(!ba.is_empty(), "{label}: first run wrote nothing");
    assert_eq!(ba, bb, "{label}: duplicate-seed runs differ");
}

#[test]
fn criterion_11_duplicate_seed_runs_are_byte_identical() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();

    // A small deterministic observation column shared by estimate/gibbs.
    let mut input = String::from("y\n");
    for i in 0..30 {
        input.push_str(&format!("{}\n", (5.0 * (0.37 * i as f64).sin())));
    }
    fs::write(path("input.csv"), input).unwrap();

    let pairs: Vec<(&str, Vec<String>, Vec<String>)> = vec![
        (
            "estimate",
            vec!["estimate", "--input", &s(&path("input.csv")), "--output"]
                .into_iter()
                .map(String::from)
                .collect(),
            vec![s(&path("est1.csv")), s(&path("est2.csv"))],
        ),
        (
            "simulate",
            [
                "simulate", "--n", "50", "--p", "5", "--A-range", "1..2", "--estimators",
                "eb,fixed:0.1,gibbs:150:50", "--replicates", "3", "--seed", "99", "--output",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            vec![s(&path("sim1.csv")), s(&path("sim2.csv"))],
        ),
        (
            "verify",
            vec!["verify", "--suite", "asymptotics", "--output"]
                .into_iter()
                .map(String::from)
                .collect(),
            vec![s(&path("ver1.csv")), s(&path("ver2.csv"))],
        ),
        (
            "rates",
            [
                "rates", "--n-list", "50,100", "--replicates", "2", "--seed", "5", "--output",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            vec![s(&path("rat1.csv")), s(&path("rat2.csv"))],
        ),
    ];

    for (label, args, outputs) in &pairs {
        for out in outputs {
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.push(out);
            run(&full);
        }
        assert_same_bytes(Path::new(&outputs[0]), Path::new(&outputs[1]), label);
    }

    // Gibbs names its outputs from a prefix, so it gets its own loop.
    for prefix in ["g1", "g2"] {
        run(&[
            "gibbs",
            "--input",
            &s(&path("input.csv")),
            "--iterations",
            "250",
            "--burn-in",
            "50",
            "--seed",
            "7",
            "--output-prefix",
            &s(&path(prefix)),
        ]);
    }
    for suffix in ["theta_mean", "tau_samples"] {
        assert_same_bytes(
            &path(&format!("g1_{suffix}.csv")),
            &path(&format!("g2_{suffix}.csv")),
            "gibbs",
        );
    }

    assert!(t.elapsed() < Duration::from_secs(60), "determinism check over budget");
    println!(
        "PASS criterion 11 (determinism): estimate, simulate, gibbs, verify, rates all byte-identical across duplicate-seed runs, {:.2?}",
        t.elapsed()
    );
}
