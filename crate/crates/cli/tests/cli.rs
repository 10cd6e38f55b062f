use std::fs;
use std::path::Path;
use std::process::Command;

use stochvort::solver::Exponents;
use vmlab::config::ScenarioConfig;

fn vmlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_vmlab")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    vmlab(args).status.code().unwrap()
}

fn parse_csv(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "p = 1.8\nnoise.lamda = 7\n").unwrap();
    let out = vmlab(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2") && msg.contains("noise.lamda"), "{msg}");
}

#[test]
fn single_path_batch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&["mc", "--preset", "tail", "--paths", "1", "--out", dir.path().to_str().unwrap()]),
        2
    );
}

#[test]
fn large_data_is_refused_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = vmlab::config::builtin("linear_check")
        .unwrap()
        .replace("u0.relative_to_threshold = 0.5", "u0.norm32 = 100");
    let cfg = dir.path().join("big.cfg");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let args = ["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(code(&args), 3);
    assert!(out.join("smallness.txt").exists());
    let mut forced = args.to_vec();
    forced.push("--override-smallness");
    assert_eq!(code(&forced), 0);
}

#[test]
fn linear_run_decays_like_single_shell_heat_flow() {
    // Taylor-Green vorticity lives on |k|² = 3, so every norm decays as e^{−3t}.
    let dir = tempfile::tempdir().unwrap();
    let out = vmlab(&["solve", "--preset", "linear_check", "--seed", "9", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed = 9"));
    let rows = parse_csv(&dir.path().join("kato.csv"));
    let e = Exponents::new(1.8).unwrap();
    let unweight = |r: &[f64]| -> [f64; 4] {
        let t = r[0];
        let (v, g) = (e.value_weight(t), e.gradient_weight(t));
        [r[1] / v, r[2] / g, r[3] / g, r[4] / g]
    };
    let base = unweight(&rows[1]);
    for r in &rows[2..] {
        let decay = (-3.0 * (r[0] - rows[1][0])).exp();
        for (got, b) in unweight(r).iter().zip(base) {
            assert!((got / b - decay).abs() <= 1e-8, "t = {}: {} vs {}", r[0], got / b, decay);
        }
    }
}

#[test]
fn effective_config_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    assert_eq!(code(&["solve", "--preset", "linear_check", "--out", first.to_str().unwrap()]), 0);
    let effective = first.join("effective.cfg");
    let reparsed = ScenarioConfig::parse(&fs::read_to_string(&effective).unwrap()).unwrap();
    assert_eq!(reparsed.to_text(), fs::read_to_string(&effective).unwrap());
    assert_eq!(
        code(&["solve", "--config", effective.to_str().unwrap(), "--out", second.to_str().unwrap()]),
        0
    );
    for name in ["kato.csv", "contraction.csv", "pairings.csv", "velocity.csv", "smallness.txt"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (w, d) in [("1", &a), ("3", &b)] {
        let s = code(&["--workers", w, "mc", "--preset", "tail", "--paths", "20", "--out", d.to_str().unwrap()]);
        assert_eq!(s, 0);
    }
    for name in ["paths.csv", "tail.csv", "aggregate.txt", "noise_seed1_path7.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}
