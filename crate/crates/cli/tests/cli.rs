use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gpe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpe"))
        .args(args)
        .current_dir(dir)
        .env("GPE_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("spawn gpe")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn fig1(dir: &Path) -> &'static str {
    fs::write(dir.join("fig1.csv"), "value\n7\n4\n3\n5\n2\n1\n6\n").unwrap();
    "fig1.csv"
}

#[test]
fn profile_of_worked_example() {
    let d = TempDir::new().unwrap();
    let f = fig1(d.path());
    let v = stdout_json(&gpe(d.path(), &["profile", f, "-k", "3"]));
    let counts: Vec<&str> = ["123", "132", "213", "231", "312", "321"]
        .iter()
        .map(|p| v["counts"][p].as_str().unwrap())
        .collect();
    assert_eq!(counts, ["2", "0", "9", "4", "7", "13"]);

    let oracle = stdout_json(&gpe(
        d.path(),
        &["profile", f, "-k", "3", "--method", "oracle"],
    ));
    assert_eq!(oracle["counts"], v["counts"]);

    let csv = gpe(d.path(), &["profile", f, "-k", "3", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap(),
        "pattern,count\n123,2\n132,0\n213,9\n231,4\n312,7\n321,13\n"
    );
}

#[test]
fn identity_profile_and_monotone_entropy() {
    let d = TempDir::new().unwrap();
    let body: String = (1..=30).map(|i| format!("{i},{}\n", i * i)).collect();
    fs::write(d.path().join("up.csv"), body).unwrap();
    let v = stdout_json(&gpe(d.path(), &["profile", "up.csv", "-k", "3"]));
    assert_eq!(v["counts"]["123"], "4060");
    let e = stdout_json(&gpe(d.path(), &["entropy", "up.csv", "-k", "3"]));
    assert_eq!(e["kind"], "gpe");
    assert_eq!(e["normalized"].as_f64(), Some(0.0));
}

#[test]
fn validation_and_guard_exit_codes() {
    let d = TempDir::new().unwrap();
    let f = fig1(d.path());
    let out = gpe(d.path(), &["profile", f, "-k", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("order out of range"));
    assert!(out.stdout.is_empty());

    let out = gpe(d.path(), &["profile", "missing.csv", "-k", "3"]);
    assert_eq!(out.status.code(), Some(2));

    fs::write(d.path().join("bad.csv"), "1\n2\nx\n").unwrap();
    assert_eq!(
        gpe(d.path(), &["profile", "bad.csv", "-k", "2"])
            .status
            .code(),
        Some(2)
    );

    let body: String = (0..200).map(|i| format!("{}\n", (i * 37) % 101)).collect();
    fs::write(d.path().join("long.csv"), body).unwrap();
    let out = gpe(
        d.path(),
        &["profile", "long.csv", "-k", "5", "--guard", "1000"],
    );
    assert_eq!(out.status.code(), Some(3));

    let out = gpe(
        d.path(),
        &["entropy", f, "-k", "3", "--delay", "1", "--delays", "1..2"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pe_defaults_to_unit_delay() {
    let d = TempDir::new().unwrap();
    let f = fig1(d.path());
    let dflt = stdout_json(&gpe(d.path(), &["entropy", f, "--kind", "pe", "-k", "3"]));
    let one = stdout_json(&gpe(
        d.path(),
        &["entropy", f, "--kind", "pe", "-k", "3", "--delay", "1"],
    ));
    assert_eq!(dflt, one);
    assert_eq!(dflt["delay"], 1);
    assert!((dflt["normalized"].as_f64().unwrap() - 0.5887621559).abs() < 1e-9);

    let avg = stdout_json(&gpe(
        d.path(),
        &[
            "entropy", f, "--kind", "peavg", "-k", "3", "--delays", "1..2",
        ],
    ));
    assert_eq!(avg["delay"], serde_json::json!([1, 2]));
}

#[test]
fn sweep_writes_series() {
    let d = TempDir::new().unwrap();
    let f = fig1(d.path());
    let out = gpe(d.path(), &["sweep", f, "-k", "2", "-w", "4", "-o", "s.csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "s.csv");
    let csv = fs::read_to_string(d.path().join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,value");
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[1].starts_with("4,"));
}

#[test]
fn windowsize_recommends_argmin_to_twice() {
    let d = TempDir::new().unwrap();
    let out = gpe(
        d.path(),
        &[
            "windowsize",
            "--ramp-period",
            "60",
            "--realizations",
            "10",
            "--seed",
            "3",
            "-k",
            "3",
            "--min",
            "10",
            "--max",
            "60",
            "-o",
            "curve.csv",
        ],
    );
    let v = stdout_json(&out);
    let w = v["argmin"].as_u64().unwrap();
    assert_eq!(v["recommended"], serde_json::json!([w, 2 * w]));
    assert!((20..=40).contains(&w), "argmin {w}");
    let curve = fs::read_to_string(d.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 51);
}

#[test]
fn experiment_is_deterministic() {
    let d = TempDir::new().unwrap();
    fs::write(
        d.path().join("conv.cfg"),
        "# defaults apart from the series count\nexperiment = convergence\nseries = 10\n",
    )
    .unwrap();
    let run = |dir: &str| {
        let out = gpe(
            d.path(),
            &["experiment", "conv.cfg", "--seed", "42", "--out-dir", dir],
        );
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a.lines().count(), 3);
    assert_eq!(a.replace("a/", "b/"), b);
    for name in ["convergence_curves.csv", "convergence_summary.json"] {
        assert_eq!(
            fs::read(d.path().join("a").join(name)).unwrap(),
            fs::read(d.path().join("b").join(name)).unwrap()
        );
    }
    let curves = fs::read_to_string(d.path().join("a/convergence_curves.csv")).unwrap();
    let header: Vec<&str> = curves.lines().next().unwrap().split(',').collect();
    // five orders, GPE and PE each
    assert_eq!(header.len(), 1 + 5 * 2);
    assert!(header.contains(&"gpe_k6") && header.contains(&"pe_k2"));

    let summary: Value =
        serde_json::from_slice(&fs::read(d.path().join("a/convergence_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 42);
}

#[test]
fn failed_experiment_writes_nothing() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.cfg"), "experiment = noise\nperiod = 1\n").unwrap();
    let out = gpe(d.path(), &["experiment", "bad.cfg", "--out-dir", "out"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.path().join("out").exists());
}

#[test]
fn corrupt_cache_is_regenerated() {
    let d = TempDir::new().unwrap();
    let f = fig1(d.path());
    assert!(gpe(d.path(), &["profile", f, "-k", "4"]).status.success());
    let cache = fs::read_dir(d.path().join("cache"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let good = fs::read(&cache).unwrap();
    let mut bad = good.clone();
    let mid = bad.len() / 2;
    bad[mid] ^= 0x55;
    fs::write(&cache, &bad).unwrap();
    let out = gpe(d.path(), &["profile", f, "-k", "4"]);
    assert!(out.status.success());
    assert_eq!(fs::read(&cache).unwrap(), good);
}

#[test]
fn version_names_basis_and_rng() {
    let d = TempDir::new().unwrap();
    let out = gpe(d.path(), &["--version"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("basis version 1") && s.contains("xoshiro256**"));
}
