// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use bd_cutoff_testkit::chains::{random_monotone_chain, rng};

fn bdcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdcut"))
        .args(args)
        .output()
        .expect("bdcut runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bdcut(args);
    assert!(
        out.status.success(),
        "bdcut {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Data rows of a CSV table as numbers, skipping the header and comments.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split(',').map(|v| v.parse().expect("number")).collect())
        .collect()
}

fn write_chain(dir: &Path, seed: u64, m: usize) -> String {
    let chain = random_monotone_chain(&mut rng(seed), m, 0.1, 0.5);
    let path = dir.join(format!("chain{seed}.json"));
    std::fs::write(&path, chain.to_json()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn spectrum_of_small_bernoulli_laplace() {
    let text = stdout(&["spectrum", "--family", "bernoulli-laplace", "--n", "4", "--r", "2"]);
    assert_eq!(text, "index,lambda\n1,1\n2,1.5\n");
}

#[test]
fn mix_time_lies_in_bracket() {
    let text = stdout(&["mix-time", "--family", "srw", "--n", "10", "--eps", "0.25", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let tau = v["tau"].as_f64().unwrap();
    let (t, sigma) = (v["mean_hit"].as_f64().unwrap(), v["window"].as_f64().unwrap());
    assert!(t - sigma / 3f64.sqrt() <= tau && tau <= t + 3f64.sqrt() * sigma);
    let csv = stdout(&["mix-time", "--family", "srw", "--n", "10"]);
    assert_eq!(csv_rows(&csv)[0][1], tau);
}

#[test]
fn sep_curve_starts_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write_chain(dir.path(), 1, 12);
    let text = stdout(&["sep-curve", "--chain", &chain, "--t", "0"]);
    assert_eq!(text.lines().next(), Some("t,sep"));
    assert_eq!(csv_rows(&text), vec![vec![0.0, 1.0]]);
}

#[test]
fn spectrum_file_reproduces_chain_curve() {
    let dir = tempfile::tempdir().unwrap();
    for seed in [2, 3, 4] {
        let chain = write_chain(dir.path(), seed, 30);
        let spectrum = dir.path().join(format!("spectrum{seed}.csv"));
        stdout(&["spectrum", "--chain", &chain, "--out", spectrum.to_str().unwrap()]);
        let from_chain = csv_rows(&stdout(&["sep-curve", "--chain", &chain]));
        let from_spectrum =
            csv_rows(&stdout(&["sep-curve", "--spectrum", spectrum.to_str().unwrap()]));
        assert_eq!(from_chain.len(), from_spectrum.len());
        for (a, b) in from_chain.iter().zip(&from_spectrum) {
            assert!((a[0] - b[0]).abs() <= 1e-10 * a[0].max(1.0));
            assert!((a[1] - b[1]).abs() <= 1e-10, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn verbs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write_chain(dir.path(), 5, 20);
    for args in [
        vec!["spectrum", "--chain", &chain],
        vec!["sep-curve", "--chain", &chain, "--points", "11"],
        vec!["sep-curve", "--chain", &chain, "--mode", "discrete", "--t", "0,5,17"],
        vec!["mix-time", "--chain", &chain, "--eps", "0.1"],
        vec!["stats", "--chain", &chain],
        vec!["compare-distances", "--chain", &chain, "--t", "1,10,100"],
        vec!["profile", "--family", "bernoulli-laplace", "--n", "200", "--r", "20"],
    ] {
        assert_eq!(stdout(&args), stdout(&args), "{args:?}");
    }
}

#[test]
fn scan_is_independent_of_jobs() {
    let base = ["scan", "--family", "bernoulli-laplace", "--sizes", "10,20,40,80", "--n-ratio", "10"];
    let one = stdout(&[&base[..], &["--jobs", "1"]].concat());
    let four = stdout(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one, four);
    let v: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["verdict"], "cutoff");
    let sizes: Vec<u64> = v["points"].as_array().unwrap().iter().map(|p| p["m"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![10, 20, 40, 80]);
}

#[test]
fn scan_accepts_family_list() {
    let dir = tempfile::tempdir().unwrap();
    let specs = dir.path().join("specs.json");
    let list: Vec<_> = [10, 20, 40, 80]
        .iter()
        .map(|n| serde_json::json!({"kind": "srw_lazy_ends", "params": {"n": n}}))
        .collect();
    std::fs::write(&specs, serde_json::to_string(&list).unwrap()).unwrap();
    let text = stdout(&["scan", "--specs", specs.to_str().unwrap(), "--format", "csv"]);
    assert!(text.ends_with("# verdict=no-cutoff shape=n/a\n"), "{text}");
    assert_eq!(csv_rows(&text).len(), 4);
}

#[test]
fn compare_distances_orders_the_distances() {
    let text = stdout(&["compare-distances", "--family", "bernoulli-laplace", "--n", "4", "--r", "2", "--t", "0,1,3"]);
    assert_eq!(text.lines().next(), Some("t,sep,tv,l2"));
    for row in csv_rows(&text) {
        assert!(row[2] <= row[1] && row[2] <= 0.5 * row[3] + 1e-12);
    }
}

#[test]
fn exit_codes() {
    // Domain error: a row that does not sum to one.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"m": 1, "p": [0.5], "q": [0.5], "r": [0.2, 0.5]}"#).unwrap();
    let out = bdcut(&["spectrum", "--chain", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("bdcut: ") && err.lines().count() == 1, "{err}");

    // Invalid family parameters.
    let out = bdcut(&["spectrum", "--family", "bernoulli-laplace", "--n", "3", "--r", "2"]);
    assert_eq!(out.status.code(), Some(1));

    // Unparseable arguments and conflicting sources.
    assert_eq!(bdcut(&["spectrum", "--bogus"]).status.code(), Some(1));
    let out = bdcut(&["spectrum", "--family", "srw", "--n", "3", "--chain", "x.json"]);
    assert_eq!(out.status.code(), Some(1));

    // Missing input and unwritable output.
    let missing = dir.path().join("missing.json");
    assert_eq!(bdcut(&["spectrum", "--chain", missing.to_str().unwrap()]).status.code(), Some(2));
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let out = bdcut(&["spectrum", "--family", "srw", "--n", "3", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(bdcut(&["--help"]).status.code(), Some(0));
}
