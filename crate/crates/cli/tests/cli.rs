use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use skew_cli::{run_cli, CliOutput, EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> CliOutput {
    run_cli(std::iter::once("skewring").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn decide_reports_open_question_for_henon() {
    let v = json(&["decide", &fixture("henon.spec")]);
    assert_eq!(v["exit_status"], 0);
    assert_eq!(v["result"]["outcome"], "Unknown");
    assert_eq!(v["result"]["question_tag"], "qn4");
    assert_eq!(v["result"]["trace"][0]["rule"], "R5");
    assert!(!v["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn decide_with_certificate_closes_the_question() {
    let out = run(&["decide", &fixture("henon.spec"), "--primitive", "false"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("verdict: Holds"), "{}", out.stdout);
}

#[test]
fn cycles_over_f2() {
    let v = json(&["cycles", &fixture("henon.spec"), "--prime", "2"]);
    assert_eq!(v["result"]["points"], 4);
    let hist = v["result"]["histogram"].as_object().unwrap();
    assert_eq!(hist.len(), 2);
    assert_eq!(hist["1"], 1);
    assert_eq!(hist["3"], 1);
}

#[test]
fn cycles_writes_csv() {
    let dir = std::env::temp_dir().join(format!("skewring-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("hist.csv");
    let out = run(&["cycles", &fixture("henon.spec"), "--prime", "3", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["length", "count"]);
    let total: u64 = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            r[0].parse::<u64>().unwrap() * r[1].parse::<u64>().unwrap()
        })
        .sum();
    assert_eq!(total, 9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn curve_through_points() {
    let out = run(&["curve", &fixture("henon.spec"), "--degree", "2", "--points", &fixture("parabola.points")]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("x^2 - y"), "{}", out.stdout);
    let out = run(&["curve", &fixture("henon.spec"), "--degree", "1", "--points", &fixture("triangle.points")]);
    assert!(out.stdout.starts_with("no curve"), "{}", out.stdout);
}

#[test]
fn matrix_units_pass() {
    let out = run(&["verify-matrix-units", "--n", "3"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("all identities hold: true"));
    let v = json(&["verify-matrix-units", "--n", "4", "--field", "Fp(5)"]);
    assert_eq!(v["result"]["all_hold"], true);
}

#[test]
fn special_and_modlab_commands() {
    let v = json(&["special", &fixture("scaling.spec"), "--a", "a", "--ideal", "I2", "--ideal", "x^4"]);
    let entries = v["result"]["entries"].as_array().unwrap();
    assert_eq!(entries[0]["least_n"], 2);
    assert_eq!(entries[1]["least_n"], 4);

    let v = json(&["modlab", "chain", &fixture("scaling.spec"), "--max", "5"]);
    assert_eq!(v["result"]["all_strict"], true);

    let out = run(&["modlab", "lattice", &fixture("scaling.spec"), "--generator", "x^3"]);
    assert!(out.stdout.contains("contraction ideal: (x^3)"), "{}", out.stdout);

    let out = run(&["modlab", "essential", &fixture("scaling.spec"), "--elem", "r*theta"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("nonzero element of V"), "{}", out.stdout);
}

#[test]
fn order_and_classify() {
    let v = json(&["order", &fixture("swap.spec")]);
    assert_eq!(v["result"]["outcome"], "Finite");
    assert_eq!(v["result"]["n"], 2);
    let v = json(&["order", &fixture("jordan.spec")]);
    assert_eq!(v["result"]["outcome"], "InfiniteCertified");
    let out = run(&["classify", &fixture("cyclotomic.spec")]);
    assert!(out.stdout.contains("TriangularIII"), "{}", out.stdout);
}

#[test]
fn exit_codes() {
    // malformed input, unreadable file and bad usage
    let dir = std::env::temp_dir().join(format!("skewring-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.spec");
    std::fs::write(&bad, "field Q\nring poly(x)\nauto x -> (x + 1\n").unwrap();
    let out = run(&["decide", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("3:"), "{}", out.stderr);
    assert_eq!(run(&["decide", "/nonexistent/x.spec"]).code, EXIT_INPUT);
    assert_eq!(run(&["no-such-command"]).code, EXIT_INPUT);
    assert_eq!(run(&["--help"]).code, EXIT_OK);

    // reduction mod p is only implemented from Q
    let cyclo = fixture("cyclotomic.spec");
    assert_eq!(run(&["cycles", &cyclo, "--prime", "7"]).code, EXIT_UNSUPPORTED);

    // exponent above the supported ceiling
    let big = dir.join("big.spec");
    std::fs::write(&big, "field Q\nring poly(x)\nauto x -> x^300\n").unwrap();
    assert_eq!(run(&["order", big.to_str().unwrap()]).code, EXIT_UNSUPPORTED);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_report_on_error() {
    let v = json(&["decide", "/nonexistent/x.spec"]);
    assert_eq!(v["exit_status"], EXIT_INPUT);
    assert!(v["error"].as_str().unwrap().contains("/nonexistent/x.spec"));
    assert_eq!(v["result"], Value::Null);
}

#[test]
fn binary_matches_library() {
    let exe = env!("CARGO_BIN_EXE_skewring");
    let spec = fixture("affine_f7.spec");
    let out = Command::new(exe).args(["--json", "decide", &spec]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let lib = run(&["--json", "decide", &spec]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), lib.stdout);

    let out = Command::new(exe).args(["decide", "/nonexistent/x.spec"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn stamp_only_when_requested() {
    let spec = fixture("negate.spec");
    let plain = json(&["decide", &spec]);
    assert!(plain.get("stamp").is_none());
    let stamped = json(&["--stamp", "decide", &spec]);
    assert!(stamped["stamp"].as_str().unwrap().starts_with("unix:"));
}

/// Replays the checked-in fuzz seeds through the same invariants the targets assert.
#[test]
fn fuzz_seeds_replay() {
    use skew_cli::spec::{parse_expr, parse_points, parse_spec};
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let seeds = |target: &str| -> Vec<Vec<u8>> {
        let mut files: Vec<_> = std::fs::read_dir(corpus.join(target)).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.into_iter().map(|p| std::fs::read(p).unwrap()).collect()
    };
    for data in seeds("parse_spec").iter().chain(&seeds("spec_roundtrip")) {
        let Ok(spec) = parse_spec(std::str::from_utf8(data).unwrap()) else { continue };
        assert_eq!(parse_spec(&spec.to_string()).unwrap(), spec);
    }
    for data in seeds("parse_expr") {
        if let Ok(e) = parse_expr(std::str::from_utf8(&data).unwrap()) {
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }
    let mut parsed = 0;
    for data in seeds("points_file") {
        let (&arity, rest) = data.split_first().unwrap();
        let arity = 1 + arity as usize % 3;
        if let Ok(points) = parse_points(std::str::from_utf8(rest).unwrap(), arity) {
            assert!(points.iter().all(|p| p.len() == arity));
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}
