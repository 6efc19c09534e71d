//! End-to-end tests of the binary: output values, formats, determinism,
//! and exit-code contract (0 verified/success, 1 refuted, 2 usage, 3
//! internal).

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .output()
        .expect("binary executes")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is one JSON document")
}

fn coeff_values(doc: &Value) -> Vec<String> {
    doc["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["c"].as_str().unwrap().to_string())
        .collect()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("siegel-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eisenstein_degree1_weight4_classical_coefficients() {
    let out = run(&["eisenstein", "--degree", "1", "--weight", "4", "--trace-bound", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(coeff_values(&json_of(&out)), ["1", "240", "2160", "6720"]);
}

#[test]
fn oracle_route_agrees_with_primitive_route() {
    let base = ["eisenstein", "--degree", "2", "--weight", "4", "--trace-bound", "2"];
    let prim = run(&[&base[..], &["--route", "primitive"]].concat());
    let orac = run(&[&base[..], &["--route", "oracle"]].concat());
    assert_eq!(prim.status.code(), Some(0));
    assert_eq!(orac.status.code(), Some(0));
    assert_eq!(coeff_values(&json_of(&prim)), coeff_values(&json_of(&orac)));
    // The oracle route is only defined in weight 4.
    let bad = run(&["eisenstein", "--degree", "2", "--weight", "6", "--trace-bound", "2", "--route", "oracle"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["eisenstein", "--degree", "2", "--weight", "6", "--trace-bound", "3"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    // And independent of the worker-thread count.
    let pinned = run(&[&["--threads", "1"], &args[..]].concat());
    assert_eq!(pinned.stdout, first.stdout);
}

#[test]
fn theta_reads_gram_files_and_rejects_bad_ones() {
    let dir = scratch_dir("gram");
    let good = dir.join("disc7.json");
    fs::write(&good, r#"{"rank": 2, "twice_gram": [[2, 1], [1, 4]]}"#).unwrap();
    let out = run(&["theta", "--gram", good.to_str().unwrap(), "--degree", "1", "--trace-bound", "3"]);
    assert_eq!(out.status.code(), Some(0));
    // x^2 + xy + 2y^2 represents 1 twice, 2 four times, and misses 3.
    assert_eq!(coeff_values(&json_of(&out)), ["1", "2", "4", "0"]);

    let odd_diagonal = dir.join("bad.json");
    fs::write(&odd_diagonal, r#"{"rank": 2, "twice_gram": [[2, 1], [1, 3]]}"#).unwrap();
    let bad = run(&["theta", "--gram", odd_diagonal.to_str().unwrap(), "--degree", "1", "--trace-bound", "3"]);
    assert_eq!(bad.status.code(), Some(2));

    let missing = run(&["theta", "--gram", dir.join("nope.json").to_str().unwrap(), "--degree", "1", "--trace-bound", "3"]);
    assert_eq!(missing.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn genus_enumerate_reports_classes_and_masses() {
    let out = run(&["genus", "enumerate", "--rank", "2", "--det2", "7", "--level-divides", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out).trim_end(),
        r#"{"class_count":1,"det2":7,"genera":[{"classes":[{"epsilon":4,"twice_gram":[[2,1],[1,4]]}],"det2":7,"level":7,"mass":"1/4"}],"level_divides":7,"proper_class_count":1,"rank":2}"#
    );
    let quaternary = run(&["genus", "enumerate", "--rank", "4", "--det2", "49", "--level-divides", "7"]);
    let doc = json_of(&quaternary);
    assert_eq!(doc["class_count"], 1);
    assert_eq!(doc["genera"][0]["classes"][0]["epsilon"], 32);
    assert_eq!(doc["genera"][0]["mass"], "1/32");
}

#[test]
fn bernoulli_values_plain_and_twisted() {
    let plain = run(&["bernoulli", "--k", "4"]);
    assert_eq!(json_of(&plain)["value"], "-1/30");
    let twisted = run(&["bernoulli", "--k", "3", "--chi", "p:7"]);
    assert_eq!(json_of(&twisted)["value"], "48/7");
    let malformed = run(&["bernoulli", "--k", "3", "--chi", "q:7"]);
    assert_eq!(malformed.status.code(), Some(2));
}

#[test]
fn regular_prime_reports() {
    let regular = run(&["regular", "--p", "7"]);
    assert_eq!(stdout_of(&regular).trim_end(), r#"{"p":7,"regular":true}"#);
    let irregular = run(&["regular", "--p", "37"]);
    assert_eq!(
        stdout_of(&irregular).trim_end(),
        r#"{"p":37,"regular":false,"smallest_irregular_index":32}"#
    );
}

#[test]
fn verify_main_exits_zero_and_echoes_parameters() {
    let out = run(&[
        "verify", "main", "--k", "1", "--j", "1", "--p", "7", "--m", "1", "--degree", "1",
        "--trace-bound", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["verified"], true);
    assert_eq!(doc["constant_term_exact"], true);
    assert!(doc["achieved_order"].as_i64().map_or(true, |v| v >= 1));
    assert_eq!(doc["params"]["k"], 1);
    assert_eq!(doc["params"]["p"], 7);
    assert_eq!(doc["params"]["mode"], "main");
    assert_eq!(doc["params"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_main_tsv_format() {
    let out = run(&[
        "verify", "main", "--k", "1", "--j", "1", "--p", "7", "--m", "1", "--degree", "1",
        "--trace-bound", "5", "--format", "tsv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("achieved_order\t"));
    assert!(text.lines().any(|l| l == "verified\ttrue"));
}

#[test]
fn verify_up_and_up_theta() {
    let up = run(&[
        "verify", "up", "--k", "1", "--j", "1", "--p", "7", "--m", "1", "--degree", "1",
        "--trace-bound", "14",
    ]);
    assert_eq!(up.status.code(), Some(0));
    assert_eq!(json_of(&up)["params"]["mode"], "up");

    let dec = run(&["verify", "up-theta", "--rank", "2", "--p", "7", "--e", "2", "--degree", "2"]);
    assert_eq!(dec.status.code(), Some(0));
    let doc = json_of(&dec);
    assert_eq!(doc["verified"], true);
    assert_eq!(doc["integral"], true);
    assert_eq!(doc["deep_levels_vanish"], true);
    assert_eq!(doc["identity_holds"], true);
    assert_eq!(doc["alpha"][0][0], "1");
    assert_eq!(doc["alpha"][0][1], "0");
    assert_eq!(doc["forms"][1]["level"], 49);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let no_args = run(&[]);
    assert_eq!(no_args.status.code(), Some(2));
    let bad_subcommand = run(&["frobnicate"]);
    assert_eq!(bad_subcommand.status.code(), Some(2));
    let bad_degree = run(&["eisenstein", "--degree", "3", "--weight", "4", "--trace-bound", "2"]);
    assert_eq!(bad_degree.status.code(), Some(2));
    let missing_arg = run(&["verify", "main", "--k", "1"]);
    assert_eq!(missing_arg.status.code(), Some(2));
}

#[test]
fn seed_fixtures_writes_golden_files() {
    let dir = scratch_dir("fixtures");
    let out = run(&["--seed-fixtures", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let listed: Vec<String> = stdout_of(&out).lines().map(str::to_string).collect();
    assert!(!listed.is_empty());
    for path in &listed {
        assert!(PathBuf::from(path).is_file(), "listed fixture {path} missing");
    }
    for required in [
        "eisenstein_deg2_w4_b4.json",
        "theta_e8_deg2_b4.json",
        "verify_main_k1_j1_p7_m1_deg2_b5.json",
        "verify_main_k1_j1_p23_m1_deg2_b5.json",
        "verify_main_k2_j0_p7_m1_deg2_b4.json",
        "verify_up_k1_j1_p7_m1_deg2_b14.json",
        "up_theta_rank2_p7_e2_deg2.json",
        "genus_rank4_det49_level7.json",
    ] {
        assert!(dir.join(required).is_file(), "{required} not seeded");
    }
    // The seeded comparison must agree with a fresh run of the same command.
    let fresh = run(&[
        "verify", "main", "--k", "1", "--j", "1", "--p", "7", "--m", "1", "--degree", "2",
        "--trace-bound", "5",
    ]);
    assert_eq!(fresh.status.code(), Some(0));
    let golden = fs::read_to_string(dir.join("verify_main_k1_j1_p7_m1_deg2_b5.json")).unwrap();
    assert_eq!(stdout_of(&fresh).trim_end(), golden.trim_end());
    // The two expansions seeded for the weight-4 comparison agree exactly.
    let eis: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("eisenstein_deg2_w4_b4.json")).unwrap())
            .unwrap();
    let theta: Value =
        serde_json::from_str(&fs::read_to_string(dir.join("theta_e8_deg2_b4.json")).unwrap())
            .unwrap();
    assert_eq!(eis["coeffs"], theta["coeffs"]);
    fs::remove_dir_all(&dir).ok();
}
