use std::process::{Command, Output};

use serde_json::Value;

fn mixscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixscope"))
        .args(args)
        .env_remove("MIXSCOPE_BUDGET")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = mixscope(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn top_two_certificate() {
    let v = json(&[
        "sst-check", "--chain", "rtt", "--n", "4", "--t", "3", "--statistic", "top_k_order:2", "--predicate",
        "k_distinct:2",
    ]);
    assert_eq!(v["checks"]["certified"], true);
    assert_eq!(v["results"]["q"], "15/16");
    assert_eq!(v["results"]["sep_bound"], "1/16");
    assert_eq!(v["results"]["conditional"]["weights"].as_array().unwrap().len(), 12);
}

#[test]
fn walk1_counterexample() {
    let v = json(&["counterexample"]);
    assert_eq!(v["results"]["reflection_bound_unreduced"], "772/53248");
    assert_eq!(v["results"]["nonnegative_paths"], "252");
    assert_eq!(v["checks"]["claim_refuted"], true);
    assert_eq!(v["results"]["reflection_bound_is_exact"], false);
}

#[test]
fn alternating_cycle_mixes_after_one_step() {
    let v = json(&["cycle", "--coloring", "RBRB", "--horizon", "4"]);
    let sep = v["results"]["separation"].as_array().unwrap();
    assert_eq!(sep[0], "1/1");
    assert!(sep[1..].iter().all(|s| s == "0/1"));
    assert_eq!(v["results"]["k"], 1);
}

#[test]
fn explicit_sets_and_dominance() {
    let v = json(&[
        "cycle", "--coloring", "RRBRBBRRBRBB", "--horizon", "60", "--sets", "0,2,3,5,6,8,9,11;1,4,7,10",
        "--chebyshev", "2", "--dominance",
    ]);
    assert_eq!(v["checks"]["separation_le_coverage_tail"], true);
    assert_eq!(v["checks"]["red_dominance"], true);
}

#[test]
fn decompose_reports_gaps() {
    let v = json(&["decompose", "--coloring", "RRBBRB", "--minimality"]);
    assert_eq!(v["results"]["k"], 2);
    assert_eq!(v["checks"]["alternating_partition"], true);
    assert_eq!(v["checks"]["gap_le_2k_minus_1"], false);
    assert_eq!(v["checks"]["chain_gap_le_2k_minus_1"], true);
}

#[test]
fn parity_separation_over_time() {
    let v = json(&["stat-mix", "--chain", "rtt", "--n", "5", "--t", "2", "--statistic", "parity"]);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows[1]["separation"], "1/5");
    assert_eq!(rows[2]["separation"], "1/25");
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "sst-check", "--chain", "rtt", "--n", "6", "--t", "5", "--statistic", "top_card", "--predicate", "all_chosen",
        "--samples", "5000", "--seed", "9",
    ];
    let a = mixscope(&args);
    let b = mixscope(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let exact = ["cycle", "--coloring", "RRBRBB", "--horizon", "30"];
    assert_eq!(mixscope(&exact).stdout, mixscope(&exact).stdout);
}

#[test]
fn samples_without_seed_is_a_usage_error() {
    let out = mixscope(&[
        "sst-check", "--chain", "rtt", "--n", "4", "--t", "2", "--statistic", "top_card", "--predicate", "always",
        "--samples", "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
}

#[test]
fn bad_arguments_are_usage_errors() {
    let out = mixscope(&["decompose", "--coloring", "RRB"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mixscope(&["stat-mix", "--chain", "shuffle", "--n", "4", "--t", "1", "--statistic", "top_card"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"]["kind"], "usage");
}

#[test]
fn oversized_enumeration_is_a_capacity_error() {
    let out = mixscope(&[
        "sst-check", "--chain", "rtt", "--n", "8", "--t", "9", "--statistic", "top_card", "--predicate", "always",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = error_of(&out);
    assert_eq!(err["error"]["kind"], "capacity");
    assert!(err["error"]["message"].as_str().unwrap().contains("--samples"));
}

#[test]
fn budget_comes_from_the_environment() {
    let args = [
        "sst-check", "--chain", "rtt", "--n", "4", "--t", "3", "--statistic", "top_card", "--predicate", "always",
    ];
    let run = |budget: &str| {
        Command::new(env!("CARGO_BIN_EXE_mixscope"))
            .args(args)
            .env("MIXSCOPE_BUDGET", budget)
            .output()
            .unwrap()
    };
    assert_eq!(run("63").status.code(), Some(3));
    assert!(run("64").status.success());
    assert_eq!(run("lots").status.code(), Some(2));
}

#[test]
fn csv_output_flattens_laws() {
    let out = mixscope(&[
        "sst-check", "--chain", "riffle", "--n", "3", "--t", "2", "--statistic", "top_card", "--predicate",
        "all_strings_distinct", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["section", "key", "value"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let conditional: Vec<_> = rows.iter().filter(|r| &r[0] == "results.conditional").collect();
    assert_eq!(conditional.len(), 3);
    assert!(conditional.iter().all(|r| &r[2] == "1/3"));
}

#[test]
fn float_flag_converts_rationals() {
    let v = json(&["stat-mix", "--chain", "rtt", "--n", "3", "--t", "1", "--statistic", "parity", "--float"]);
    assert_eq!(v["results"]["rows"][1]["separation"].as_f64(), Some(1.0 / 3.0));
    assert_eq!(v["results"]["final_law"]["mode"], "float");
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = mixscope(&["decompose", "--coloring", "RBRB", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["k"], 1);
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&["decompose", "--coloring", "RBRB"]);
    assert!(plain.get("duration_ms").is_none());
    let timed = json(&["decompose", "--coloring", "RBRB", "--timing"]);
    assert!(timed["duration_ms"].is_number());
}
