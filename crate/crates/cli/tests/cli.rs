use std::process::{Command, Output};

use serde_json::Value;

fn unital(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unital"))
        .args(args)
        .env_remove("UNITAL_BUDGET")
        .env_remove("UNITAL_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn count_matches_enumeration() {
    let out = unital(&["count", "--q", "2", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["formula"], "165");
    assert_eq!(v["result"]["enumerated"], 165);
    assert_eq!(v["passed"], true);
}

#[test]
fn count_degenerate_rank() {
    let out = unital(&["count", "--q", "2", "--n", "2", "--rank", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["enumerated"], 13);
}

#[test]
fn count_csv() {
    let out = unital(&["count", "--q", "3", "--n", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "q,n,rank,formula,enumerated\n3,3,4,280,280\n");
}

#[test]
fn bad_field_order_is_config_error() {
    let out = unital(&["count", "--q", "6", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime power"));
}

#[test]
fn zero_budget_is_config_error() {
    assert_eq!(unital(&["count", "--q", "2", "--n", "4", "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_mode_and_suite() {
    assert_eq!(unital(&["search", "--q", "2", "--n", "4", "--mode", "bogus"]).status.code(), Some(2));
    assert_eq!(unital(&["verify", "--suite", "bogus", "--q", "2", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn missing_argument_is_usage_error() {
    assert_eq!(unital(&["count", "--q", "2"]).status.code(), Some(2));
}

#[test]
fn verify_passing_suites() {
    for (suite, q, n) in [("sequences", "2", "12"), ("extremal", "2", "5"), ("incidence", "2", "4"), ("sections", "2", "4")] {
        let out = unital(&["verify", "--suite", suite, "--q", q, "--n", n]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["command"], "verify");
        assert_eq!(v["result"]["suite"], suite);
        assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn verify_sequences_csv_table() {
    let out = unital(&["verify", "--suite", "sequences", "--q", "3", "--n", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,n,A,B,U_n,U_n-2,cone0,cone1"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn extremal_q2_n4_fails_with_named_check() {
    let out = unital(&["verify", "--suite", "extremal", "--q", "2", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAILED: extremal"), "{stderr}");
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn triples_histogram_covers_every_triple() {
    let out = unital(&["search", "--q", "2", "--n", "4", "--mode", "triples", "--samples", "200", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let total: u64 = rdr.records().map(|r| r.unwrap()[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 6_550_610);
}

#[test]
fn output_is_deterministic_apart_from_timestamp() {
    let args = ["search", "--q", "2", "--n", "4", "--mode", "random", "--trials", "30", "--seed", "7"];
    let mut a = json(&unital(&args));
    let mut b = json(&unital(&args));
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    assert_eq!(a, b);
    let mut c = json(&unital(&["search", "--q", "2", "--n", "4", "--mode", "random", "--trials", "30", "--seed", "8"]));
    c.as_object_mut().unwrap().remove("timestamp");
    assert_ne!(a, c);
}

#[test]
fn random_search_report() {
    let out = unital(&["search", "--q", "3", "--n", "4", "--mode", "random", "--trials", "20", "--seed", "3"]);
    let v = json(&out);
    let r = &v["result"];
    assert_eq!(r["prng"], "ChaCha8");
    assert_eq!(r["trials"], 20);
    let hist_total: u64 = r["histogram"].as_object().unwrap().values().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(hist_total, 20);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("unital-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("count.json");
    let out = unital(&["count", "--q", "2", "--n", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["formula"], "45");
    std::fs::remove_dir_all(&dir).unwrap();
}
