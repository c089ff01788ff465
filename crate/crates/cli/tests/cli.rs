use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclo"))
        .args(args)
        .env_remove("CYCLO_BUFFER_BUDGET")
        .output()
        .expect("binary runs")
}

fn envelope(args: &[&str]) -> Value {
    let out = cyclo(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON envelope")
}

fn code(args: &[&str]) -> i32 {
    cyclo(args).status.code().expect("exit code")
}

#[test]
fn height_examples() {
    let env = envelope(&["height", "105"]);
    assert_eq!(env["result"]["height"], 2);
    assert_eq!(env["command"], "height");
    assert!(env["version"].is_string());
    assert_eq!(env["budget_report"]["max_coeffs"], 20_000_000);
    assert_eq!(
        envelope(&["height", "--triple", "3", "7", "11"])["result"]["height"],
        1
    );
    assert_eq!(code(&["height", "0"]), 2);
    assert_eq!(code(&["height", "--triple", "3", "9", "11"]), 2);
    assert_eq!(code(&["height"]), 2);
}

#[test]
fn coeffs_csv_and_json() {
    let out = cyclo(&["coeffs", "15", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "0,1");
    assert_eq!(*lines.last().unwrap(), "8,1");

    let out = cyclo(&["coeffs", "15", "--format", "csv", "--header"]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("index,value\n0,1\n"));

    let out = cyclo(&["coeffs", "--triple", "3", "5", "7", "--format", "json"]);
    let arr: Vec<i64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(arr.len(), 49);
}

#[test]
fn coeffs_to_file() {
    let dir = std::env::temp_dir().join(format!("cyclo-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phi105.json");
    let env = envelope(&["coeffs", "105", "--out", path.to_str().unwrap()]);
    assert_eq!(env["result"]["length"], 49);
    assert_eq!(env["result"]["height"], 2);
    let arr: Vec<i64> = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(arr[7], -2);
    fs::remove_dir_all(&dir).unwrap();

    let missing = dir.join("no/such/dir/out.csv");
    assert_eq!(
        code(&["coeffs", "15", "--out", missing.to_str().unwrap()]),
        4
    );
}

#[test]
fn witness_examples() {
    let c = &envelope(&["witness", "2"])["result"];
    assert_eq!(
        (c["p"].as_u64(), c["q"].as_u64(), c["r"].as_u64()),
        (Some(3), Some(5), Some(23))
    );
    assert_eq!(c["case"], "EXACT_H");
    assert!(c["search_caps_used"]["p_cap"].is_null());

    let c = &envelope(&["witness", "1"])["result"];
    assert_eq!(
        (c["p"].as_u64(), c["q"].as_u64(), c["r"].as_u64()),
        (Some(31), Some(3), Some(5))
    );
    assert_eq!(c["computed_height"], 1);

    let c = &envelope(&["witness", "2", "--strict-larger-p"])["result"];
    assert_eq!(c["p"], 233);
    let h = c["computed_height"].as_u64().unwrap();
    assert!(h == 2 || h == 3);

    assert_eq!(code(&["witness", "4", "--q-cap", "20"]), 3);
    assert_eq!(code(&["witness", "0"]), 2);
}

#[test]
fn witness_scan_mode() {
    let hits = envelope(&["witness", "2", "--scan", "3"])["result"].clone();
    let hits = hits.as_array().unwrap();
    assert_eq!(hits.len(), 3);
    assert_eq!(hits[0]["p"], 233);
    for hit in hits {
        assert!(hit["case"] == "EXACT_H" || hit["case"] == "H_PLUS_ONE");
    }
}

#[test]
fn other_subcommands() {
    let seq = &envelope(&["jumpseq", "3", "7", "11", "--steps", "2"])["result"];
    let hs: Vec<u64> = seq["heights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(hs[0], 1);
    assert!(hs.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));

    assert_eq!(
        envelope(&["lemma2", "11"])["result"]["heights"],
        serde_json::json!([6, 7])
    );

    let count = &envelope(&["sparse", "count", "--x", "1000"])["result"]["count"];
    assert!(count["count"].is_u64());
    assert!(count["bound_ok"].is_boolean());

    let chain = &envelope(&["chain", "3", "7", "11", "--steps", "1"])["result"];
    assert_eq!(
        chain["elements"][1]["triple"],
        serde_json::json!([7, 11, 157])
    );
    assert_eq!(chain["elements"][1]["height"], 2);

    let ex = &envelope(&["explore-m", "3", "--q-max", "60", "--r-max", "60"])["result"];
    assert_eq!(ex["max_h"], 2);

    assert_eq!(
        envelope(&["lemma1", "5"])["result"]["computed"]["height"],
        3
    );
    assert_eq!(
        envelope(&["lemma4", "9", "0", "0"])["result"]["computed"]["height"],
        5
    );
    assert_eq!(envelope(&["reduce", "210"])["result"]["core"], 105);
    assert_eq!(envelope(&["probe", "7", "11", "3"])["result"]["h_base"], 1);
    assert_eq!(code(&["lemma2", "9"]), 2);
}

#[test]
fn sparse_dump_lines() {
    let out = cyclo(&["sparse", "dump", "--xmax", "30"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let values: Vec<u64> = lines.iter().map(|l| l["value"].as_u64().unwrap()).collect();
    assert_eq!(values, vec![5, 17, 23]);
    assert_eq!(lines[0]["tags"].as_array().unwrap().len(), 2);
}

#[test]
fn budgets_from_flag_env_and_config() {
    assert_eq!(
        code(&["--budget", "10", "height", "--triple", "101", "103", "107"]),
        3
    );

    let out = Command::new(env!("CARGO_BIN_EXE_cyclo"))
        .args(["height", "30030"])
        .env("CYCLO_BUFFER_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_cyclo"))
        .args(["--budget", "100000", "height", "30030"])
        .env("CYCLO_BUFFER_BUDGET", "10")
        .output()
        .unwrap();
    assert!(out.status.success());

    let dir = std::env::temp_dir().join(format!("cyclo-cfg-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("budget.toml");
    fs::write(&cfg, "[budget]\nmax_coeffs = 10\nap_steps = 7\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&["--config", cfg, "height", "30030"]), 3);
    let env = envelope(&["--config", cfg, "--budget", "100000", "height", "30030"]);
    assert_eq!(env["budget_report"]["max_coeffs"], 100_000);
    assert_eq!(env["budget_report"]["ap_steps"], 7);

    let bad = dir.join("bad.toml");
    fs::write(&bad, "max_coeffs = \"lots\"\n").unwrap();
    assert_eq!(code(&["--config", bad.to_str().unwrap(), "height", "5"]), 2);
    assert_eq!(
        code(&[
            "--config",
            dir.join("absent.toml").to_str().unwrap(),
            "height",
            "5"
        ]),
        4
    );
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_flags() {
    let env = envelope(&["--verify-oracle", "height", "105"]);
    assert_eq!(env["budget_report"]["oracle"]["checked"], 1);
    assert_eq!(
        env["budget_report"]["oracle"]["mismatches"],
        serde_json::json!([])
    );

    let env = envelope(&["--verify-oracle", "jumpseq", "3", "7", "11", "--steps", "2"]);
    assert_eq!(env["budget_report"]["oracle"]["checked"], 3);
    assert_eq!(env["budget_report"]["oracle"]["skipped"], 0);

    let env = envelope(&["--verify-oracle", "chain", "3", "7", "11", "--steps", "2"]);
    assert_eq!(env["budget_report"]["oracle"]["checked"], 2);
    assert_eq!(env["budget_report"]["oracle"]["skipped"], 1);

    let env = envelope(&["--use-oracle", "height", "--triple", "9", "11", "50"]);
    assert_eq!(env["result"]["height"], 5);
    assert_eq!(env["result"]["method"], "oracle");
}

#[test]
fn envelopes_are_reproducible() {
    let a = cyclo(&["witness", "3"]).stdout;
    let b = cyclo(&["witness", "3"]).stdout;
    assert_eq!(a, b);
    let a = cyclo(&["explore-m", "5", "--q-max", "40", "--r-max", "80"]).stdout;
    let b = cyclo(&["explore-m", "5", "--q-max", "40", "--r-max", "80"]).stdout;
    assert_eq!(a, b);
}
