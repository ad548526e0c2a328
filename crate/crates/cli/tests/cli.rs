use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lamelab(args: &[&str]) -> Run {
    lamelab_env(args, None)
}

fn lamelab_env(args: &[&str], precision: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lamelab"));
    cmd.args(args).env_remove("LAMELAB_PRECISION");
    if let Some(p) = precision {
        cmd.env("LAMELAB_PRECISION", p);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut v: Vec<&str> = args.to_vec();
    v.extend(["--format", "json"]);
    let r = lamelab(&v);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).expect("valid json")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "schemas", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let s: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn assert_valid(v: &jsonschema::Validator, x: &Value) {
    let errs: Vec<String> = v.iter_errors(x).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errs.is_empty(), "{errs:?}\n{x:#}");
}

fn records(v: &Value) -> &Vec<Value> {
    v["records"].as_array().unwrap()
}

#[test]
fn triples_examples() {
    let r = lamelab(&["triples", "--order", "11"]);
    assert_eq!(r.code, 0);
    let rows: Vec<&str> = r.stdout.lines().skip(1).filter(|l| !l.contains("classes")).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[2].split_whitespace().take(3).collect::<Vec<_>>(), vec!["1", "5", "5"]);
    assert!(r.stdout.contains("5 classes of order 11"));
    let v = json(&["triples", "--order", "6"]);
    assert_eq!(v["count"], 0);
    assert!(records(&v).is_empty());
    let v = json(&["triples", "--order", "12"]);
    assert_eq!(records(&v).len(), 3);
    let csv = lamelab(&["triples", "--order", "7", "--format", "csv"]);
    assert_eq!(csv.stdout, "a,b,c,signature\n1,1,5,1\n1,3,3,1\n");
}

#[test]
fn bad_examples() {
    let v = json(&["bad", "--order", "13", "--prime", "3"]);
    let bs: Vec<u64> = records(&v).iter().map(|r| r["b"].as_u64().unwrap()).collect();
    assert_eq!(bs, vec![2, 5]);
    assert!(records(&v).iter().all(|r| r["d"] == 1));

    let r = lamelab(&["bad", "--order", "9", "--prime", "2"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("all good reduction"), "{}", r.stdout);
    assert!(r.stdout.contains("cor-5.3"));

    let v = json(&["bad", "--order", "10"]);
    assert_eq!(v["bad_primes"], serde_json::json!([2, 3]));
    assert!(v["command"].as_str().unwrap().contains("--pmax 50"));
}

#[test]
fn solve_examples() {
    let v = json(&["solve", "--order", "5", "--prime", "3", "--b", "1"]);
    let rep = &records(&v)[0];
    assert_eq!(rep["precision"], 40);
    assert_eq!(rep["roots"][0]["vj"], "-5/1");
    // 20480/243 = 3^{-5}·20480 and 20480 = 2·1·1·2·0·0·1 in base 3 from the bottom
    assert!(rep["roots"][0]["j_digits"].as_str().unwrap().starts_with("v=-5;digits=2,1,1,2,0,0,1,0,0,1,0"));

    let v = json(&["solve", "--order", "14", "--prime", "5", "--b", "2"]);
    let rep = &records(&v)[0];
    assert_eq!(rep["type"]["bprime"], 1);
    assert_eq!(rep["type"]["d"], 2);
    assert_eq!(rep["moduli"]["degree"], 1);

    let r = lamelab(&["solve", "--order", "12", "--prime", "7", "--b", "1"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("v_p(n-2b) > v_p(2n)"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn precision_from_environment() {
    let r = lamelab_env(&["solve", "--order", "5", "--prime", "3", "--b", "1", "--format", "json"], Some("25"));
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(records(&v)[0]["precision"], 25);
    // the flag wins over the environment
    let r = lamelab_env(&["solve", "--order", "5", "--prime", "3", "--b", "1", "--precision", "30", "--format", "json"], Some("25"));
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(records(&v)[0]["precision"], 30);
    assert_eq!(lamelab_env(&["solve", "--order", "5", "--prime", "3", "--b", "1"], Some("zero")).code, 2);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["triples"],
        vec!["triples", "--order", "0"],
        vec!["triples", "--order", "x"],
        vec!["bad", "--order", "2"],
        vec!["bad", "--order", "9", "--prime", "4"],
        vec!["solve", "--order", "5", "--prime", "3"],
        vec!["solve", "--order", "5", "--prime", "3", "--b", "1", "--precision", "0"],
        vec!["solve", "--order", "5", "--prime", "3", "--b", "1", "--precision", "401"],
        vec!["solve", "--order", "5", "--prime", "3", "--b", "1", "--zeta-index", "1"],
        vec!["table", "--min", "2", "--max", "5"],
        vec!["table", "--min", "9", "--max", "8"],
        vec!["table", "--min", "90", "--max", "101"],
        vec!["verify", "--order", "1"],
        vec!["series", "--kind", "theta"],
        vec!["frobnicate"],
        vec!["triples", "--order", "5", "--format", "xml"],
    ] {
        let r = lamelab(&args);
        assert_eq!(r.code, 2, "{args:?}: {}{}", r.stdout, r.stderr);
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(lamelab(&["--help"]).code, 0);
    assert_eq!(lamelab(&["--version"]).code, 0);
}

#[test]
fn criterion_failures_exit_3() {
    for args in [["5", "3", "2"], ["12", "7", "1"], ["10", "5", "1"], ["8", "2", "1"]] {
        let r = lamelab(&["solve", "--order", args[0], "--prime", args[1], "--b", args[2]]);
        assert_eq!(r.code, 3, "{args:?}");
    }
}

#[test]
fn table_golden_comparison() {
    let r = lamelab(&["table", "--min", "12", "--max", "20"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let warnings: Vec<&str> = r.stdout.lines().filter(|l| l.starts_with("WARNING")).collect();
    assert_eq!(warnings.len(), 1, "{warnings:?}");
    assert!(warnings[0].contains("KNOWN-DISCREPANCY") && warnings[0].contains("n = 13 p = 3 b = 2"));
    assert!(!r.stdout.contains("MISMATCH"));

    let v = json(&["table", "--min", "5", "--max", "11"]);
    assert!(v["warnings"].as_array().unwrap().is_empty(), "{:#}", v["warnings"]);
    assert_eq!(records(&v).len(), 12);

    let v = json(&["table", "--min", "21", "--max", "24"]);
    assert!(v["warnings"].as_array().unwrap().is_empty());
    assert!(v["notes"][0].as_str().unwrap().contains("no reference data"));
}

#[test]
fn verify_examples() {
    let r = lamelab(&["verify", "--order", "5"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.lines().skip(1).take_while(|l| !l.contains("passed")).all(|l| l.starts_with("PASS")));

    let v = json(&["verify", "--order", "13", "--prime", "3"]);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["flag"], 1);
    let flagged: Vec<&Value> = records(&v).iter().filter(|c| c["status"] == "FLAG").collect();
    assert_eq!(flagged[0]["check"], "golden-moduli");
    assert_eq!(flagged[0]["b"], 2);
    assert!(flagged[0]["detail"].as_str().unwrap().contains("KNOWN-DISCREPANCY"));

    let v = json(&["verify", "--order", "7"]);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["flag"], 0);
    let types: std::collections::BTreeSet<(u64, u64)> = records(&v)
        .iter()
        .filter(|c| c["check"] == "roots")
        .map(|c| (c["p"].as_u64().unwrap(), c["b"].as_u64().unwrap()))
        .collect();
    assert_eq!(types.into_iter().collect::<Vec<_>>(), vec![(3, 2), (5, 1)]);

    let v = json(&["verify", "--order", "9", "--prime", "2"]);
    assert_eq!(v["summary"]["pass"], 0);
    assert_eq!(v["summary"]["fail"], 0);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["bad", "--order", "20", "--format", "json"],
        vec!["table", "--min", "12", "--max", "16", "--format", "csv"],
        vec!["solve", "--order", "13", "--prime", "3", "--b", "5", "--format", "json"],
        vec!["verify", "--order", "15", "--format", "json"],
    ] {
        let a = lamelab(&args);
        let b = lamelab(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.code, b.code);
    }
}

#[test]
fn json_outputs_match_schemas() {
    let env = schema("envelope.schema.json");
    let check = |args: &[&str], rec: &str| {
        let v = json(args);
        assert_valid(&env, &v);
        let s = schema(rec);
        for r in records(&v) {
            assert_valid(&s, r);
        }
    };
    check(&["triples", "--order", "13"], "triple.schema.json");
    check(&["bad", "--order", "15"], "bad_record.schema.json");
    check(&["bad", "--order", "9", "--prime", "2"], "bad_record.schema.json");
    check(&["solve", "--order", "5", "--prime", "3", "--b", "1"], "solve_report.schema.json");
    check(&["solve", "--order", "15", "--prime", "3", "--b", "3"], "solve_report.schema.json");
    check(&["solve", "--order", "13", "--prime", "3", "--b", "5", "--precision", "20"], "solve_report.schema.json");
    check(&["table", "--min", "12", "--max", "14"], "table_row.schema.json");
    check(&["verify", "--order", "8"], "check.schema.json");
    check(&["series", "--kind", "delta", "--terms", "12"], "series.schema.json");
    check(&["series", "--kind", "j", "--terms", "4"], "series.schema.json");
    check(&["series", "--kind", "e4", "--terms", "4"], "series.schema.json");
}

#[test]
fn series_dump() {
    let v = json(&["series", "--kind", "delta", "--terms", "5"]);
    let cs: Vec<&str> = records(&v)[0]["coefficients"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(cs, vec!["0", "1", "-24", "252", "-1472", "4830"]);
    let v = json(&["series", "--kind", "j", "--terms", "1"]);
    assert_eq!(records(&v)[0]["min_exponent"], -1);
    assert_eq!(records(&v)[0]["coefficients"][2], "196884");
}
