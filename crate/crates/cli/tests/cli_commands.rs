use std::fs;
use std::process::Command;

use sasaki_cli::run_command;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    run_command(std::iter::once("sasaki").chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> Value {
    let (code, text) = run(args);
    assert_eq!(code, 0, "{text}");
    serde_json::from_str(&text).unwrap()
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sasaki"))
}

#[test]
fn quotient_example() {
    let out = ok(&["join", "quotient", "--l1", "1", "--l2", "2", "--w", "3,1", "--v", "1,1"]);
    let p = &out["payload"];
    assert_eq!(p["r"], "1/2");
    assert_eq!((p["n"].as_i64(), p["m1"].as_u64(), p["m2"].as_u64()), (Some(1), Some(1), Some(1)));
    assert_eq!(out["input_echo"]["command"], "join quotient");
}

#[test]
fn scan_brackets_y21_root() {
    let out = ok(&["cone", "scan", "--base", "cp1", "--l1", "1", "--l2", "2", "--w", "3,1"]);
    let roots = out["payload"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0]["approx"].as_str().unwrap().starts_with("0.7675918"));
}

#[test]
fn bouquet_table_has_four_rows() {
    let out = ok(&["bouquet", "enumerate", "--chern-key", "8", "--l2", "1"]);
    let table = out["payload"]["table"].as_str().unwrap();
    assert_eq!(table.lines().filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit())).count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["join", "validate", "--l1", "1"]).0, 1);
    assert_eq!(run(&["extremal", "solve", "--snn", "1"]).0, 1);

    let (code, text) = run(&["join", "validate", "--l1", "1", "--l2", "3", "--w", "3,1"]);
    assert_eq!(code, 2);
    assert!(text.contains("gcd(l2, l1*w1*w2)"), "{text}");
    let (code, text) = run(&["join", "validate", "--l1", "1", "--l2", "1", "--w", "1,3"]);
    assert_eq!(code, 2, "{text}");
    assert_eq!(run(&["extremal", "einstein", "--base", "genus:2", "--w", "3,1"]).0, 2);
    assert_eq!(run(&["bouquet", "ypq", "--p", "4", "--q", "2"]).0, 2);

    assert_eq!(run(&["census", "run", "--config", "/nonexistent/census.json"]).0, 4);

    let (code, text) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(text.contains("census"));
}

#[test]
fn errors_are_json() {
    let (_, text) = run(&["join", "validate", "--l1", "1", "--l2", "3", "--w", "3,1"]);
    let err: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(err["error"], "validation");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn echo_reexecution_is_byte_identical() {
    for args in [
        &["cone", "scan", "--l1", "1", "--l2", "59", "--w", "7,1"][..],
        &["extremal", "csc", "--dn", "1", "--snn", "13/35", "--r", "1/2", "--m1", "7", "--m2", "5"],
        &["extremal", "einstein", "--w", "3,1", "--precision-bits", "80"],
        &["topology", "ring", "--p", "2", "--l1", "1", "--l2", "1", "--w", "2,1"],
        &["bouquet", "ypq", "--p", "7"],
    ] {
        let (code, first) = run(args);
        assert_eq!(code, 0, "{first}");
        let env: Value = serde_json::from_str(&first).unwrap();
        let argv: Vec<String> = env["input_echo"]["argv"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap().to_string())
            .collect();
        let (_, second) = run_command(std::iter::once("sasaki".to_string()).chain(argv));
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn precision_from_environment() {
    let args = ["cone", "scan", "--l1", "1", "--l2", "2", "--w", "3,1"];
    let out = binary().args(args).env("SASAKI_PRECISION_BITS", "40").output().unwrap();
    assert!(out.status.success());
    let env: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(env["payload"]["precision_bits"], 40);
    let argv = env["input_echo"]["argv"].as_array().unwrap();
    assert_eq!(argv[argv.len() - 2..], ["--precision-bits", "40"]);

    // the flag wins over the environment
    let out = binary()
        .args(args)
        .args(["--precision-bits", "48"])
        .env("SASAKI_PRECISION_BITS", "40")
        .output()
        .unwrap();
    let env: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(env["payload"]["precision_bits"], 48);

    let out = binary().args(args).env("SASAKI_PRECISION_BITS", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn binary_streams_and_exit_status() {
    let out = binary().args(["join", "validate", "--l1", "1", "--l2", "2", "--w", "3,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let out = binary().args(["join", "validate", "--l1", "1", "--l2", "3", "--w", "3,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y21.csv");
    let p = path.display().to_string();
    ok(&["cone", "scan", "--l1", "1", "--l2", "2", "--w", "3,1", "--csv", &p, "--samples", "50"]);
    let text = fs::read_to_string(&path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["t", "sign", "approx"]);
    assert_eq!(rdr.records().count(), 50);
    assert_eq!(run(&["cone", "scan", "--l1", "1", "--l2", "2", "--w", "3,1", "--csv", &p, "--samples", "1"]).0, 1);
}

#[test]
fn census_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        path.display().to_string()
    };

    // ranges are valid but no join in the box is admissible
    let empty = write(
        "empty.json",
        r#"{"base":"cp1","boxes":{"l1":[1,1],"l2":[3,3],"w1":[3,3],"w2":[1,1]},"tasks":["scan"],"output_dir":"empty"}"#,
    );
    let out = ok(&["census", "run", "--config", &empty]);
    assert_eq!(out["payload"]["summary"]["cells"], 0);
    let csv = fs::read_to_string(dir.path().join("empty/summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);

    let reversed = write(
        "reversed.json",
        r#"{"base":"cp1","boxes":{"l1":[2,1],"l2":[1,1],"w1":[1,1],"w2":[1,1]},"tasks":["scan"],"output_dir":"x"}"#,
    );
    assert_eq!(run(&["census", "run", "--config", &reversed]).0, 2);

    let low_bits = write(
        "bits.json",
        r#"{"base":"cp1","boxes":{"l1":[1,1],"l2":[1,1],"w1":[1,1],"w2":[1,1]},"tasks":["scan"],"precision_bits":16,"output_dir":"x"}"#,
    );
    assert_eq!(run(&["census", "run", "--config", &low_bits]).0, 2);

    let malformed = write("bad.json", "{ not json");
    assert_eq!(run(&["census", "run", "--config", &malformed]).0, 2);

    // per-cell failures are recorded, not fatal: genus 2 is not a positive
    // Einstein base
    let genus = write(
        "genus.json",
        r#"{"base":"sigma_2","boxes":{"l1":[1,1],"l2":[1,2],"w1":[2,3],"w2":[1,1]},"tasks":["scan","einstein"],"output_dir":"g"}"#,
    );
    let out = ok(&["census", "run", "--config", &genus]);
    assert!(out["payload"]["summary"]["cells"].as_u64().unwrap() > 0);
}

fn schema(name: &str) -> Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn required_present(schema: &Value, doc: &Value) {
    for key in schema["required"].as_array().unwrap() {
        let key = key.as_str().unwrap();
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    let props = schema["properties"].as_object().unwrap();
    if schema["additionalProperties"] == false {
        for key in doc.as_object().unwrap().keys() {
            assert!(props.contains_key(key), "undeclared {key}");
        }
    }
}

#[test]
fn shipped_schemas_describe_output() {
    let env = ok(&["cone", "scan", "--l1", "1", "--l2", "2", "--w", "3,1"]);
    required_present(&schema("result_envelope.schema.json"), &env);
    required_present(&schema("result_envelope.schema.json")["properties"]["input_echo"], &env["input_echo"]);
    required_present(&schema("scan_report.schema.json"), &env["payload"]);

    let cfg = sasaki_cli::census::CensusConfig::from_json(
        r#"{"base":"cp1","boxes":{"l1":[1,1],"l2":[1,1],"w1":[1,1],"w2":[1,1]},"tasks":["scan"],"output_dir":"o"}"#,
    )
    .unwrap();
    required_present(&schema("census_config.schema.json"), &serde_json::to_value(cfg).unwrap());
}
