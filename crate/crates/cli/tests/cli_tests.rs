//! End-to-end tests of the installed binary: output formats, exit codes,
//! defaults, and record round-tripping.

use loewner_cli::{ResultPayload, RunRecord};
use std::process::{Command, Output};

fn loewner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn loewner_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn parse_record(out: &Output) -> RunRecord {
    serde_json::from_str(&stdout_str(out)).expect("stdout parses as a run record")
}

#[test]
fn sigma32_record_round_trips() {
    let out = loewner(&["sigma32", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = parse_record(&out);
    assert_eq!(rec.command, "sigma32");

    let closed = rec.closed_form_value.expect("closed form echoed");
    assert!((closed - 0.1580301397).abs() <= 1e-8);
    match &rec.result {
        ResultPayload::Solver(s) => {
            assert!((s.value - closed).abs() <= 1e-6);
        }
        other => panic!("expected solver payload, got {other:?}"),
    }

    // parse(serialize(r)) == r, bitwise.
    let again: RunRecord =
        serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(again, rec);
}

#[test]
fn hessian_matches_frozen_values() {
    let out = loewner(&[
        "hessian", "--variant", "L", "--mu", "-0.1", "--nu", "0", "--M", "inf", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = parse_record(&out);
    let ResultPayload::Hessian(h) = &rec.result else {
        panic!("expected hessian payload");
    };
    assert!((h.hessian.fpp - -1.24941).abs() <= 1e-4);
    let det_check = h.hessian.fpp * h.hessian.fqq - h.hessian.fpq * h.hessian.fpq;
    assert!((h.det - det_check).abs() <= 1e-8);
    assert!(h.negative_definite);
    assert_eq!(rec.variant.as_deref(), Some("L"));

    let out = loewner(&["hessian", "--variant", "a4", "--M", "15", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = parse_record(&out);
    let ResultPayload::Hessian(h) = &rec.result else {
        panic!("expected hessian payload");
    };
    assert!((h.hessian.fpp - -9.060970663525).abs() <= 1e-6);
    assert!((h.hessian.fqq - -10.952999105095).abs() <= 1e-6);
    assert!((h.hessian.fpq - 9.856644214986).abs() <= 1e-6);
    assert!(h.negative_definite);
}

#[test]
fn explicit_defaults_match_implicit_run() {
    let implicit = loewner(&["sigma42", "--json"]);
    let explicit = loewner(&[
        "sigma42", "--steps", "20000", "--method", "rk4", "--tol", "1e-7", "--grid", "200",
        "--json",
    ]);
    assert_eq!(implicit.status.code(), Some(0));
    assert_eq!(explicit.status.code(), Some(0));
    let mut a = parse_record(&implicit);
    let mut b = parse_record(&explicit);
    // Wall time is the only field allowed to differ.
    a.wall_time = 0.0;
    b.wall_time = 0.0;
    assert_eq!(a, b);
}

#[test]
fn domain_check_exit_codes_follow_the_verdict() {
    let bad = loewner(&[
        "domain-check", "--variant", "L", "--mu", "-0.26", "--nu", "0", "--M", "inf",
    ]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(stdout_str(&bad).contains("admissible: false"));
    assert!(!bad.stderr.is_empty(), "diagnostic expected on stderr");

    let good = loewner(&[
        "domain-check", "--variant", "L", "--mu", "-0.24", "--nu", "0", "--M", "inf",
    ]);
    assert_eq!(good.status.code(), Some(0));
    assert!(stdout_str(&good).contains("admissible: true"));
}

#[test]
fn invalid_arguments_exit_2() {
    let out = loewner(&["sigma42", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = loewner(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));

    let out = loewner(&["hessian", "--variant", "a4", "--M", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unbracketable_configuration_exits_3() {
    // Three grid points over the bound interval cannot bracket the root.
    let out = loewner(&["m0", "--grid", "3", "--steps", "2000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn scan_emits_a_clean_csv_table() {
    let args = [
        "scan", "--target", "sigma42", "--from", "-0.08", "--to", "-0.02", "--grid", "8",
        "--steps", "2000",
    ];
    let out = loewner(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,g1,g2,admissibility_margin"));
    let mut prev = f64::NEG_INFINITY;
    let mut count = 0;
    for line in lines {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse().expect("numeric cell"))
            .collect();
        assert_eq!(cells.len(), 4);
        assert!(cells[0] > prev, "param column must increase");
        prev = cells[0];
        count += 1;
    }
    assert_eq!(count, 8);

    // --out writes the identical table to a file and keeps stdout quiet.
    let path = std::env::temp_dir().join(format!("loewner_scan_{}.csv", std::process::id()));
    let path_str = path.to_str().unwrap().to_owned();
    let mut file_args: Vec<&str> = args.to_vec();
    file_args.extend_from_slice(&["--out", &path_str]);
    let out2 = loewner(&file_args);
    assert_eq!(out2.status.code(), Some(0));
    assert!(stdout_str(&out2).is_empty());
    let written = std::fs::read_to_string(&path).expect("table written");
    assert_eq!(written, text);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn scan_json_record_carries_the_rows() {
    let out = loewner(&[
        "scan", "--target", "sigma24", "--grid", "4", "--steps", "1000", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = parse_record(&out);
    assert_eq!(rec.command, "scan");
    assert_eq!(rec.target.as_deref(), Some("sigma24"));
    let ResultPayload::Scan(rows) = &rec.result else {
        panic!("expected scan payload");
    };
    assert_eq!(rows.len(), 4);
}

#[test]
fn oracle_verify_agrees_at_the_origin() {
    let out = loewner(&[
        "oracle-verify", "--variant", "L", "--mu", "0", "--nu", "0", "--M", "inf",
        "--steps", "1500", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = parse_record(&out);
    let ResultPayload::OracleVerify(v) = &rec.result else {
        panic!("expected oracle-verify payload");
    };
    assert!(v.agrees);
    assert!(v.max_entry_diff <= 1e-5);
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = [
        "scan", "--target", "sigma34", "--grid", "8", "--steps", "1000",
    ];
    let one = loewner_with_env(&args, "LOEWNER_THREADS", "1");
    let four = loewner_with_env(&args, "LOEWNER_THREADS", "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(four.status.code(), Some(0));
    assert_eq!(stdout_str(&one), stdout_str(&four));
}

#[test]
fn help_documents_the_defaults() {
    let out = loewner(&["sigma42", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("20000"));
    assert!(text.contains("rk4"));
    assert!(text.contains("1e-7"));
}
