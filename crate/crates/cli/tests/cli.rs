use std::process::{Command, Output};

fn g2nu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2nu"))
        .args(args)
        .output()
        .expect("run g2nu")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn nu_of_example_seven() {
    let o = g2nu(&["nu", "ex07"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ν ≡ 3 (mod 48)"));
}

#[test]
fn report_csv_matches_golden_rows() {
    let o = g2nu(&["report", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 19);
    let golden = include_str!("golden/report_ex07_ex14.csv");
    let mut g = golden.lines();
    assert_eq!(g.next(), Some(lines[0]));
    for row in g {
        assert!(lines.contains(&row), "missing golden row {row}");
    }
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn report_is_deterministic() {
    let a = g2nu(&["report", "--format", "json-lines"]);
    let b = g2nu(&["report", "--format", "json-lines"]);
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["checks_passed"], true);
    }
}

#[test]
fn even_parity_report_moves_examples_three_to_six() {
    let o = g2nu(&["report", "--format", "csv", "--ell-parity", "even"]);
    let out = stdout(&o);
    for n in ["ex03", "ex04", "ex05", "ex06"] {
        assert!(out.contains(&format!("{n}-even,")));
    }
    assert!(out.contains("ex03-even,8,0,,,0,0,24,48,true"));
    assert!(out.contains("ex07,6,0,5,13,1,-1,3,48,true"));
}

#[test]
fn unknown_builtin_is_a_usage_error() {
    let o = g2nu(&["validate", "ex99"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "UnknownBuiltin");
    assert!(v["message"].as_str().unwrap().contains("unknown builtin"));
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(g2nu(&["report", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn spec_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("g2nu-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ex08.toml");
    std::fs::write(&path, g2nu::catalog::builtin_source("ex08").unwrap()).unwrap();
    let o = g2nu(&["nu", path.to_str().unwrap(), "--format", "csv"]);
    assert!(stdout(&o).contains("ex08,12,0,3,11,-1,-1,45,48,true"));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\nlattice = [[1\n").unwrap();
    let o = g2nu(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("ParseError"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_and_analyze_builtins() {
    let o = g2nu(&["validate", "ex14"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
    let o = g2nu(&["analyze", "ex08", "--format", "json-lines"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["hypothesis"], "HYP1");
    assert_eq!(v["group_order"], 12);
}

#[test]
fn eta_reports_provenance() {
    let o = g2nu(&["eta", "ex14", "--format", "json-lines"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["eta_sign"]["exact"], "1/3");
    assert_eq!(v["eta_dirac"]["exact"], "-1/3");
}

#[test]
fn maslov_and_oracle_pass() {
    let o = g2nu(&["maslov", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = g2nu(&["oracle", "--format", "json-lines"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["report"]["passed"], true, "{line}");
    }
}

#[test]
fn maslov_refuses_non_dihedral_order() {
    let o = g2nu(&["maslov", "ex14"]);
    assert_eq!(o.status.code(), Some(1));
}
