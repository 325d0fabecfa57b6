use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn isoclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn census_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let res = isoclass(&["census", "--p", "101", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let text = read(&out);
    assert!(text.lines().any(|l| l == "# p: 101"));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "t,I,iota");
    // t from -20 to 20
    assert_eq!(lines.len(), 1 + 41);
    assert!(lines[1].starts_with("-20,"));
    assert!(lines[41].starts_with("20,"));
    let total: u64 = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    // 2p + 6, 2p + 2, ... classes; I(0) included
    assert!((2 * 101..=2 * 101 + 6).contains(&total));
}

#[test]
fn theorem_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let res = isoclass(&["theorem", "--p", "10007", "--r", "16", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let text = read(&out);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "params", "rows"]);
    assert_eq!(doc["command"], "theorem");
    assert_eq!(doc["params"]["q"], 10007);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let cols: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(cols, ["q", "R", "count", "sum_iota", "avg_iota", "envelope", "ratio"]);
    assert!(rows[0]["ratio"].as_f64().unwrap() < 1.0);
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("theorem:"));
}

#[test]
fn csv_headers_for_every_command() {
    let cases: &[(&[&str], &str)] = &[
        (&["theorem", "--p", "1009", "--r", "8"], "q,R,count,sum_iota,avg_iota,envelope,ratio"),
        (&["satotate", "--p", "1009", "--alpha", "-0.5", "--beta", "0.5"], "q,alpha,beta,statistic,mu,c,ratio"),
        (&["charsum", "--q", "1009", "--r", "8", "--l", "64"], "q,R,L,avg_max,envelope,ratio"),
        (&["sieve", "--q", "1009", "--r", "4", "--n", "64"], "q,R,N,seed,lhs,env_paper,env_classical,env_conjecture"),
        (&["lfunc", "--q", "101", "--t", "-3", "--n", "1000"], "q,t,f,Dstar,L_star,euler,L_full,L_trunc,residual"),
        (&["gauss", "--r", "5,8"], "r,abs_tau,sqrt_r,residual"),
        (&["divisor", "--nu", "2", "--m", "4"], "nu,M,lhs,rhs,ok"),
        (&["psi", "--q", "25"], "q,t,f,psi,loglog_env,ratio"),
    ];
    for (args, header) in cases {
        let res = isoclass(args);
        assert_eq!(res.status.code(), Some(0), "{args:?}");
        let text = String::from_utf8(res.stdout).unwrap();
        let lines = data_lines(&text);
        assert_eq!(lines[0], *header, "{args:?}");
        let width = header.split(',').count();
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), width, "{args:?}: {l}");
        }
        assert!(lines.len() > 1, "{args:?}");
    }
}

#[test]
fn divisor_hand_instance() {
    let res = isoclass(&["divisor", "--nu", "2", "--m", "4"]);
    let text = String::from_utf8(res.stdout).unwrap();
    let row = data_lines(&text)[1];
    assert!(row.starts_with("2,4,32,"));
    assert!(row.ends_with(",true"));
}

#[test]
fn seed_is_recorded() {
    let res = isoclass(&["sieve", "--q", "1009", "--r", "4", "--n", "64", "--seed", "9"]);
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.lines().any(|l| l == "# seed: 9"));
    assert!(data_lines(&text)[1].starts_with("1009,4,64,9,"));
    let other = isoclass(&["sieve", "--q", "1009", "--r", "4", "--n", "64", "--seed", "10"]);
    assert_ne!(text, String::from_utf8(other.stdout).unwrap());
}

#[test]
fn exit_codes() {
    let res = isoclass(&["census", "--p", "100"]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("p must be prime"));
    assert_eq!(isoclass(&["theorem", "--p", "101", "--r", "11"]).status.code(), Some(3));
    assert_eq!(isoclass(&["sieve", "--q", "1009", "--r", "4", "--n", "100000"]).status.code(), Some(3));
    assert_eq!(isoclass(&["satotate", "--p", "101", "--alpha", "0.5", "--beta", "0.1"]).status.code(), Some(3));
    assert_eq!(isoclass(&["census"]).status.code(), Some(2));
    assert_eq!(isoclass(&["census", "--p", "abc"]).status.code(), Some(2));
    assert_eq!(isoclass(&["census", "--p", "7", "--threads", "0"]).status.code(), Some(2));
    assert_eq!(isoclass(&["census", "--p", "7", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(isoclass(&["--help"]).status.code(), Some(0));
    assert_eq!(isoclass(&["--version"]).status.code(), Some(0));
    let res = isoclass(&["census", "--p", "7", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(res.status.code(), Some(4));
}
