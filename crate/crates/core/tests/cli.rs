mod common;

use std::path::PathBuf;

use common::{epsilon_oracle, factor_oracle};
use num_bigint::BigInt;
use num_rational::BigRational;
use vgame::cli::{run_with, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use vgame::io::format_points;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["vgame".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vgame_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn field(line: &str, key: &str) -> usize {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {line}"))
        .parse()
        .unwrap()
}

#[test]
fn table_csv_round_trips_to_the_oracle() {
    let (code, out, _) = run(&["table", "--dim", "2", "--kmax", "10", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let eps = epsilon_oracle(2, 10);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(
        rd.headers().unwrap(),
        vec!["k", "epsilon_num", "epsilon_den", "r", "s", "factor_num", "factor_den"]
    );
    let mut factors = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.unwrap();
        let k: usize = rec[0].parse().unwrap();
        assert_eq!(k, i + 1);
        let big = |c: usize| rec[c].parse::<BigInt>().unwrap();
        let e = BigRational::new(big(1), big(2));
        let f = BigRational::new(big(5), big(6));
        assert_eq!(e, eps[k]);
        assert_eq!(f, factor_oracle(&eps[k], k));
        let (r, s): (usize, usize) = (rec[3].parse().unwrap(), rec[4].parse().unwrap());
        if k >= 2 {
            assert_eq!(r + 2 * s + 1, k);
        }
        factors.push(format!("{}/{}", &rec[5], &rec[6]));
    }
    assert_eq!(factors.len(), 10);
    assert_eq!(factors[0], "3/2");
    assert_eq!(factors[1], "7/4");
    assert_eq!(factors[2], "25/14");
    assert_eq!(factors[9], "9633/5740");
}

#[test]
fn pretty_table_prints_fractions() {
    let (code, out, _) = run(&["table", "--dim", "3", "--kmax", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("161/64"), "{out}");
    assert!(!out.contains("0."), "decimals in {out}");
}

#[test]
fn centerpoint_play_keeps_a_third() {
    let (code, out, err) = run(&["play", "--gen", "uniform_square:30:seed=7", "--k", "1", "--strategy", "centerpoint"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let line = out.lines().next().unwrap();
    assert!(field(line, "p1_payoff") >= 10, "{line}");
    assert_eq!(field(line, "p1_payoff") + field(line, "p2_payoff"), 30);
}

#[test]
fn play_writes_json_and_reads_point_files() {
    let users = scratch("users.csv", &format_points(common::users("annulus", 12, 4, 2).points()));
    let json = users.with_file_name("result.json");
    let (code, _, err) = run(&[
        "play",
        "--users",
        users.to_str().unwrap(),
        "--k",
        "2",
        "--strategy",
        "eknet",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["n"], 12);
    assert_eq!(v["guarantee"]["num"], 4);
    assert_eq!(v["guarantee"]["den"], 7);
    assert!(v["p2_payoff"].as_u64().unwrap() <= 4 * 12 / 7);
}

#[test]
fn malformed_point_file_names_the_line() {
    let bad = scratch("bad.csv", "0,0\n1,1\n2,oops\n");
    let (code, _, err) = run(&["play", "--users", bad.to_str().unwrap(), "--k", "1", "--strategy", "centerpoint"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains('3'), "{err}");
}

#[test]
fn net_checks_its_epsilon() {
    let users = scratch("net_users.csv", &format_points(common::users("uniform_square", 20, 9, 2).points()));
    let u = users.to_str().unwrap();
    let (code, _, _) = run(&["net", "--dim", "2", "--epsilon", "2", "--users", u]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["net", "--dim", "4", "--epsilon", "1/2", "--users", u]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, err) = run(&["net", "--dim", "2", "--epsilon", "1/4", "--users", u]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(!out.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["table", "--dim", "2", "--kmax", "3", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["table", "--dim", "5", "--kmax", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["play", "--k", "1", "--strategy", "centerpoint"]).0, EXIT_USAGE);
    assert_eq!(run(&["play", "--gen", "uniform_square:20:seed=1", "--k", "3", "--strategy", "disknet"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_ne!(EXIT_FAILED, EXIT_USAGE);
}

#[test]
fn verify_suite_passes_with_a_fixed_seed() {
    let (code, out, err) = run(&["verify", "--suite", "bounds", "--seed", "3", "--trials", "3"]);
    assert_eq!(code, EXIT_OK, "{out}{err}");
}
