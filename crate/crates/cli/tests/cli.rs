use std::process::{Command, Output};

use schur_core::schur::{self, SchurContext};
use schur_core::{parse, Flavor};

fn schur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schur")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = schur(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn line(args: &[&str]) -> String {
    stdout(args).trim_end().to_string()
}

#[test]
fn normalize_examples() {
    // at d = 1 the product e f equals H1 = 1 - H2; F(1)*E(1) has degree 2 and is truncated
    assert_eq!(line(&["normalize", "--d", "1", "e*f"]), "1 - binom(H2,1)");
    assert_eq!(line(&["normalize", "--d", "2", "e*f"]), "F(1)*E(1) + 2 - 2*binom(H2,1)");
    assert_eq!(line(&["normalize", "--d", "2", "h", "--basis", "hbasis"]), "h");
    assert_eq!(line(&["normalize", "--d", "1", "E(2)"]), "0");
    assert_eq!(line(&["normalize", "--d", "3", "f^2"]), "2*F(2)");
    assert_eq!(line(&["normalize", "--d", "3", "1/2*f^2", "--basis", "power"]), "1/2*f^2");
    assert_eq!(line(&["normalize", "--d", "2", "--flavor", "ehf", "f*e"]), "E(1)*F(1) + 2 - 2*binom(H1,1)");
}

#[test]
fn small_commands() {
    assert_eq!(line(&["dim", "--d", "4"]), "35");
    assert_eq!(line(&["minpoly", "--d", "2", "h"]), "T^3 - 4*T");
    assert_eq!(line(&["minpoly", "--d", "3", "H1"]), "T^4 - 6*T^3 + 11*T^2 - 6*T");
    let basis = stdout(&["basis", "--d", "1"]);
    assert_eq!(basis.lines().collect::<Vec<_>>(), ["1", "E(1)", "binom(H2,1)", "F(1)"]);
    assert_eq!(stdout(&["basis", "--d", "3"]).lines().count(), 20);
}

#[test]
fn tables() {
    let dir = std::env::temp_dir().join(format!("schur-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let p0 = dir.join("t0.json");
    stdout(&["table", "--d", "0", "--out", p0.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p0).unwrap()).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 1);

    let p2 = dir.join("t2.json");
    stdout(&["table", "--d", "2", "--out", p2.to_str().unwrap()]);
    let text = std::fs::read_to_string(&p2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["d"], 2);
    assert_eq!(v["flavor"], "fhe");
    assert_eq!(v["basis"].as_array().unwrap().len(), 10);
    let products = v["products"].as_array().unwrap();
    assert_eq!(products.len(), 100);
    for p in products {
        for t in p["terms"].as_array().unwrap() {
            assert_eq!(t["den"], "1");
        }
    }
    let table = schur::StructureTable::from_json(&text).unwrap();
    assert_eq!(table, schur::structure_constants(&SchurContext::fhe(2)));

    let p1 = dir.join("t1.csv");
    stdout(&["table", "--d", "1", "--format", "csv", "--out", p1.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&p1).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("i,j,k,num,den"));
    let pairs: std::collections::BTreeSet<(usize, usize)> = rows
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert!(pairs.iter().all(|&(i, j)| i < 4 && j < 4));

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_passes_and_reports_json() {
    let out = schur(&["verify", "--d", "3", "--oracle", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("[PASS]")), "{text}");

    let out = schur(&["verify", "--d", "0", "--json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d"], 0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn exit_codes() {
    let out = schur(&["verify", "--d", "2", "--oracle", "weight", "--inject-sign-error"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));

    let out = schur(&["normalize", "--d", "2", "e^-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 2"));

    assert_eq!(schur(&["normalize", "--d", "2", "e +"]).status.code(), Some(2));
    assert_eq!(schur(&["minpoly", "--d", "2", "binom(h,1)"]).status.code(), Some(2));
    assert_eq!(schur(&["dim"]).status.code(), Some(2));
    assert_eq!(schur(&["normalize", "--d", "2", "--basis", "nope", "e"]).status.code(), Some(2));

    let out = schur(&["table", "--d", "1", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["normalize", "--d", "4", "(e + f)^3 - h*F(2)*binom(H2,1)*E(1)"];
    assert_eq!(schur(&args).stdout, schur(&args).stdout);
    let args = ["verify", "--d", "2", "--json", "-"];
    assert_eq!(schur(&args).stdout, schur(&args).stdout);
}

#[test]
fn normalize_matches_library() {
    let corpus = [
        "e*f - f*e",
        "F(2)*binom(H2,1)*E(1)",
        "f^2",
        "(e + f)^4",
        "h^3 - 4*h",
        "2/3*e*binom(H1,2)*f",
        "E(3)*F(3)",
        "binom(H1,2)*binom(H2,2)",
        "-(e - f)*(e + f)",
    ];
    for d in 0..=4u32 {
        for flavor in [Flavor::Fhe, Flavor::Ehf] {
            let ctx = SchurContext::new(d, flavor);
            for expr in corpus {
                let lib = schur::normalize(&parse(expr).unwrap().lower(flavor, schur_core::Mode::Universal), &ctx);
                let cli = line(&["normalize", "--d", &d.to_string(), "--flavor", flavor.name(), expr]);
                assert_eq!(cli, lib.to_string(), "d={d} {} {expr}", flavor.name());
            }
        }
    }
}
