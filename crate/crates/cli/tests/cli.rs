use std::process::{Command, Output};

fn mincodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mincodes")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mincodes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn dimension_six_cyclic_orders_and_klein_four() {
    let o = mincodes(&["classify-cyclic", "--n", "6", "--d", "2..4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("d_structure,generators,feasible,s,r,s_prime"));
    let feasible: Vec<&str> = lines.filter(|l| l.contains(",true,")).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(feasible, ["2", "3"], "{out}");
    let o = mincodes(&["classify-noncyclic", "--n", "6", "--type", "2^2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(",true,")).count(), 1);
}

#[test]
fn csv_and_json_are_deterministic() {
    let args = ["classify-cyclic", "--n", "7", "--d", "5", "--format", "json"];
    let a = mincodes(&args);
    let b = mincodes(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v[0]["n"], 7);
    assert_eq!(v[0]["candidates_after_filter"].as_u64().unwrap() as usize, v[0]["rows"].as_array().unwrap().len());
}

#[test]
fn no_cyclic_quotient_of_order_eleven() {
    let o = mincodes(&["classify-cyclic", "--n", "9", "--d", "11", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout(&o).contains(",true,"));
}

#[test]
fn check_code_universal_twelve() {
    // type (2,1,2,2,1,1) for d = 12
    let p = tmp("u12.code", "9 12\n1 1 2 3 3 4 4 5 6\n");
    let o = mincodes(&["check-code", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feasible"], "true");
    assert_eq!(v["s"], 136);
    assert_eq!(v["r"], 45);
}

#[test]
fn check_code_binary_reports_formula() {
    let p = tmp("k4.code", "6 2 2\n1 1 1 1 0 0\n0 0 1 1 1 1\n");
    let o = mincodes(&["check-code", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["predicted"]["s"], v["s"]);
    assert_eq!(v["predicted"]["r"], v["r"]);
}

#[test]
fn invariants_of_l87() {
    let o = mincodes(&["invariants", "L87", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["min"], "4");
    assert_eq!(v["s"], 87);
    assert_eq!(v["r"], 42);
    assert_eq!(v["eutaxy"], "eutactic");
}

#[test]
fn index_system_of_d5_from_file() {
    let gram = "5\n2 -1 0 0 0\n-1 2 -1 0 0\n0 -1 2 -1 -1\n0 0 -1 2 0\n0 0 -1 0 2\n";
    let p = tmp("D5.gram", gram);
    let o = mincodes(&["index-system", p.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(), ["type", "1", "2"]);
}

#[test]
fn catalog_directory_by_name() {
    let p = tmp("mylat.gram", "2\n2 1\n1 2\n");
    let o = Command::new(env!("CARGO_BIN_EXE_mincodes"))
        .args(["invariants", "mylat", "--format", "csv"])
        .env("MINCODES_CATALOG", p.parent().unwrap())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s,3"));
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let o = mincodes(&["index-system", "E8", "--budget-subsets", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors() {
    assert_eq!(mincodes(&["classify-noncyclic", "--n", "9", "--type", "2x4"]).status.code(), Some(3));
    assert_eq!(mincodes(&["invariants", "/no/such/lattice"]).status.code(), Some(3));
    assert_eq!(mincodes(&["watson", "--n", "9"]).status.code(), Some(3));
    let bad = tmp("bad.gram", "2\n1 2\n3 4\n");
    assert_eq!(mincodes(&["invariants", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(mincodes(&["--help"]).status.code(), Some(0));
}

#[test]
fn watson_candidates() {
    let o = mincodes(&["watson", "--n", "9", "--d", "12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["after"].as_u64().unwrap() < v["before"].as_u64().unwrap());
    // (2,1,2,2,1,1) and its multiple by 5 are one orbit
    let listed = |m: &str| v["types"].as_array().unwrap().iter().any(|t| t["type"] == m);
    assert!(listed("(2,1,2,2,1,1)_12") || listed("(1,1,2,2,2,1)_12"));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("mincodes-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("w.csv");
    let o = mincodes(&["watson", "--n", "6", "--d", "3", "--format", "csv", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("type,word\n"));
}
