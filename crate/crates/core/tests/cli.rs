use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const K3_GR: &str = "p tw 3 3\n1 2\n2 3\n1 3\n";
const K3_TD: &str = "s td 1 3 3\nb 1 1 2 3\n";

fn srk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srk")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn k3(dir: &Path) -> (String, String) {
    let gr = dir.join("k3.gr");
    let td = dir.join("k3.td");
    fs::write(&gr, K3_GR).unwrap();
    fs::write(&td, K3_TD).unwrap();
    (gr.to_str().unwrap().into(), td.to_str().unwrap().into())
}

#[test]
fn solve_k3_all_sizes_and_min() {
    let dir = tempfile::tempdir().unwrap();
    let (gr, td) = k3(dir.path());
    let base = ["solve", "--gr", &gr, "--td", &td, "--sigma", "0/2", "--rho", "1/2"];
    let out = srk(&[&base[..], &["--mode", "all-sizes"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["feasible"], serde_json::json!([false, true, false, true]));
    assert_eq!(v["answer"], v["feasible"]);
    let out = srk(&[&base[..], &["--mode", "min"]].concat());
    assert_eq!(json(&out)["answer"], 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (gr, td) = k3(dir.path());
    let out = srk(&["solve", "--gr", &gr, "--sigma", "0/2", "--rho", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srk(&["solve", "--gr", &gr, "--td", &td, "--sigma", "1/2", "--rho", "1/2", "--mode", "decide"]);
    let v = json(&out);
    let code = if v["decision"] == true { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(code));
    let out = srk(&["solve", "--gr", &gr, "--td", &td, "--sigma", "0/2", "--rho", "1/3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = srk(&["solve", "--gr", &gr, "--td", &td, "--sigma", "0/2", "--rho", "1/2", "--target", "0", "--mode", "decide"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["answer"], false);
}

#[test]
fn oracle_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let (gr, td) = k3(dir.path());
    let shifts = dir.path().join("shifts");
    fs::write(&shifts, "1 0 2\n").unwrap();
    let shifts = shifts.to_str().unwrap();
    for extra in [&[][..], &["--shifts", shifts][..]] {
        let common = [&["--gr", &gr, "--sigma", "1/3", "--rho", "2/3"][..], extra].concat();
        let a = json(&srk(&[&["solve", "--td", &td][..], &common].concat()));
        let b = json(&srk(&[&["oracle"][..], &common].concat()));
        assert_eq!(a["feasible"], b["feasible"]);
    }
}

#[test]
fn oracle_refuses_large_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let gr = dir.path().join("big.gr");
    fs::write(&gr, "p tw 30 0\n").unwrap();
    let out = srk(&["oracle", "--gr", gr.to_str().unwrap(), "--sigma", "0/2", "--rho", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn gen_lightsout_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("lo");
    let out = srk(&["gen", "lightsout", "5", "5", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let gr = fs::read_to_string(dir.path().join("lo.gr")).unwrap();
    assert!(gr.starts_with("p tw 25 40"));
    let td = fs::read_to_string(dir.path().join("lo.td")).unwrap();
    let header: Vec<&str> = td.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header[3], "6");
    let (g, t) = (dir.path().join("lo.gr"), dir.path().join("lo.td"));
    let out = srk(&[
        "solve", "--gr", g.to_str().unwrap(), "--td", t.to_str().unwrap(), "--sigma", "0/2", "--rho", "1/2", "--mode", "min",
    ]);
    assert_eq!(json(&out)["answer"], 15);
}

#[test]
fn gen_sat_reflexive_triple() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    fs::write(&cnf, "p cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n").unwrap();
    let out = srk(&["gen", "sat", "--variant", "reflexive", cnf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(side["target_size"], 3 + 2 + 1);
    assert!(dir.path().join("f.gr").exists() && dir.path().join("f.td").exists());
}

#[test]
fn gadget_build_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("g");
    let out = srk(&["gadget", "build", "--sigma", "0/3", "--rho", "1/3", "--k", "3", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let gr = dir.path().join("g.gr");
    let portals = dir.path().join("g.portals");
    assert_eq!(fs::read_to_string(&portals).unwrap(), "1\n2\n3\n");
    let verify = |w: &str| {
        srk(&[
            "gadget", "verify", "--gr", gr.to_str().unwrap(), "--portals", portals.to_str().unwrap(),
            "--sigma", "0/3", "--rho", "1/3", "--weights", w,
        ])
        .status
        .code()
    };
    assert_eq!(verify("1"), Some(0));
    assert_eq!(verify("2"), Some(1));
}

#[test]
fn bench_csv() {
    let out = srk(&["bench", "--m", "3", "--w", "3..5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,w,n,max_states,join_ms,total_ms"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let w: u32 = f[1].parse().unwrap();
        let states: u64 = f[3].parse().unwrap();
        assert!(states <= 3u64.pow(w));
    }
}
