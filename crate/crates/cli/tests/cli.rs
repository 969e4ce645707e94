use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_regsaffron");

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("regsaffron-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        TempDir(p)
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_paths(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut c = Command::new(BIN);
    c.args(args);
    for (flag, p) in paths {
        c.arg(flag).arg(p);
    }
    c.output().unwrap()
}

fn config(trials: u64) -> String {
    format!(
        r#"{{
  "variant": "noiseless-peel",
  "n_items": 4096,
  "n_defectives": 20,
  "left_degree": 3,
  "sections": 2,
  "backend": "explicit-permutation",
  "bin_sizing": "balanced",
  "sweep": {{ "axis": "c", "values": [0.5, 4.0], "code": {{ "kind": "identity" }} }},
  "noise_q": 0.0,
  "trials": {trials},
  "master_seed": 3
}}"#
    )
}

#[test]
fn optimize_row() {
    let out = run(&["optimize", "--epsilon", "1e-4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,ell,c");
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!((f[0], f[1]), ("1e-4", "9"));
    assert!((f[2].parse::<f64>().unwrap() - 7.88).abs() <= 0.05);
}

#[test]
fn empty_trials_give_header_only() {
    let d = TempDir::new("empty");
    let cfg = d.file("cfg.json", &config(0));
    let out = run_paths(&["simulate"], &[("--config", &cfg)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "variant,N,K,ell,s,M,r,m,q,code,e,trials,frac_unidentified,ci_low,ci_high,false_pos_rate,master_seed\n"
    );
}

#[test]
fn simulate_is_reproducible_and_thread_independent() {
    let d = TempDir::new("repro");
    let cfg = d.file("cfg.json", &config(40));
    let a = run_paths(&["simulate", "--threads", "1"], &[("--config", &cfg)]);
    let b = run_paths(&["simulate", "--threads", "3"], &[("--config", &cfg)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run_paths(&["simulate", "--seed", "4"], &[("--config", &cfg)]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn fail_above_exits_one() {
    let d = TempDir::new("fail");
    let cfg = d.file("cfg.json", &config(20));
    let out = run_paths(&["simulate", "--fail-above", "0.01"], &[("--config", &cfg)]);
    assert_eq!(out.status.code(), Some(1));
    let ok = run_paths(&["simulate", "--fail-above", "1.0"], &[("--config", &cfg)]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn bad_input_exits_two() {
    let d = TempDir::new("bad");
    let missing_field = d.file("cfg.json", &config(1).replace("\"master_seed\": 3", "\"seed\": 3"));
    assert_eq!(run_paths(&["simulate"], &[("--config", &missing_field)]).status.code(), Some(2));
    let garbage = d.file("m.bin", "not a container");
    let scheme = d.file(
        "s.json",
        &String::from_utf8(run(&["gen-scheme", "--items", "60", "--bins", "10", "--left-degree", "2"]).stdout).unwrap(),
    );
    let out = run_paths(&["decode"], &[("--scheme", &scheme), ("--measurements", &garbage)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["optimize", "--epsilon", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn measure_then_decode() {
    let d = TempDir::new("roundtrip");
    let scheme = d.0.join("s.json");
    let meas = d.0.join("m.bin");
    let out = run_paths(
        &[
            "gen-scheme", "--items", "5000", "--bins", "300", "--left-degree", "4", "--sections", "2", "--sizing",
            "balanced", "--seed", "12",
        ],
        &[("--out", &scheme)],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run_paths(&["measure", "--defectives", "7,4999,12,300"], &[("--scheme", &scheme), ("--out", &meas)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(&std::fs::read(&meas).unwrap()[..4], b"GTSF");
    let out = run_paths(&["decode"], &[("--scheme", &scheme), ("--measurements", &meas)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["recovered"], serde_json::json!([7, 12, 300, 4999]));
}

#[test]
fn coded_scheme_decodes_noisy_measurements() {
    let d = TempDir::new("noisy");
    let scheme = d.0.join("s.json");
    let meas = d.0.join("m.bin");
    let out = run_paths(
        &[
            "gen-scheme", "--items", "100000", "--bins", "400", "--left-degree", "6", "--sections", "2", "--sizing",
            "balanced", "--backend", "pseudorandom-permutation", "--code", "rs(8;4;gf2^7)",
        ],
        &[("--out", &scheme)],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run_paths(
        &["measure", "--defectives", "10,20000,55555", "--noise-q", "0.01", "--seed", "2"],
        &[("--scheme", &scheme), ("--out", &meas)],
    );
    assert!(out.status.success());
    let out = run_paths(&["decode"], &[("--scheme", &scheme), ("--measurements", &meas)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["recovered"], serde_json::json!([10, 20000, 55555]));
}
