use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const PAULIS: &str = "[algebra]\ndim = 2\ngenerators = [\"pauli_x\", \"pauli_z\"]\n";

fn nclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclab")).args(args).output().expect("run nclab")
}

fn run(dir: &TempDir, sub: &str, config: &str, jobs: usize, out: &str) -> Output {
    let path = dir.path().join(format!("{sub}.toml"));
    std::fs::write(&path, config).unwrap();
    let out_dir = dir.path().join(out);
    nclab(&[sub, "--config", path.to_str().unwrap(), "--jobs", &jobs.to_string(), "--out", out_dir.to_str().unwrap()])
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn without_runtime(rows: &[Vec<String>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r[..r.len() - 1].to_vec()).collect()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decompose_reports_and_exit_codes() {
    let o = nclab(&["decompose", "--poly", "A1*A2 + A2*A1", "--a", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
    assert_eq!(v["round_trip"], "exact");
    assert_eq!(v["terms"][1]["t"], "5/2");

    let o = nclab(&["decompose", "--poly", "A1", "--a", "1", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("terms: 1"));

    let o = nclab(&["decompose", "--poly", "A1*A2 + A2*A1", "--a", "2", "--q", "5/2"]);
    assert_eq!(o.status.code(), Some(0));

    for (args, code) in [
        (vec!["decompose", "--poly", "A1*A2", "--a", "2", "--require-sa"], 2),
        (vec!["decompose", "--poly", "A1 +", "--a", "2"], 2),
        (vec!["decompose", "--poly", "A3", "--a", "2"], 2),
        (vec!["decompose", "--poly", "A1", "--a", "1", "--q", "1"], 2),
        (vec!["decompose", "--poly", "A1^6", "--a", "1"], 3),
        (vec!["decompose", "--a", "1"], 2),
        (vec!["bogus"], 2),
    ] {
        let o = nclab(&args);
        assert_eq!(o.status.code(), Some(code), "{args:?}");
        assert!(o.stdout.is_empty() || code == 0, "{args:?}");
    }
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("experiment_id = \"ac\"\nseed = 3\npolynomial = \"A1*A2 + A2*A1\"\nn_list = [2, 4, 8]\nsamples = 50000\n{PAULIS}");
    let a = run(&dir, "sweep", &cfg, 1, "a");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).contains("fitted slope"));
    let b = run(&dir, "sweep", &cfg, 3, "b");
    assert_eq!(b.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("a/clt_sweep.csv"));
    assert_eq!(header, ["experiment_id", "N", "dim", "ks", "moment2_gap", "moment4_gap", "runtime_ms"]);
    assert_eq!(rows.len(), 3);
    let ks = column(&header, &rows, "ks");
    assert!(ks.windows(2).all(|w| w[1] <= w[0]), "{ks:?}");
    let gap2 = column(&header, &rows, "moment2_gap");
    for (g, n) in gap2.iter().zip([2.0, 4.0, 8.0]) {
        assert!((g + 4.0 / n).abs() < 1e-12);
    }
    let (_, rows_b) = read_csv(&dir.path().join("b/clt_sweep.csv"));
    assert_eq!(without_runtime(&rows), without_runtime(&rows_b));
}

#[test]
fn sweep_classical_case_and_empty_list() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("polynomial = \"A1\"\nn_list = [2, 10]\nsamples = 50000\n{PAULIS}");
    assert_eq!(run(&dir, "sweep", &cfg, 2, "out").status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/clt_sweep.csv"));
    let ks = column(&header, &rows, "ks");
    assert!(ks[1] < ks[0]);

    let empty = format!("polynomial = \"A1\"\n{PAULIS}");
    assert_eq!(run(&dir, "sweep", &empty, 1, "empty").status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("empty/clt_sweep.csv")).unwrap();
    assert_eq!(text, "experiment_id,N,dim,ks,moment2_gap,moment4_gap,runtime_ms\n");
}

#[test]
fn decay_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("n_list = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]\n{PAULIS}");
    let o = run(&dir, "decay", &cfg, 2, "out");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fitted slope -0.5000"));
    let (header, rows) = read_csv(&dir.path().join("out/decay.csv"));
    assert_eq!(header, ["experiment_id", "N", "alpha", "beta", "gns_norm", "ratio_prev", "runtime_ms"]);
    for (norm, n) in column(&header, &rows, "gns_norm").iter().zip(1..) {
        assert!((norm - 2.0 / (n as f64).sqrt()).abs() < 1e-9);
    }
    assert_eq!(rows[0][5], "");
    let ratio: f64 = rows[3][5].parse().unwrap();
    assert!((ratio - (3.0f64 / 4.0).sqrt()).abs() < 1e-12);
}

#[test]
fn reorder_single_term_is_exact() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("polynomial = \"A1^2\"\nn_list = [1, 3, 5]\n{PAULIS}");
    assert_eq!(run(&dir, "reorder", &cfg, 1, "out").status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/reorder.csv"));
    assert_eq!(header, ["experiment_id", "N", "defect", "spec_bound", "runtime_ms"]);
    assert_eq!(rows.len(), 3);
    assert!(column(&header, &rows, "defect").iter().all(|&d| d.abs() < 1e-12));
    assert!(column(&header, &rows, "spec_bound").iter().all(|&d| d == 0.0));

    let anti = format!("polynomial = \"A1*A2 + A2*A1\"\nn_list = [2, 4]\n[reorder]\nt_scale = 0.1\n{PAULIS}");
    assert_eq!(run(&dir, "reorder", &anti, 1, "anti").status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("anti/reorder.csv"));
    for (d, b) in column(&header, &rows, "defect").iter().zip(column(&header, &rows, "spec_bound")) {
        assert!(*d > 0.0 && *d <= b + 1e-10);
    }
    let wrong_t = format!("polynomial = \"A1*A2 + A2*A1\"\nn_list = [2]\n[reorder]\nt = [1.0]\n{PAULIS}");
    assert_eq!(run(&dir, "reorder", &wrong_t, 1, "bad").status.code(), Some(2));
}

#[test]
fn ojcf_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("n_list = [3, 6]\n{PAULIS}");
    assert_eq!(run(&dir, "ojcf", &cfg, 2, "out").status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/ojcf.csv"));
    assert_eq!(header, ["experiment_id", "N", "t1", "t2", "re_cf", "im_cf", "gauss_limit", "abs_err", "runtime_ms"]);
    assert_eq!(rows.len(), 2 * 81);
    let origin = rows.iter().find(|r| r[2] == "0" && r[3] == "0").unwrap();
    assert_eq!(origin[6], "1");
    assert!(origin[7].parse::<f64>().unwrap() < 1e-12);
    let re = column(&header, &rows, "re_cf");
    let im = column(&header, &rows, "im_cf");
    assert!(re.iter().zip(&im).all(|(a, b)| a.hypot(*b) <= 1.0 + 1e-10));
}

#[test]
fn lemma_checks_on_commuting_generators() {
    let dir = TempDir::new().unwrap();
    let cfg = "experiment_id = \"comm\"\n[algebra]\ndim = 2\ngenerators = [\"pauli_z\", [[2,0],[0,0],[0,0],[-3,0]]]\n\
               [lemmas]\npairs = 3\ntriples = 6\nunitary_pairs = 5\n";
    let o = run(&dir, "lemmas", cfg, 2, "out");
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/lemmas.csv"));
    assert_eq!(header, ["experiment_id", "check", "dim", "seed", "lhs", "rhs", "defect", "pass", "runtime_ms"]);
    assert_eq!(rows.len(), 1 + 1 + 3 + 6 + 5);
    assert!(column(&header, &rows, "defect").iter().all(|&d| d <= 1e-12));
    assert!(rows.iter().all(|r| r[7] == "true"));
    assert_eq!(rows[0][3], "");
    assert_eq!(rows.iter().filter(|r| r[1] == "spec" && r[2] == "3").count(), 2);
}

#[test]
fn configuration_failures_leave_no_output() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("sweep", format!("polynomial = \"A1\"\nn_list = [14]\n{PAULIS}"), 3),
        ("decay", format!("n_list = [2]\n[caps]\ndim = 2\n{PAULIS}"), 3),
        ("sweep", format!("polynomial = \"A1*A2*A1\"\nn_list = [2]\n{PAULIS}"), 3),
        ("sweep", format!("n_list = [2]\n{PAULIS}"), 2),
        ("sweep", format!("polynomial = \"A1*A2\"\nn_list = [2]\n{PAULIS}"), 2),
        ("decay", format!("n_list = [2]\nfoo = 1\n{PAULIS}"), 2),
        ("decay", "n_list = [2]\n[algebra]\ndim = 2\ngenerators = [[[0,0],[1,0],[2,0],[0,0]], \"pauli_z\"]\n".into(), 4),
        ("ojcf", "n_list = [2]\n[algebra]\ndim = 2\ngenerators = [[[1,0],[0,0],[0,0],[0,0]], \"pauli_z\"]\n".into(), 2),
    ];
    for (i, (sub, cfg, code)) in cases.iter().enumerate() {
        let out = format!("case{i}");
        let o = run(&dir, sub, cfg, 1, &out);
        assert_eq!(o.status.code(), Some(*code), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!dir.path().join(&out).exists(), "case {i} wrote output");
    }
    let missing = nclab(&["decay", "--config", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let cfg = dir.path().join("ok.toml");
    std::fs::write(&cfg, format!("n_list = [2]\n{PAULIS}")).unwrap();
    let zero_jobs = nclab(&["decay", "--config", cfg.to_str().unwrap(), "--jobs", "0"]);
    assert_eq!(zero_jobs.status.code(), Some(2));
}
