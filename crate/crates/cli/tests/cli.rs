use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mnae::ops::{build_a_uniform_x, build_hent};
use mnae::spectra::EntropyProfile;
use mnae::{ClauseOperators, Instance, OperatorMatrix};
use tempfile::TempDir;

fn mnae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnae"))
        .args(args)
        .env_remove("MNAE_EXHAUSTIVE_CAP")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mnae(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn column(csv: &str, k: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

/// Two-solution instance on `n` qubits written to `dir`.
fn two_solution(dir: &TempDir, n: usize, m: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(format!("inst{n}.json"));
    let (n, m, seed) = (n.to_string(), m.to_string(), seed.to_string());
    ok(&["gen", "--n", &n, "--m", &m, "--solutions", "2", "--seed", &seed, "--out", p(&path)]);
    path
}

#[test]
fn gen_single_clause_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("one.txt");
    ok(&["gen", "--n", "3", "--m", "1", "--solutions", "6", "--seed", "1", "--out", p(&out)]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "3 1\n1 2 3\n");
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("one.solutions.json")).unwrap())
            .unwrap();
    assert_eq!(side["solutions"].as_array().unwrap().len(), 6);
    assert_eq!(side["attempts"], 1);
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(format!("{tag}.json"));
        ok(&["gen", "--n", "10", "--m", "22", "--solutions", "2", "--seed", "7", "--out", p(&out)]);
        let side = dir.path().join(format!("{tag}.solutions.json"));
        files.push((std::fs::read(&out).unwrap(), std::fs::read(side).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    let inst = Instance::read(dir.path().join("a.json")).unwrap();
    assert_eq!(inst.n_clauses(), 22);
}

#[test]
fn gen_failure_reports_attempts() {
    let dir = TempDir::new().unwrap();
    // every triple over five qubits leaves no solution
    let out = mnae(&[
        "gen",
        "--n",
        "5",
        "--m",
        "10",
        "--solutions",
        "2",
        "--seed",
        "1",
        "--max-tries",
        "3",
        "--out",
        p(&dir.path().join("x.txt")),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
    let out = mnae(&["gen", "--n", "5", "--m", "2", "--solutions", "2", "--out", "x.txt"]);
    assert_eq!(code(&out), 1, "--seed is mandatory");
}

#[test]
fn solve_lists_flip_pairs() {
    let dir = TempDir::new().unwrap();
    let inst = two_solution(&dir, 8, 12, 3);
    let v: serde_json::Value = serde_json::from_str(&ok(&["solve", "--instance", p(&inst)])).unwrap();
    assert_eq!(v["count"], 2);
    let sols = v["solutions"].as_array().unwrap();
    let flipped: Vec<i64> = sols[0].as_array().unwrap().iter().map(|x| -x.as_i64().unwrap()).collect();
    let other: Vec<i64> = sols[1].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
    assert_eq!(flipped, other);
}

#[test]
fn spectrum_of_single_clause_and_small_chain() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("one.txt");
    std::fs::write(&inst, "3 1\n1 2 3\n").unwrap();
    let ev = column(&ok(&["spectrum", "--ham", "hp", "--instance", p(&inst)]), 1);
    assert_eq!(ev, vec![0., 0., 0., 0., 0., 0., 1., 1.]);

    let ev = column(&ok(&["spectrum", "--ham", "ising", "--n", "2"]), 1);
    let frozen = [-2.2022437067874, -0.994572545154346, 0.45055555834709, 2.74626069359466];
    for (a, b) in ev.iter().zip(frozen) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn spectrum_hent_zero_ground_and_export() {
    let dir = TempDir::new().unwrap();
    let inst_path = two_solution(&dir, 7, 10, 5);
    let op_path = dir.path().join("h.coo");
    let csv = ok(&["spectrum", "--instance", p(&inst_path), "--ham", "hent", "--export-op", p(&op_path)]);
    assert!(column(&csv, 1)[0].abs() <= 1e-10);
    let inst = Instance::read(&inst_path).unwrap();
    let h = build_hent(&inst, &ClauseOperators::uniform(&inst, build_a_uniform_x(7))).unwrap();
    let back = OperatorMatrix::read_coo(&op_path).unwrap();
    assert_eq!(back.to_dense(), h.to_dense());
}

#[test]
fn entropy_of_diagonal_hamiltonian_vanishes() {
    let dir = TempDir::new().unwrap();
    let inst = two_solution(&dir, 8, 12, 3);
    let csv =
        ok(&["entropy", "--ham", "hp", "--instance", p(&inst), "--report", p(&dir.path().join("r.json"))]);
    let s = column(&csv, 2);
    assert_eq!(s.len(), 256);
    assert!(s.iter().all(|&x| x == 0.0));
}

#[test]
fn entropy_profile_structure_and_report() {
    let dir = TempDir::new().unwrap();
    let inst = two_solution(&dir, 8, 12, 3);
    let out = dir.path().join("e.csv");
    ok(&["entropy", "--instance", p(&inst), "--ham", "hent", "--out", p(&out), "--strict"]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("index,energy,entropy_bits,degenerate_flag\n"));
    let rec = EntropyProfile::read_csv_records(text.as_bytes()).unwrap();
    assert_eq!(rec.len(), 256);
    assert!(rec[..2].iter().all(|r| r.entropy_bits <= 1e-8));
    assert!(rec[2..].iter().all(|r| r.entropy_bits > 1e-4));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e.report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["ground_space"]["ground_count"], 2);
    assert_eq!(report["frustration_free"]["status"], "pass");
    assert_eq!(report["keep"], serde_json::json!([5, 6, 7, 8]));

    let quarter = dir.path().join("q.csv");
    ok(&["entropy", "--instance", p(&inst), "--window", "first-quarter", "--out", p(&quarter)]);
    let q = std::fs::read_to_string(&quarter).unwrap();
    assert_eq!(q.lines().count(), 1 + 64);
    assert!(text.starts_with(&q), "first quarter is a prefix of the full profile");

    let again = dir.path().join("e2.csv");
    ok(&["entropy", "--instance", p(&inst), "--ham", "hent", "--out", p(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn csv_round_trips_to_twelve_digits() {
    let dir = TempDir::new().unwrap();
    let csv = ok(&[
        "entropy",
        "--ham",
        "ising",
        "--n",
        "6",
        "--keep",
        "1,2",
        "--report",
        p(&dir.path().join("r.json")),
    ]);
    let rec = EntropyProfile::read_csv_records(csv.as_bytes()).unwrap();
    for (line, r) in csv.lines().skip(1).zip(&rec) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1], format!("{:.11e}", r.energy));
        assert_eq!(fields[2], format!("{:.11e}", r.entropy_bits));
    }
    assert!(rec.iter().all(|r| r.entropy_bits <= 2.0 + 1e-10));
}

#[test]
fn strict_report_failure_exits_three() {
    let dir = TempDir::new().unwrap();
    let inst = two_solution(&dir, 6, 10, 1);
    let zero = dir.path().join("zero.coo");
    std::fs::write(&zero, "64 0\n").unwrap();
    let out_csv = dir.path().join("z.csv");
    let args =
        ["entropy", "--instance", p(&inst), "--a", "from-file", "--a-file", p(&zero), "--out", p(&out_csv)];
    ok(&args);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("z.report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    assert_eq!(code(&mnae(&strict)), 3);
    assert!(out_csv.exists());
}

#[test]
fn gapscan_rows_and_endpoints() {
    let dir = TempDir::new().unwrap();
    let inst = two_solution(&dir, 6, 10, 1);
    let out = dir.path().join("g.csv");
    ok(&["gapscan", "--ham", "hp", "--grid", "11", "--instance", p(&inst), "--out", p(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("s,gap01,gap02\n"));
    let s = column(&text, 0);
    let gap01 = column(&text, 1);
    assert_eq!(s.len(), 11);
    assert_eq!((s[0], s[10]), (0.0, 1.0));
    assert!((gap01[0] - 1.0).abs() <= 1e-10);
    assert!(gap01[10] <= 1e-10);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["points"], 11);
}

#[test]
fn exit_codes_for_bad_input_and_caps() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "4 1\n1 2 9\n").unwrap();
    assert_eq!(code(&mnae(&["spectrum", "--instance", p(&bad)])), 1);
    assert_eq!(code(&mnae(&["spectrum", "--instance", p(&dir.path().join("missing.txt"))])), 1);
    assert_eq!(code(&mnae(&["gapscan", "--ham", "h0", "--n", "4"])), 1);
    assert_eq!(code(&mnae(&["gapscan", "--ham", "ising", "--n", "4", "--grid", "2"])), 1);
    assert_eq!(code(&mnae(&["spectrum", "--no-such-flag"])), 1);
    assert_eq!(code(&mnae(&["spectrum", "--ham", "ising", "--n", "6", "--dim-cap", "32"])), 2);
    assert_eq!(code(&mnae(&["solve", "--n", "6", "--m", "4", "--seed", "1", "--exhaustive-cap", "5"])), 2);

    let inst = two_solution(&dir, 6, 10, 1);
    let out = Command::new(env!("CARGO_BIN_EXE_mnae"))
        .args(["solve", "--instance", p(&inst)])
        .env("MNAE_EXHAUSTIVE_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
