use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiring-mxu"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn semiring-mxu")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(out: &Output) -> Value {
    let stdout = String::from_utf8_lossy(&out.stdout);
    // The report is the leading JSON object; knn appends index lines after it.
    let end = stdout.find("\n}").map_or(stdout.len(), |i| i + 2);
    serde_json::from_str(&stdout[..end]).unwrap_or_else(|e| panic!("{e}: {stdout}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn chain_of_eight_converges_in_four_leyzorek_iterations() {
    let dir = TempDir::new().unwrap();
    let body: String = (0..7).map(|i| format!("{i} {} 1\n", i + 1)).collect();
    let chain = write(&dir, "chain8.txt", &format!("n 8 directed\n{body}"));
    let out = run(&[
        "solve",
        "apsp",
        "--input",
        s(&chain),
        "--algo",
        "leyzorek",
        "--validate",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert!(r["iterations"].as_u64().unwrap() <= 4);
    assert_eq!(r["validation"]["matched"], true);
    assert_eq!(r["validation"]["max_abs_diff"], 0.0);
}

#[test]
fn triangle_mst_validates() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "triangle.txt", "n 3 undirected\n0 1 1\n1 2 2\n0 2 3\n");
    let out = run(&["solve", "mst", "--input", s(&tri), "--validate"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["validation"]["matched"], true);
    assert_eq!(r["op"], "min_max");
}

#[test]
fn report_has_exactly_the_documented_keys() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "n 3\n0 1 1\n1 2 2\n0 2 5\n");
    let path = dir.path().join("r.json");
    let out = run(&[
        "solve",
        "apsp",
        "--input",
        s(&g),
        "--validate",
        "--report",
        s(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut want = vec![
        "problem",
        "op",
        "n",
        "m",
        "k",
        "algorithm",
        "precision",
        "iterations",
        "tile_ops",
        "loads",
        "stores",
        "wall_time_seconds",
        "converged",
        "validation",
    ];
    want.sort_unstable();
    assert_eq!(keys, want);
    assert_eq!(r["algorithm"], "leyzorek");
    assert_eq!(r["precision"], "exact32");
}

#[test]
fn missing_input_exits_one() {
    let out = run(&["solve", "gtc", "--input", "/nonexistent/missing.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["solve", "bogus", "--input", "x"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "apsp"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_input_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.txt", "n 3\n0 1 1\n0 3 1\n");
    let out = run(&["solve", "apsp", "--input", s(&g)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn cyclic_aplp_is_an_error() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "cyc.txt", "n 3\n0 1 1\n1 2 1\n2 0 1\n");
    let out = run(&["solve", "aplp", "--input", s(&g)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_matrix_round_trips() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "n 3\n0 1 1\n1 2 2\n0 2 5\n");
    let m = dir.path().join("d.txt");
    assert!(run(&["solve", "apsp", "--input", s(&g), "--output", s(&m)])
        .status
        .success());
    assert_eq!(
        std::fs::read_to_string(&m).unwrap(),
        "0 1 3\ninf 0 2\ninf inf 0\n"
    );
}

#[test]
fn knn_cli_validates_and_prints_indices() {
    let dir = TempDir::new().unwrap();
    let q = write(&dir, "q.txt", "0.9 0\n4 0\n");
    let r = write(&dir, "r.txt", "0 0\n1 0\n5 0\n");
    let out = run(&[
        "solve",
        "knn",
        "--input",
        s(&q),
        "--refs",
        s(&r),
        "--k",
        "2",
        "--validate",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(
        (rep["n"].as_u64(), rep["m"].as_u64(), rep["k"].as_u64()),
        (Some(3), Some(2), Some(2))
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0: 1 0"));
    assert!(stdout.contains("1: 2 1"));
}

#[test]
fn mixed16_solve_reports_a_difference_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    let gen = run(&[
        "gen",
        "--n",
        "30",
        "--weights",
        "uniform:0.1:10",
        "--seed",
        "4",
        "-o",
        s(&g),
    ]);
    assert!(gen.status.success());
    let out = run(&[
        "solve",
        "apsp",
        "--input",
        s(&g),
        "--precision",
        "mixed16",
        "--validate",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(r["precision"], "mixed16");
    assert!(r["validation"]["max_abs_diff"].as_f64().unwrap() > 0.0);
}

/// Problems that make sense on every family (with suitable weights).
fn corpus_problems(kind: &str) -> Vec<(&'static str, &'static str)> {
    let mut p = vec![
        ("apsp", "int:1:10"),
        ("mcp", "int:1:10"),
        ("gtc", "int:1:10"),
        ("maxrp", "pow2:3"),
    ];
    if kind == "dag_layered" || kind == "path" || kind == "grid" {
        p.push(("aplp", "int:-3:10"));
        p.push(("minrp", "pow2:3"));
    }
    p
}

#[test]
fn generated_corpus_validates() {
    let dir = TempDir::new().unwrap();
    for kind in ["erdos_renyi", "path", "cycle", "grid", "dag_layered"] {
        for n in [8, 16, 33, 64] {
            let n_arg = n.to_string();
            for (problem, weights) in corpus_problems(kind) {
                let g = dir.path().join(format!("{kind}_{n}_{problem}.txt"));
                let gen = run(&[
                    "gen",
                    "--kind",
                    kind,
                    "--n",
                    &n_arg,
                    "--weights",
                    weights,
                    "--seed",
                    "3",
                    "-o",
                    s(&g),
                ]);
                assert!(gen.status.success(), "gen {kind} {n}");
                for algo in ["bf", "leyzorek"] {
                    let out = run(&["solve", problem, "--input", s(&g), "--algo", algo, "--validate"]);
                    assert_eq!(
                        out.status.code(),
                        Some(0),
                        "{problem} on {kind} n={n} ({algo}): {}",
                        String::from_utf8_lossy(&out.stderr)
                    );
                }
            }
            let g = dir.path().join(format!("{kind}_{n}_mst.txt"));
            let gen = run(&[
                "gen",
                "--kind",
                kind,
                "--n",
                &n_arg,
                "--weights",
                "distinct",
                "--undirected",
                "--seed",
                "3",
                "-o",
                s(&g),
            ]);
            assert!(gen.status.success());
            let out = run(&["solve", "mst", "--input", s(&g), "--validate"]);
            assert_eq!(out.status.code(), Some(0), "mst on {kind} n={n}");
        }
    }
}

#[test]
fn bench_tile_ops_follow_the_formula() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bench.json");
    let out = run(&[
        "bench",
        "--problem",
        "apsp",
        "--sizes",
        "8,16,33,40",
        "--kind",
        "erdos_renyi",
        "--algos",
        "bf,leyzorek",
        "--report",
        s(&path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reports.len(), 8);
    for r in &reports {
        let n = r["n"].as_u64().unwrap();
        let tiles = n.div_ceil(16).pow(3);
        assert_eq!(
            r["tile_ops"].as_u64().unwrap(),
            r["iterations"].as_u64().unwrap() * tiles,
            "{r}"
        );
    }
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().next().unwrap().contains("tile_ops"));
}

#[test]
fn no_convergence_check_runs_the_worst_case_count() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("p.txt");
    assert!(run(&["gen", "--kind", "path", "--n", "20", "-o", s(&g)])
        .status
        .success());
    let out = run(&[
        "solve",
        "apsp",
        "--input",
        s(&g),
        "--algo",
        "bf",
        "--no-convergence-check",
        "--validate",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["iterations"], 19);
    assert_eq!(r["converged"], false);
    assert_eq!(r["validation"]["matched"], true);
}

#[test]
fn gen_is_deterministic_and_emits_points() {
    let a = run(&["gen", "--kind", "grid", "--n", "12", "--seed", "5"]);
    let b = run(&["gen", "--kind", "grid", "--n", "12", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("n 12 directed"));
    let pts = run(&["gen", "--kind", "points", "--n", "4", "--dim", "3"]);
    let text = String::from_utf8_lossy(&pts.stdout);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.split_whitespace().count() == 3));
    assert_eq!(
        run(&["gen", "--n", "5", "--density", "1.5"]).status.code(),
        Some(1)
    );
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
