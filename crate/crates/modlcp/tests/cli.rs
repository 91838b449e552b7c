//! End-to-end checks of the binary: exit codes, CSV determinism, file
//! input, and config-file precedence.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modlcp"))
}

#[test]
fn solve_converged_exits_zero() {
    let out = bin()
        .args([
            "solve", "--family", "example1", "--m", "4", "--mu", "1.5", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,IT,CPU,RES,status"), "{text}");
    assert!(text.contains("RATMMS"), "{text}");
}

#[test]
fn scalar_problem_recovers_known_solution() {
    let out = bin()
        .args([
            "solve", "--family", "example1", "--m", "1", "--mu", "1", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    // known solution z* = (1); the error column must be tiny
    let row = text.lines().nth(1).unwrap();
    let err: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(err < 1e-5, "solution error {err}");
}

#[test]
fn non_convergence_prints_dash_and_exits_two() {
    let out = bin()
        .args([
            "solve", "--family", "example1", "--m", "60", "--mu", "2", "--method", "gmms",
            "--alpha", "1.3", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains(",-,"), "expected dash cells, got {row}");
}

#[test]
fn usage_error_exits_one() {
    let out = bin()
        .args(["solve", "--family", "example1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");

    let out = bin()
        .args(["bench", "--table", "table99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn bench_csv_deterministic_excluding_cpu() {
    let run = || {
        let out = bin()
            .args([
                "bench", "--table", "table3", "--m", "60", "--format", "csv",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        String::from_utf8(out.stdout).unwrap()
    };
    let strip_cpu = |text: &str| -> Vec<String> {
        text.lines()
            .map(|line| {
                let mut cols: Vec<&str> = line.split(',').collect();
                cols.remove(8); // CPU column
                cols.join(",")
            })
            .collect()
    };
    let a = strip_cpu(&run());
    let b = strip_cpu(&run());
    assert_eq!(a, b, "bench output not deterministic");
    // divergent cells show "-" in IT and RES
    assert!(
        a.iter().any(|l| l.contains("GMMS,1.3") && l.ends_with("-,-")),
        "{a:?}"
    );
}

#[test]
fn bench_empty_grid_header_only() {
    let out = bin()
        .args(["bench", "--family", "example1", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    assert!(text.starts_with("family,m,mu,method"));
}

#[test]
fn file_input_roundtrip() {
    use modlcp::linalg::{write_matrix_market, write_vector};
    let dir = tempfile::tempdir().unwrap();
    let p = modlcp::problems::example1(3, 2.0).unwrap();
    let a_path = dir.path().join("a.mtx");
    let q_path = dir.path().join("q.txt");
    let z_path = dir.path().join("z.txt");
    write_matrix_market(&a_path, p.matrix()).unwrap();
    write_vector(&q_path, p.q()).unwrap();
    write_vector(&z_path, p.known_solution().unwrap()).unwrap();
    let out = bin()
        .args([
            "solve",
            "--matrix",
            a_path.to_str().unwrap(),
            "--q",
            q_path.to_str().unwrap(),
            "--zstar",
            z_path.to_str().unwrap(),
            "--k",
            "0.8",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let err: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 1e-4, "solution error {err}");
}

#[test]
fn config_file_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "family=example1\nm=4\nmu=1.5\nmethod=gmms\n").unwrap();
    // config alone
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("GMMS"), "{text}");
    // flag overrides the config's method
    let out = bin()
        .args([
            "solve", "--config", cfg.to_str().unwrap(), "--method", "ratmms", "--format", "csv",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("RATMMS"), "{text}");
}

#[test]
fn oracle_compare_batch_passes() {
    let out = bin()
        .args(["oracle-compare", "--n", "8", "--seed", "1", "--count", "20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().all(|l| l.ends_with("ok")), "{text}");
}

#[test]
fn certify_reports_radius_and_cases() {
    let out = bin()
        .args([
            "certify", "--family", "example1", "--m", "10", "--mu", "2", "--theta", "1",
            "--omega3", "0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rho(bound matrix)"), "{text}");
    assert!(text.contains("H-compatible        : splitting1=true splitting2=true"), "{text}");
}
