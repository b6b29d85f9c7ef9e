use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planar-oracle"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn run_stdin(args: &[&str], dir: &Path, input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unit_grid_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(
        run(&["gen", "--grid", "3x3", "--unit", "--out", "g.pgr"], d)
            .status
            .success()
    );
    assert!(run(
        &["build", "g.pgr", "--mode", "failure", "--out", "o.bin"],
        d
    )
    .status
    .success());
    let out = run_stdin(&["query", "o.bin"], d, "0 8\n0 8 4\n\n0 8 1 3\n8 0\n");
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4\n4\nUNREACHABLE\n4\n");
    std::fs::write(d.join("q.txt"), "0 8 4\n").unwrap();
    let out = run(
        &["query", "o.bin", "--input", "q.txt", "--strategy", "monge"],
        d,
    );
    assert_eq!(stdout(&out), "4\n");
}

#[test]
fn verify_on_a_seeded_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(
        &["gen", "--grid", "16x16", "--seed", "7", "--out", "g.pgr"],
        d
    )
    .status
    .success());
    assert!(run(&["build", "g.pgr", "--out", "o.bin"], d)
        .status
        .success());
    let out = run(
        &["verify", "o.bin", "--samples", "200", "--max-failures", "3"],
        d,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn tradeoff_build_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(
        &["gen", "--grid", "8x8", "--seed", "1", "--out", "g.pgr"],
        d
    )
    .status
    .success());
    let out = run(
        &[
            "build",
            "g.pgr",
            "--mode",
            "tradeoff",
            "--r",
            "16",
            "--k",
            "1",
            "--leaf-size",
            "4",
            "--out",
            "t.bin",
        ],
        d,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        run(&["build", "g.pgr", "--leaf-size", "4", "--out", "f.bin"], d)
            .status
            .success()
    );
    let queries = "0 63 9\n7 56 27\n5 5\n";
    let a = run_stdin(&["query", "t.bin"], d, queries);
    let b = run_stdin(&["query", "f.bin"], d, queries);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(
        run(&["verify", "t.bin", "--max-failures", "1"], d)
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify", "t.bin", "--max-failures", "2"], d)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(
            &["build", "g.pgr", "--mode", "tradeoff", "--r", "17", "--out", "x.bin"],
            d
        )
        .status
        .code(),
        Some(4)
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(&["launch"], d).status.code(), Some(2));
    assert_eq!(run(&["gen", "--grid", "3by3"], d).status.code(), Some(2));
    assert_eq!(run(&["query", "missing.bin"], d).status.code(), Some(3));
    std::fs::write(d.join("junk.bin"), b"not an oracle").unwrap();
    assert_eq!(run(&["query", "junk.bin"], d).status.code(), Some(4));
    assert!(
        run(&["gen", "--grid", "3x3", "--unit", "--out", "g.pgr"], d)
            .status
            .success()
    );
    assert!(run(&["build", "g.pgr", "--out", "o.bin"], d)
        .status
        .success());
    assert_eq!(
        run_stdin(&["query", "o.bin"], d, "0 8 8\n").status.code(),
        Some(4)
    );
    assert_eq!(
        run_stdin(&["query", "o.bin"], d, "0\n").status.code(),
        Some(4)
    );
    let bad = bin()
        .args(["query", "o.bin"])
        .current_dir(d)
        .env("PLANAR_ORACLE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_triangulations_load() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = run(&["gen", "--triangulation", "40", "--seed", "3"], d);
    let b = run(&["gen", "--triangulation", "40", "--seed", "3"], d);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    std::fs::write(d.join("t.pgr"), &a.stdout).unwrap();
    let out = bin()
        .args(["build", "t.pgr", "--out", "o.bin"])
        .current_dir(d)
        .env("PLANAR_ORACLE_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn bench_reports_are_deterministic_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "bench",
        "--sides",
        "6,10",
        "--k",
        "0,2",
        "--samples",
        "15",
        "--seed",
        "4",
        "--format",
        "json",
    ];
    let strip = |o: &Output| -> Vec<serde_json::Value> {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                for key in ["build_ms", "mean_query_us", "p95_query_us"] {
                    r.as_object_mut().unwrap().remove(key);
                }
                r
            })
            .collect()
    };
    let a = run(&args, d);
    let b = run(&args, d);
    assert!(a.status.success());
    let ra = strip(&a);
    assert_eq!(ra, strip(&b));
    assert_eq!(ra.len(), 4);
    assert!(ra.iter().all(|r| r["verified"] == true));
    let csv = run(
        &["bench", "--sides", "6", "--samples", "5", "--out", "r.csv"],
        d,
    );
    assert!(csv.status.success());
    let text = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(text.starts_with("n,r,k,build_ms,bytes_on_disk,mean_query_us,p95_query_us,union_vertex_count_mean,verified\n"));
}

#[test]
fn dyn_script_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(
        run(&["gen", "--grid", "3x3", "--unit", "--out", "g.pgr"], d)
            .status
            .success()
    );
    std::fs::write(
        d.join("s.txt"),
        "query 0 8\ndelete_vertex 4\nquery 0 8 # detour\ndelete_vertex 1\ndelete_vertex 3\nquery 0 8\n",
    )
    .unwrap();
    let out = run(&["dyn", "g.pgr", "s.txt", "--r", "4"], d);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        stdout(&out),
        "line,u,v,distance\n1,0,8,4\n3,0,8,4\n6,0,8,UNREACHABLE\n"
    );
    std::fs::write(d.join("bad.txt"), "query 0 8\ndelete_vertex 99\n").unwrap();
    let out = run(&["dyn", "g.pgr", "bad.txt"], d);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
