use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const EX_A: &str = "kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1 4\n";
const EX_C: &str = "kpcst 1\nn 3 m 3\nroot 0\nk 0\npenalties inf 5 5\ne 0 1 1\ne 1 2 1\ne 0 2 3\n";

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kpcst-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn kpcst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpcst")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &PathBuf, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_ex_a() {
    let dir = scratch("solve");
    let a = write(&dir, "a.kpcst", EX_A);
    let o = kpcst(&["solve", &a]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\nobjective 4\n"), "{}", stdout(&o));
    let o = kpcst(&["solve", &a, "--decimal"]);
    assert!(stdout(&o).contains("objective 4 ~4.000000"));
}

#[test]
fn exact_ex_c() {
    let dir = scratch("exact");
    let c = write(&dir, "c.kpcst", EX_C);
    let o = kpcst(&["exact", &c]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("opt 2\n"), "{}", stdout(&o));
    let o = kpcst(&["exact", &c, "--oracle-limit", "2"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn check_accepts_own_output_and_rejects_tampering() {
    let dir = scratch("check");
    let a = write(&dir, "a.kpcst", EX_A);
    let cert = dir.join("a.result");
    let cert = cert.to_str().unwrap();
    assert!(kpcst(&["solve", &a, "--certificate", cert]).status.success());
    let o = kpcst(&["check", &a, cert]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 certificates verified"));

    let text = fs::read_to_string(cert).unwrap();
    let bad = write(&dir, "bad.result", &text.replacen("objective 4", "objective 3", 1));
    let o = kpcst(&["check", &a, &bad]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");

    let bad = write(&dir, "bad2.result", &text.replacen("y {1} 2", "y {1} 5/2", 1));
    assert!(!kpcst(&["check", &a, &bad]).status.success());
}

#[test]
fn output_is_reproducible() {
    let dir = scratch("repro");
    let g = dir.join("g.kpcst");
    let g = g.to_str().unwrap();
    assert!(kpcst(&["gen", "--n", "11", "--m", "20", "--k", "7", "--max-penalty", "4", "--seed", "9", "-o", g]).status.success());
    let (c1, c2) = (dir.join("1.result"), dir.join("2.result"));
    let a = kpcst(&["solve", g, "--certificate", c1.to_str().unwrap()]);
    let b = kpcst(&["solve", g, "--certificate", c2.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    assert!(kpcst(&["check", g, c1.to_str().unwrap()]).status.success());
}

#[test]
fn bench_sorts_by_name() {
    let dir = scratch("bench");
    write(&dir, "b.kpcst", EX_C);
    write(&dir, "a.kpcst", EX_A);
    write(&dir, "notes.txt", "ignored");
    let d = dir.to_str().unwrap();
    let o = kpcst(&["bench", d, "--jobs", "2", "--no-time"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(
        out,
        "a.kpcst n=2 m=1 k=2 objective=4 opt=4 ratio=1.0000\nb.kpcst n=3 m=3 k=0 objective=2 opt=2 ratio=1.0000\n"
    );
    assert_eq!(stdout(&kpcst(&["bench", d, "--jobs", "1", "--no-time"])), out);
}

#[test]
fn trace_prints_events_and_picking() {
    let dir = scratch("trace");
    let a = write(&dir, "a.kpcst", EX_A);
    let o = kpcst(&["trace", &a, "--lambda", "1", "--tau", "S{1}"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("i=1 Δ=2 S{1}\ni=2 Δ=0 E#0\n"), "{out}");
    assert!(out.contains("picked {1} w=1"));
    let o = kpcst(&["trace", &a, "--lambda", "0"]);
    assert!(stdout(&o).contains("pruned 1 vertices: 0"));
}

#[test]
fn failures_get_one_line_and_a_class_code() {
    let dir = scratch("errors");
    let broken = write(&dir, "broken.kpcst", "kpcst 1\nn 2 m 1\nroot 0\nk 2\npenalties inf 1\ne 0 1\n");
    let o = kpcst(&["solve", &broken]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("kpcst: parse error: line 6"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let invalid = write(&dir, "invalid.kpcst", "kpcst 1\nn 2 m 1\nroot 0\nk 3\npenalties inf 1\ne 0 1 4\n");
    assert_eq!(kpcst(&["solve", &invalid]).status.code(), Some(3));
    assert_eq!(kpcst(&["solve", dir.join("missing.kpcst").to_str().unwrap()]).status.code(), Some(1));
}
