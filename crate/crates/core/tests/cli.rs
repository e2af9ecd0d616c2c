use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(args)
        .output()
        .unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_builtin_trefoil() {
    let o = run(&["--mode", "machine", "classify", "builtin:trefoil_right"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "class=RightTrefoil i=1\n");
}

#[test]
fn figure_eight_count() {
    let o = run(&[
        "colorings",
        "builtin:figure_eight",
        "--group",
        "sigma3",
        "--stabilizers",
        "inversions",
    ]);
    assert_eq!(stdout(&o).lines().next(), Some("count=3"));
}

#[test]
fn broken_file_reports_position() {
    let o = run_stdin(&["validate", "-"], "kld 1\nX 1 2 3\n");
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("2:"), "{err}");
}

#[test]
fn random_is_deterministic_and_valid() {
    let a = run(&["--mode", "machine", "random", "--crossings", "9", "--seed", "42"]);
    let b = run(&["--mode", "machine", "random", "--crossings", "9", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let v = run_stdin(&["validate", "-"], &text);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("colored=true"));
    let c = run_stdin(&["--mode", "machine", "classify", "-"], &text);
    assert_eq!(c.status.code(), Some(0));
}

#[test]
fn apply_move_then_classify() {
    let kld = stdout(&run(&["random", "--crossings", "6", "--seed", "1"]));
    let dir = std::env::temp_dir().join(format!("linkforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let log = dir.join("moves.log");
    std::fs::write(&log, "R1_add 1 L over\n").unwrap();
    let o = run_stdin(&["apply-move", "-", log.to_str().unwrap()], &kld);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let before = stdout(&run_stdin(&["--mode", "machine", "classify", "-"], &kld));
    let after = stdout(&run_stdin(&["--mode", "machine", "classify", "-"], &stdout(&o)));
    assert_eq!(before, after);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn oracle_exit_codes() {
    let o = run(&["oracle", "builtin:unknot", "builtin:unknot"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "oracle",
        "builtin:trefoil_right",
        "builtin:unknot",
        "--max-states",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
    // two loops of different colors never merge, and no crossing may be added
    let dir = std::env::temp_dir().join(format!("linkforge-oracle-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.kld"), dir.join("b.kld"));
    std::fs::write(&a, "kld 1\nU 1\nU 2\nG sigma3\nC 1 R\nC 2 G\n").unwrap();
    std::fs::write(&b, "kld 1\nU 1\nG sigma3\nC 1 R\n").unwrap();
    let o = run(&[
        "--mode",
        "machine",
        "oracle",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--max-crossings",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "found=false\n");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn env_overrides_state_bound() {
    let o = Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(["oracle", "builtin:trefoil_right", "builtin:unknot"])
        .env("LINKFORGE_MAX_STATES", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_file_is_written() {
    let path = std::env::temp_dir().join(format!("linkforge-trace-{}.txt", std::process::id()));
    let o = run(&["classify", "builtin:granny_knot", "--trace", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(linkforge::reduce::parse_trace(&text).unwrap().len() > 3);
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_builtin_fails() {
    assert_eq!(run(&["validate", "builtin:nope"]).status.code(), Some(1));
}
