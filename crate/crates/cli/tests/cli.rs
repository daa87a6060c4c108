use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_simplext");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn replay_args(report: &str) -> Vec<String> {
    let line = report
        .lines()
        .find_map(|l| l.strip_prefix("replay: "))
        .expect("report has a replay line");
    let words = shlex::split(line).expect("replay line splits");
    assert_eq!(words[0], "simplext");
    words[1..].to_vec()
}

fn check_golden(args: &[&str], code: i32, name: &str) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(code), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text, golden(name));
    let again: Vec<String> = replay_args(&text);
    let again: Vec<&str> = again.iter().map(String::as_str).collect();
    let o2 = run(&again);
    assert_eq!(o2.status.code(), Some(code));
    assert_eq!(stdout(&o2), text);
}

#[test]
fn eval_examples() {
    let o = run(&["eval", "--algebra", "fixtures/ba2.alg", "--term", "and(x,not(x))", "--bind", "x=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["eval", "--algebra", "fixtures/z4.alg", "--term", "plus(x,x)", "--bind", "x=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
}

#[test]
fn eval_errors_are_input_errors() {
    let o = run(&["eval", "--algebra", "fixtures/ba2.alg", "--term", "and(x)", "--bind", "x=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column 1"), "{}", stderr(&o));
    let o = run(&["eval", "--algebra", "fixtures/ba2.alg", "--term", "and(x)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("argument"), "{}", stderr(&o));
    let o = run(&["eval", "--algebra", "fixtures/ba2.alg", "--term", "not(y)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "--algebra", "fixtures/missing.alg", "--term", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn injectivity_failure_report() {
    check_golden(
        &["check-injective", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--max-size", "4"],
        1,
        "check-injective-z2-exp4.txt",
    );
}

#[test]
fn completeness_failure_report() {
    check_golden(
        &["check-complete", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--max-size", "4"],
        1,
        "check-complete-z2-exp4.txt",
    );
}

#[test]
fn trivial_algebra_is_complete() {
    check_golden(
        &["check-complete", "--algebra", "fixtures/trivial.alg", "--variety", "fixtures/boolean.var", "--max-size", "2"],
        0,
        "check-complete-trivial-boolean.txt",
    );
}

#[test]
fn crosscheck_reports() {
    check_golden(
        &["crosscheck", "--algebra", "fixtures/ba4.alg", "--variety", "fixtures/boolean.var", "--max-size", "8"],
        0,
        "crosscheck-ba4-boolean.txt",
    );
    check_golden(
        &["crosscheck", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--max-size", "4"],
        1,
        "crosscheck-z2-exp4.txt",
    );
}

#[test]
fn report_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("simplext-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.txt");
    let p = path.to_str().unwrap();
    let o = run(&["check-injective", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/exp4.var", "--report", p]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn caps_exit_three() {
    let o = run(&[
        "check-complete",
        "--algebra",
        "fixtures/z2.alg",
        "--variety",
        "fixtures/exp4.var",
        "--model-cap",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.contains("verdict: CAP"));
    let again = replay_args(&text);
    assert!(again.contains(&"--model-cap".to_string()));
    let o = run(&["free", "--variety", "fixtures/boolean.var", "--gens", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn input_errors_exit_two() {
    let o = run(&["check-complete", "--algebra", "fixtures/z2.alg", "--variety", "fixtures/boolean.var"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("signatures"));
    let o = run(&["check-complete", "--algebra", "fixtures/z4.alg", "--variety", "fixtures/exp2.var"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("plus(x,x) = zero"), "{}", stderr(&o));
}

#[test]
fn free_sizes() {
    for (var, k, n) in [("boolean", "1", "4"), ("boolean", "2", "16"), ("exp2", "1", "2"), ("semilattice", "2", "3")] {
        let o = run(&["free", "--variety", &format!("fixtures/{var}.var"), "--gens", k]);
        assert_eq!(o.status.code(), Some(0), "{var} {k}: {}", stderr(&o));
        assert_eq!(stdout(&o), format!("{n}\n"), "{var} {k}");
    }
}

#[test]
fn free_tables_reload() {
    let o = run(&["free", "--variety", "fixtures/boolean.var", "--gens", "1", "--tables"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let dir = std::env::temp_dir().join(format!("simplext-free-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.alg");
    std::fs::write(&path, body).unwrap();
    let o = run(&[
        "eval",
        "--algebra",
        path.to_str().unwrap(),
        "--term",
        "or(x,not(x))",
        "--bind",
        "x=e0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--cases", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("seed: 1729\n"));
}
