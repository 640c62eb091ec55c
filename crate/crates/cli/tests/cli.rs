use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PAIR: &str = "class Pair\n\n  abstract\n    fst : Int\n    snd : Int\n\nend\n";

const SUM: &str = "\
class Sum

  @tailrec
  loop (i : Int) (n : Int) (acc : Int) : Int =
    if i == n then acc else loop (i + 1) (n) (acc + i)

  total (n : Int) : Int = loop (0) (n) (0)

  plain (n : Int) : Int = if n == 0 then 0 else n + plain (n - 1)

  ratio (a : Int) (b : Int) : Int = a / b

end
";

fn soda(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soda"))
        .args(args)
        .current_dir(dir)
        .env_remove("SODA_MAX_RECURSION")
        .output()
        .expect("run soda")
}

fn workspace(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, text) in files {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "golden", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage() {
    let dir = workspace(&[]);
    let out = soda(dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let dir = workspace(&[]);
    assert_eq!(soda(dir.path(), &["compile", "x.soda"]).status.code(), Some(2));
}

#[test]
fn scala_translation_matches_golden() {
    let dir = workspace(&[("Pair.soda", PAIR)]);
    let out = soda(dir.path(), &["scala", "Pair.soda", "Pair.scala"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("Pair.scala")).unwrap();
    assert_eq!(text, golden("pair.scala"));
}

#[test]
fn lean_translation_defaults_output_name() {
    let dir = workspace(&[("Pair.soda", PAIR)]);
    let out = soda(dir.path(), &["lean", "Pair.soda"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("Pair.lean")).unwrap();
    assert_eq!(text, golden("pair.lean"));
}

#[test]
fn lean_rejects_this_and_writes_nothing() {
    let source = "class Box\n\n  abstract\n    value : Int\n\n  me : Box = this\n\nend\n";
    let dir = workspace(&[("WithThis.soda", source), ("keep.lean", "old\n")]);
    let out = soda(dir.path(), &["lean", "WithThis.soda", "out.lean"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("WithThis.soda:6:14: error[E-LEAN-001]: `this`"),
        "{}",
        stderr(&out)
    );
    assert!(!dir.path().join("out.lean").exists());

    let out = soda(dir.path(), &["lean", "WithThis.soda", "keep.lean"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(std::fs::read_to_string(dir.path().join("keep.lean")).unwrap(), "old\n");
    // Scala accepts the same source.
    assert_eq!(soda(dir.path(), &["scala", "WithThis.soda"]).status.code(), Some(0));
}

#[test]
fn check_reports_diagnostics_in_compiler_format() {
    let source = "class A\n\n  one : Int = 1\n\n  one : Int = 2\n\nend\n";
    let dir = workspace(&[("dup.soda", source), ("ok.soda", PAIR)]);
    let out = soda(dir.path(), &["check", "ok.soda", "dup.soda"]);
    assert_eq!(out.status.code(), Some(1));
    let lines: Vec<String> = stderr(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("dup.soda:5:3: error[E-SEM-001]: "), "{}", lines[0]);

    let out = soda(dir.path(), &["check", "ok.soda"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
}

#[test]
fn warnings_do_not_fail_check() {
    let source = "class A\n\n  one : Int = missing + 1\n\nend\n";
    let dir = workspace(&[("warn.soda", source)]);
    let out = soda(dir.path(), &["check", "warn.soda"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stderr(&out).contains("warn.soda:3:15: warning[W-SEM-040]"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn parse_errors_fail_check() {
    let dir = workspace(&[("bad.soda", "class A\n\n  x = if true then 1\n\nend\n")]);
    let out = soda(dir.path(), &["check", "bad.soda"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[E-PAR-010]"), "{}", stderr(&out));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = workspace(&[]);
    let out = soda(dir.path(), &["check", "nope.soda"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("nope.soda:1:1: error[E-IO-001]: could not read"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn run_evaluates_entry_points() {
    let dir = workspace(&[("Sum.soda", SUM), ("Pair.soda", PAIR)]);
    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.total", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "45\n");

    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.total", "100000"]);
    assert_eq!(stdout(&out), "4999950000\n");

    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.ratio", "-7", "2"]);
    assert_eq!(stdout(&out), "-3\n");
}

#[test]
fn run_reports_runtime_faults() {
    let dir = workspace(&[("Sum.soda", SUM)]);
    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.ratio", "1", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("runtime fault[division_by_zero]"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn recursion_limit_from_flag_and_environment() {
    let dir = workspace(&[("Sum.soda", SUM)]);
    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.plain", "100"]);
    assert_eq!(stdout(&out), "5050\n");

    let out = soda(
        dir.path(),
        &["run", "--max-recursion", "50", "Sum.soda", "Sum.plain", "100"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("runtime fault[recursion_limit]"),
        "{}",
        stderr(&out)
    );

    let out = Command::new(env!("CARGO_BIN_EXE_soda"))
        .args(["run", "Sum.soda", "Sum.plain", "100"])
        .current_dir(dir.path())
        .env("SODA_MAX_RECURSION", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_entry_must_be_qualified() {
    let dir = workspace(&[("Sum.soda", SUM)]);
    assert_eq!(
        soda(dir.path(), &["run", "Sum.soda", "total", "1"]).status.code(),
        Some(2)
    );
    let out = soda(dir.path(), &["run", "Sum.soda", "Sum.nothing"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown_identifier"), "{}", stderr(&out));
}

#[test]
fn fmt_prints_or_rewrites_canonical_layout() {
    let messy = "class   Pair\n\n\n  abstract\n    fst :   Int\n    snd : Int\nend\n";
    let dir = workspace(&[("Pair.soda", messy)]);
    let out = soda(dir.path(), &["fmt", "Pair.soda"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), PAIR);
    assert_eq!(std::fs::read_to_string(dir.path().join("Pair.soda")).unwrap(), messy);

    let out = soda(dir.path(), &["fmt", "--write", "Pair.soda"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("Pair.soda")).unwrap(), PAIR);
}

#[test]
fn directive_target_override() {
    let source = "class A\n\n  directive scala\n    def two = 2\n\n  directive scala3\n    def three = 3\n\nend\n";
    let dir = workspace(&[("A.soda", source)]);
    assert_eq!(soda(dir.path(), &["scala", "A.soda"]).status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("A.scala")).unwrap();
    assert!(text.contains("def two") && !text.contains("def three"), "{text}");

    let out = soda(dir.path(), &["scala", "--directive-target", "scala3", "A.soda"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("A.scala")).unwrap();
    assert!(text.contains("def three") && !text.contains("def two"), "{text}");
}

#[test]
fn outputs_are_reproducible() {
    let dir = workspace(&[("Sum.soda", SUM)]);
    soda(dir.path(), &["scala", "Sum.soda", "a.scala"]);
    soda(dir.path(), &["scala", "Sum.soda", "b.scala"]);
    let a = std::fs::read(dir.path().join("a.scala")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(dir.path().join("b.scala")).unwrap());
}
