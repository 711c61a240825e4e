use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus(suffix: &str) -> Vec<PathBuf> {
    let mut files: Vec<_> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(suffix))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
}

fn frs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frs")).args(args).output().unwrap()
}

fn frs_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_frs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn temp_source(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".frs").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn ok_corpus_checks_and_runs() {
    for f in corpus("_ok.frs") {
        let check = frs(&["check", path(&f)]);
        assert_eq!(code(&check), 0, "{}: {}", f.display(), stderr(&check));
        assert_eq!(stdout(&check), "0 errors, 0 warnings\n");
        let run = frs(&["run", path(&f)]);
        assert_eq!(code(&run), 0, "{}: {}", f.display(), stderr(&run));
        assert_eq!(stdout(&run), fs::read_to_string(f.with_extension("stdout")).unwrap());
    }
}

#[test]
fn invalid_corpus_fails_check_and_run() {
    for f in corpus("_invalid.frs") {
        let check = frs(&["check", path(&f)]);
        assert_eq!(code(&check), 1, "{}", f.display());
        assert!(stderr(&check).contains("error["));
        assert_eq!(code(&frs(&["run", path(&f)])), 1);
    }
}

#[test]
fn borrow_example_reports_borrowed_use() {
    let o = frs(&["check", path(&corpus_dir().join("borrow_invalid.frs"))]);
    assert!(stderr(&o).contains("E-BORROWED-USE"));
    assert_eq!(stdout(&o), "2 errors, 0 warnings\n");
}

#[test]
fn staged_output_reruns_identically() {
    for f in corpus("_ok.frs") {
        let direct = stdout(&frs(&["run", path(&f)]));
        for stage in ["parse", "expand", "desugar"] {
            let text = frs(&[stage, path(&f)]);
            assert_eq!(code(&text), 0);
            let rerun = frs_stdin(&["run", "-"], &stdout(&text));
            assert_eq!(code(&rerun), 0, "{} {}: {}", stage, f.display(), stderr(&rerun));
            assert_eq!(stdout(&rerun), direct, "{} {}", stage, f.display());
        }
    }
}

#[test]
fn tree_and_token_formats() {
    let f = corpus_dir().join("collatz_ok.frs");
    let tree = stdout(&frs(&["desugar", "--format", "tree", path(&f)]));
    assert!(tree.starts_with("(Program"));
    assert!(tree.contains("(MethodCall rem"));
    let toks = stdout(&frs(&["expand", "--format", "tokens", path(&f)]));
    assert!(toks.lines().next().unwrap().contains("Keyword fn"));
    let lexed = stdout(&frs(&["lex", path(&f)]));
    assert!(lexed.lines().any(|l| l.contains("IntLit 25 → 25")));
}

#[test]
fn json_diagnostics() {
    let o = frs(&["check", "--format", "json", path(&corpus_dir().join("box_invalid.frs"))]);
    assert_eq!(code(&o), 1);
    let lines: Vec<_> = stderr(&o).lines().map(str::to_string).collect();
    assert!(lines.iter().all(|l| l.starts_with('{') && l.ends_with('}')));
    assert!(lines.iter().any(|l| l.contains("\"code\":\"E-MOVED-USE\"") && l.contains("\"line\":15")));
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(code(&frs(&["lex", "/nonexistent"])), 2);
    assert_eq!(code(&frs(&["frobnicate", "x.frs"])), 2);
    assert_eq!(code(&frs(&["run"])), 2);
    let f = corpus_dir().join("collatz_ok.frs");
    assert_eq!(code(&frs(&["check", "--format", "tree", path(&f)])), 2);
    assert_eq!(code(&frs(&["parse", "--format", "json", path(&f)])), 2);
}

#[test]
fn stdin_input() {
    let o = frs_stdin(&["run", "-"], "fn main() { println!(\"{}\", 6 * 7); }");
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "42\n");
}

#[test]
fn syntax_errors_exit_1() {
    let o = frs_stdin(&["parse", "-"], "fn main( {");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E-PARSE"));
    let o = frs_stdin(&["lex", "-"], "let s = \"\\a\";");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E-LEX"));
}

#[test]
fn runtime_error_exit_1() {
    let f = temp_source("fn main() {\n  println!(\"before\");\n  let v = vec!(1);\n  println!(\"{}\", v[4]);\n}\n");
    let o = frs(&["run", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "before\n");
    assert!(stderr(&o).contains("error[E-RUNTIME]: index out of bounds"));
    assert!(stderr(&o).contains(":4:"));
}

#[test]
fn unchecked_runs_rejected_programs() {
    let f = corpus_dir().join("borrow_invalid.frs");
    let o = frs(&["run", "--unchecked", path(&f)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "2\n3\n3\n3\n");
}

#[test]
fn deny_warnings() {
    let src = "fn main() { let mut a = 1; println!(\"{}\", a); }";
    let o = frs_stdin(&["check", "-"], src);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0 errors, 1 warning\n");
    assert!(stderr(&o).contains("W-UNUSED-MUT"));
    assert_eq!(code(&frs_stdin(&["check", "--deny-warnings", "-"], src)), 1);
    assert_eq!(code(&frs_stdin(&["run", "--deny-warnings", "-"], src)), 1);
    assert_eq!(code(&frs_stdin(&["run", "-"], src)), 0);
}

#[test]
fn macro_depth_flag_and_env() {
    let src = "macro_rules! m ( ($x:expr) => (m!($x)); );\nfn main() { m!(1); }\n";
    let o = frs_stdin(&["expand", "--macro-depth", "7", "-"], src);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E-MACRO"));
    assert!(stderr(&o).contains('7'));
    let mut child = Command::new(env!("CARGO_BIN_EXE_frs"))
        .args(["expand", "-"])
        .env("FRS_MACRO_DEPTH", "3")
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(src.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains('3'));
}

#[test]
fn caret_points_at_column() {
    let o = frs(&["check", path(&corpus_dir().join("add3_invalid.frs"))]);
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().collect();
    let i = lines.iter().position(|l| l.contains("E-REF-OPERAND")).unwrap();
    assert!(lines[i].contains(":3:9:"), "{}", lines[i]);
    assert_eq!(lines[i + 1], "3 |     3 + x; // invalid! (+ cannot apply to &int)");
    assert_eq!(lines[i + 2], "  |         ^");
}
