use std::fs;
use std::path::PathBuf;

use frs_core::checker::check_program;
use frs_core::diag::{Diagnostic, Severity};
use frs_core::lexer::tokenize;
use frs_core::macro_engine::{expand_all, DEFAULT_DEPTH_LIMIT};
use frs_core::syntax::parse_program;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn check(src: &str) -> Vec<Diagnostic> {
    let p = parse_program(&tokenize(src).unwrap()).unwrap();
    let p = expand_all(&p, DEFAULT_DEPTH_LIMIT).unwrap();
    check_program(&p)
}

fn codes_on(diags: &[Diagnostic], line: u32) -> Vec<&'static str> {
    diags.iter().filter(|d| d.span.start_line == line && d.is_error()).map(|d| d.code).collect()
}

fn wrap(body: &str) -> String {
    format!("fn main() {{\n{}\n}}\n", body)
}

#[test]
fn annotated_lines_match_corpus_comments() {
    for f in ["add3", "borrow", "box", "inc"] {
        let src = fs::read_to_string(corpus_dir().join(format!("{}_invalid.frs", f))).unwrap();
        let diags = check(&src);
        for (i, line) in src.lines().enumerate() {
            let n = i as u32 + 1;
            let got = codes_on(&diags, n);
            if line.contains("// invalid!") {
                assert!(!got.is_empty(), "{}:{} expected a diagnostic: {}", f, n, line);
            } else if line.contains("// OK") && !line.contains("inc(&") {
                assert!(got.is_empty(), "{}:{} expected none, got {:?}", f, n, got);
            }
        }
    }
}

#[test]
fn inc_call_sites() {
    let src = fs::read_to_string(corpus_dir().join("inc_invalid.frs")).unwrap();
    let diags = check(&src);
    assert_eq!(codes_on(&diags, 12), vec!["E-REF-MISMATCH"]);
    assert!(codes_on(&diags, 13).is_empty());
    assert_eq!(codes_on(&diags, 15), vec!["E-REF-MISMATCH"]);
    assert_eq!(codes_on(&diags, 16), vec!["E-MUTREF-IMMUT"]);
    assert_eq!(codes_on(&diags, 18), vec!["E-REF-MISMATCH"]);
}

#[test]
fn specific_codes() {
    let dir = corpus_dir();
    let borrow = check(&fs::read_to_string(dir.join("borrow_invalid.frs")).unwrap());
    assert_eq!(codes_on(&borrow, 8), vec!["E-BORROWED-USE"]);
    assert_eq!(codes_on(&borrow, 10), vec!["E-BORROWED-USE"]);
    let bx = check(&fs::read_to_string(dir.join("box_invalid.frs")).unwrap());
    assert_eq!(codes_on(&bx, 4), vec!["E-IMMUT-ASSIGN"]);
    assert_eq!(codes_on(&bx, 5), vec!["E-IMMUT-ASSIGN"]);
    assert_eq!(codes_on(&bx, 10), vec!["E-MUTREF-IMMUT"]);
    assert_eq!(codes_on(&bx, 15), vec!["E-MOVED-USE"]);
    let add3 = check(&fs::read_to_string(dir.join("add3_invalid.frs")).unwrap());
    assert_eq!(codes_on(&add3, 3), vec!["E-REF-OPERAND"]);
}

#[test]
fn valid_corpus_has_no_errors() {
    for e in fs::read_dir(corpus_dir()).unwrap() {
        let p = e.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if !name.ends_with("_ok.frs") {
            continue;
        }
        let diags = check(&fs::read_to_string(&p).unwrap());
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        assert!(errors.is_empty(), "{}: {:?}", name, errors);
    }
}

#[test]
fn borrow_released_at_block_end() {
    let d = check(&wrap("let mut a = 1;\n{ let r = &mut a; *r = 2; };\na = 5;\nprintln!(\"{}\", a);"));
    assert!(d.iter().all(|d| !d.is_error()), "{:?}", d);
}

#[test]
fn argument_borrow_is_temporary() {
    let src = "fn bump(x : &mut int) { *x = *x + 1; }\n".to_string()
        + &wrap("let mut a = 1;\nbump(&mut a);\na = 3;\nprintln!(\"{}\", a);");
    assert!(check(&src).iter().all(|d| !d.is_error()));
}

#[test]
fn mutable_borrow_of_shared_is_alias() {
    let d = check(&wrap("let mut a = 1;\nlet s = &a;\nlet m = &mut a;\nprintln!(\"{} {}\", s, m);"));
    assert_eq!(codes_on(&d, 4), vec!["E-ALIAS"]);
}

#[test]
fn reassigning_moved_box_restores_it() {
    let d = check(&wrap("let mut w = box 1i;\nlet z = w;\nw = box 2i;\nprintln!(\"{} {}\", w, z);"));
    assert!(d.iter().all(|d| !d.is_error()), "{:?}", d);
    let d = check(&wrap("let w = box 1i;\nlet z = w;\nprintln!(\"{}\", w);"));
    assert_eq!(codes_on(&d, 4), vec!["E-MOVED-USE"]);
}

#[test]
fn ints_copy() {
    let d = check(&wrap("let a = 1;\nlet b = a;\nprintln!(\"{} {}\", a, b);"));
    assert!(d.is_empty(), "{:?}", d);
}

#[test]
fn unused_mut_warns() {
    let d = check(&wrap("let mut a = 1;\nprintln!(\"{}\", a);"));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].severity, Severity::Warning);
    assert_eq!(d[0].code, "W-UNUSED-MUT");
    assert_eq!(d[0].span.start_line, 2);
}

#[test]
fn mut_self_method_needs_mutable_receiver() {
    let src = "struct C { n: int }\nimpl C { fn bump(&mut self) { self.n += 1; } fn get(&self) -> int { self.n } }\n"
        .to_string()
        + &wrap("let c = C { n: 1 };\nc.bump();\nc.get();\nlet mut d = C { n: 1 };\nd.bump();");
    let d = check(&src);
    assert_eq!(codes_on(&d, 5), vec!["E-MUTREF-IMMUT"]);
    assert!(codes_on(&d, 6).is_empty());
    assert!(codes_on(&d, 8).is_empty());
}

#[test]
fn shadowing_scope_is_restored() {
    let d = check(&wrap("let a = 1;\n{ let mut a = 2; a = 3; println!(\"{}\", a); };\na = 4;"));
    assert!(codes_on(&d, 3).is_empty());
    assert_eq!(codes_on(&d, 4), vec!["E-IMMUT-ASSIGN"]);
}

#[test]
fn deterministic_and_sorted() {
    let src = fs::read_to_string(corpus_dir().join("box_invalid.frs")).unwrap();
    let a = check(&src);
    assert_eq!(a, check(&src));
    let lines: Vec<_> = a.iter().map(|d| (d.span.start_line, d.span.start_col)).collect();
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
}
