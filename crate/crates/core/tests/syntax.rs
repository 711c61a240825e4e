use std::fs;
use std::path::PathBuf;

use frs_core::lexer::tokenize;
use frs_core::syntax::*;

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "frs"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

fn parse(src: &str) -> Program {
    parse_program(&tokenize(src).unwrap()).unwrap_or_else(|e| panic!("{:?}\n{}", e, src))
}

#[test]
fn corpus_parses_and_round_trips() {
    for (name, src) in corpus() {
        let p = parse(&src);
        let printed = print_program(&p);
        let again = parse(&printed);
        assert_eq!(p, again, "{} did not round-trip:\n{}", name, printed);
        assert_eq!(printed, print_program(&again), "{} printing is not stable", name);
    }
}

#[test]
fn collatz_has_two_functions() {
    let p = parse(&fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/collatz_ok.frs")).unwrap());
    assert_eq!(p.items.iter().filter(|i| matches!(i, Item::Fn(_))).count(), 2);
}

#[test]
fn peano_impl_block() {
    let p = parse(&fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/peano_ok.frs")).unwrap());
    let imp = p
        .items
        .iter()
        .find_map(|i| match i {
            Item::Impl(b) => Some(b),
            _ => None,
        })
        .unwrap();
    assert_eq!(imp.trait_name(), Some("PartialEq"));
    assert_eq!(imp.methods.len(), 1);
}

#[test]
fn record_update_prints_canonically() {
    let e = parse_expression(&tokenize("R{a:30, ..z}").unwrap()).unwrap();
    assert_eq!(print_expr(&e), "R { a: 30, ..z }");
}

#[test]
fn block_round_trip() {
    let e = parse_expression(&tokenize("{x;y;}").unwrap()).unwrap();
    let again = parse_expression(&tokenize(&print_expr(&e)).unwrap()).unwrap();
    assert_eq!(e, again);
}

#[test]
fn tricky_forms_round_trip() {
    let srcs = [
        "fn main() { (if a { b } else { c }) + 1; }",
        "fn main() { match x { _ => 1 }.foo(); }",
        "fn main() { if (S { a: 1 }).a == 1 { } }",
        "fn main() { let f = |x| x + 1; (|y| y)(2); }",
        "fn main() { a = b = c; x += -(-y); *p.q = &mut r[0]; }",
        "fn main() { let (a, b) = (1,); let &(ref mut c) = d; }",
        "fn main() { match v { A::B | C() => 1, D { x: 1, y, .. } => 2, -3 => 3, 'c' => 4, b'q' => 5 } }",
        "fn main() { (1).x; 1.foo(); (2.5).sqrt(); t.0.1; box(GC) 3; box (a + b); }",
        "fn main() { x = match a { _ => 1 } y }",
        "fn main() { return; } fn g() -> int { return 1 + 2 }",
        "fn f(g: |int, int| -> int, h: &mut Vec<Box<int>>) -> (int,) { (g(1, 2),) }",
        r#"fn main() { let s = "a\"b\n\u00e9"; let c = '\''; let bs = b"\x00\xff\""; }"#,
        "fn main() { a - (b - c); (a * b) * c; a * (b + c); -a.b; (-a).b; !(a == b); }",
        "fn main() { for x in range(0, 3) { loop { break; } while a < b { continue; } } }",
    ];
    for src in srcs {
        let p = parse(src);
        let printed = print_program(&p);
        assert_eq!(p, parse(&printed), "{}\n=> {}", src, printed);
    }
}

#[test]
fn tree_dump_is_stable() {
    let p = parse("fn main() { let x = 1 + 2; f(x) }");
    let dump = dump_program(&p);
    let expected = "\
(Program
  (Fn main
    (Block
      (Let
        (PBind x)
        (Binary +
          (Lit 1)
          (Lit 2)))
      (Tail
        (Call
          (Path f)
          (Path x))))))
";
    assert_eq!(dump, expected);
}
