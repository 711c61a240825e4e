use std::fs;
use std::path::PathBuf;

use frs_core::desugar::desugar_program;
use frs_core::interp::{run_program, RunOutcome, RuntimeErrorKind as K};
use frs_core::pipeline::{expand, run_to_string, DEFAULT_DEPTH_LIMIT};
use proptest::prelude::*;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Runs without the checker, desugared.
fn run_raw(src: &str) -> RunOutcome {
    run_program(&desugar_program(&expand(src, DEFAULT_DEPTH_LIMIT).unwrap()))
}

fn run_surface(src: &str) -> RunOutcome {
    run_program(&expand(src, DEFAULT_DEPTH_LIMIT).unwrap())
}

fn main_printing(expr: &str) -> String {
    format!("fn main() {{ println!(\"{{}}\", {}); }}", expr)
}

fn value_of(expr: &str) -> String {
    let out = run_raw(&main_printing(expr));
    assert!(out.is_ok(), "{}: {:?}", expr, out.error);
    out.stdout.trim_end().to_string()
}

fn error_of(src: &str) -> K {
    run_raw(src).error.expect("expected a runtime error").kind
}

#[test]
fn corpus_stdout_matches() {
    for e in fs::read_dir(corpus_dir()).unwrap() {
        let p = e.unwrap().path();
        if !p.to_string_lossy().ends_with("_ok.frs") {
            continue;
        }
        let want = fs::read_to_string(p.with_extension("stdout")).unwrap();
        let src = fs::read_to_string(&p).unwrap();
        assert_eq!(run_to_string(&src), want, "{}", p.display());
        assert_eq!(run_surface(&src).stdout, want, "{} (surface)", p.display());
    }
}

#[test]
fn empty_main() {
    let out = run_raw("fn main() {}");
    assert!(out.is_ok());
    assert_eq!(out.stdout, "");
}

#[test]
fn missing_main() {
    assert!(matches!(error_of("fn f() {}"), K::MissingEntry(_)));
}

#[test]
fn block_values() {
    assert_eq!(value_of("{1; 2; 3}"), "3");
    assert_eq!(value_of("{1; 2;}"), "()");
    assert_eq!(value_of("()"), "()");
    assert_eq!(value_of("if false { 1 }"), "()");
}

#[test]
fn match_arms_in_order() {
    let src = "fn c(e: int) -> int { match e { 0 | 1 => 1, t @ 2 => t + 1, n if n < 10 => 3, _ => 4 } }
               fn main() { println!(\"{} {} {} {}\", c(1), c(2), c(9), c(10)); }";
    assert_eq!(run_raw(src).stdout, "1 3 3 4\n");
}

#[test]
fn non_exhaustive_match() {
    assert!(matches!(
        error_of("fn main() { match 3 { 1 => 1, 2 => 2 }; }"),
        K::NonExhaustiveMatch(_)
    ));
}

#[test]
fn record_update_keeps_unlisted_fields() {
    let src = "struct R { a: int, b: int, c: int }
               fn main() { let z = R { a: 10, b: 20, c: 5 }; let r = R { a: 30, ..z }; println!(\"{}\", r); }";
    assert_eq!(run_raw(src).stdout, "R { a: 30, b: 20, c: 5 }\n");
}

#[test]
fn integer_widths_wrap() {
    assert_eq!(value_of("255u8 + 1u8"), "0");
    assert_eq!(value_of("255u8 + 1"), "0");
    assert_eq!(value_of("0u8 - 1"), "255");
    assert_eq!(value_of("127i8 + 1"), "-128");
    assert_eq!(value_of("65535u16 * 65535u16"), "1");
    assert_eq!(value_of("2147483647i32 + 1"), "-2147483648");
    assert_eq!(value_of("0u32 - 1"), "4294967295");
    assert_eq!(value_of("9223372036854775807 + 1"), "-9223372036854775808");
    assert_eq!(value_of("0u - 1"), "18446744073709551615");
    assert_eq!(value_of("1u8 << 9"), "2");
    assert_eq!(value_of("-8 >> 1"), "-4");
}

#[test]
fn division_by_zero() {
    assert_eq!(error_of(&main_printing("1 / 0")), K::DivisionByZero);
    assert_eq!(error_of(&main_printing("1 % 0")), K::DivisionByZero);
    assert_eq!(value_of("-7 / 2"), "-3");
    assert_eq!(value_of("-7 % 2"), "-1");
}

#[test]
fn vector_bound_check() {
    let src = "fn main() { let v = vec!(1, 2, 3); println!(\"{}\", v[3]); }";
    assert_eq!(error_of(src), K::IndexOutOfBounds { index: 3, len: 3 });
    let src = "fn main() { let mut v = vec!(1, 2, 3); *v.get_mut(5) = 1; }";
    assert_eq!(error_of(src), K::IndexOutOfBounds { index: 5, len: 3 });
    assert_eq!(value_of("vec!(4, 5, 6)[2]"), "6");
}

#[test]
fn vector_mutation_through_box() {
    let src = "fn main() {
        let mut w = box vec!(1i, 2, 3);
        *w.get_mut(0) = 42;
        w[1] = 7;
        w.push(9);
        println!(\"{} {}\", w, w.len());
    }";
    assert_eq!(run_to_string(src), "[42, 7, 3, 9] 4\n");
}

#[test]
fn moved_box_keeps_contents() {
    let src = "fn main() {
        let mut w = box vec!(1i, 2, 3);
        *w.get_mut(0) = 42;
        let z = w;
        w = box vec!(2i, 4, 5);
        println!(\"{} {}\", w, z);
    }";
    assert_eq!(run_to_string(src), "[2, 4, 5] [42, 2, 3]\n");
}

#[test]
fn write_through_mut_ref_is_visible() {
    let src = "fn main() {
        let mut a = 1;
        { let ra = &mut a; *ra = 3; a = 4; *ra = 5; };
        println!(\"{}\", a);
    }";
    assert_eq!(run_raw(src).stdout, "5\n");
}

#[test]
fn inc_through_reference() {
    let src = "fn inc(x : &mut int) { *x = *x + 1; }
               fn main() { let mut v = 3; inc(&mut v); inc(&mut v); println!(\"{}\", v); }";
    assert_eq!(run_to_string(src), "5\n");
}

#[test]
fn shared_ref_is_immutable() {
    let src = "use std::rc::Rc;
               fn main() { let mut b = Rc::new(3); *b = 4; }";
    assert_eq!(error_of(src), K::SharedMutation);
    let src = "use std::rc::Rc;
               struct P { x: int }
               fn main() { let mut b = Rc::new(P { x: 1 }); b.x = 2; }";
    assert_eq!(error_of(src), K::SharedMutation);
    let src = "use std::rc::Rc;
               fn main() { let mut b = Rc::new(vec!(1)); b.push(2); }";
    assert_eq!(error_of(src), K::SharedMutation);
}

#[test]
fn rc_clone_shares() {
    let src = "use std::rc::Rc;
               fn main() { let b = Rc::new(vec!(1, 2)); let c = b.clone(); println!(\"{} {}\", b, c); }";
    assert_eq!(run_to_string(src), "[1, 2] [1, 2]\n");
}

#[test]
fn methods_and_dispatch() {
    let src = "struct C { n: int }
        trait Show { fn show(&self) -> int { 100 + self.n } fn twice(&self) -> int; }
        impl C { fn get(&self) -> int { self.n } fn bump(&mut self) { self.n += 1; } fn make(n: int) -> C { C { n: n } } }
        impl Show for C { fn twice(&self) -> int { 2 * self.n } }
        fn main() {
            let mut c = C::make(1);
            c.bump();
            println!(\"{} {} {}\", c.get(), c.show(), c.twice());
        }";
    assert_eq!(run_to_string(src), "2 102 4\n");
}

#[test]
fn inherent_shadows_trait() {
    let src = "struct C { n: int }
        trait T { fn f(&self) -> int; }
        impl T for C { fn f(&self) -> int { 1 } }
        impl C { fn f(&self) -> int { 2 } }
        fn main() { let c = C { n: 0 }; println!(\"{}\", c.f()); }";
    assert_eq!(run_to_string(src), "2\n");
}

#[test]
fn ambiguous_trait_methods() {
    let src = "struct C { n: int }
        trait A { fn f(&self) -> int; }
        trait B { fn f(&self) -> int; }
        impl A for C { fn f(&self) -> int { 1 } }
        impl B for C { fn f(&self) -> int { 2 } }
        fn main() { let c = C { n: 0 }; c.f(); }";
    assert!(matches!(error_of(src), K::AmbiguousMethod(_)));
}

#[test]
fn no_method_found() {
    assert!(matches!(error_of("fn main() { ().frobnicate(); }"), K::NoMethodFound { .. }));
}

#[test]
fn arity_and_unknown_identifier() {
    assert!(matches!(error_of("fn f(x: int) {} fn main() { f(1, 2); }"), K::ArityMismatch { .. }));
    assert!(matches!(error_of("fn main() { nope; }"), K::UnknownIdentifier(_)));
}

#[test]
fn format_arity() {
    let src = "fn main() { println!(\"{}\", 1, 2); }";
    assert_eq!(error_of(src), K::FormatArityMismatch { placeholders: 1, args: 2 });
}

#[test]
fn display_forms() {
    assert_eq!(value_of("(1, 'a', \"s\", true)"), "(1, a, s, true)");
    assert_eq!(value_of("vec!(1.5, 2.0)"), "[1.5, 2]");
    assert_eq!(value_of("1.0f32 / 3.0"), "0.33333334");
    assert_eq!(value_of("1.0 / 3.0"), "0.3333333333333333");
    assert_eq!(value_of("box box 7"), "7");
    assert_eq!(value_of("[0u8, ..3]"), "[0, 0, 0]");
}

#[test]
fn range_iteration() {
    let src = "fn main() { for i in range(5, 5) { println!(\"{}\", i); } for i in range(0, 3) { print!(\"{}\", i); } }";
    assert_eq!(run_to_string(src), "012");
}

#[test]
fn user_iterator_drives_for() {
    let src = "enum Option<T> { None, Some(T) }
        struct Two { left: int }
        impl Two { fn next(&mut self) -> Option<int> {
            if self.left == 0 { None } else { self.left -= 1; Some(self.left) } } }
        fn main() { for x in (Two { left: 2 }) { println!(\"{}\", x); } }";
    assert_eq!(run_to_string(src), "1\n0\n");
}

#[test]
fn bad_iterator() {
    let src = "struct S { n: int }
        impl S { fn next(&mut self) -> int { 3 } }
        fn main() { for x in (S { n: 0 }) { } }";
    assert!(matches!(run_surface(src).error.unwrap().kind, K::BadIterator(_)));
}

#[test]
fn closures_capture_environment() {
    let src = "fn apply(f: |int| -> int, x: int) -> int { f(x) }
        fn main() { let k = 10; println!(\"{}\", apply(|x| x + k, 5)); }";
    assert_eq!(run_to_string(src), "15\n");
}

#[test]
fn deep_recursion_within_limit() {
    let src = "fn down(n: int) -> int { if n == 0 { 0 } else { 1 + down(n - 1) } }
               fn main() { println!(\"{}\", down(9000)); }";
    assert_eq!(run_to_string(src), "9000\n");
}

#[test]
fn stack_overflow_is_reported() {
    let src = "fn f(n: int) -> int { f(n + 1) } fn main() { f(0); }";
    assert_eq!(error_of(src), K::StackOverflow(10_000));
}

#[test]
fn trait_default_ne_matches_not_eq() {
    let src = fs::read_to_string(corpus_dir().join("peano_ok.frs")).unwrap();
    let names = ["zero", "one", "two"];
    let mut body = String::new();
    for a in names {
        for b in names {
            body.push_str(&format!("println!(\"{{}} {{}}\", {a} != {b}, !{a}.eq(&{b}));\n"));
        }
    }
    let src = src.replace(
        "    println!(\"{} {}\", zero == zero, zero != zero);",
        &format!("{}    println!(\"{{}} {{}}\", zero == zero, zero != zero);", body),
    );
    let out = run_to_string(&src);
    for line in out.lines().take(9) {
        let (x, y) = line.split_once(' ').unwrap();
        assert_eq!(x, y, "{}", out);
    }
}

const OPS: [&str; 16] = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>", "==", "!=", "<", ">", "<=", ">="];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sugared_equals_desugared(op in 0usize..16, a in -50i64..50, b in -50i64..50) {
        let src = main_printing(&format!("({}) {} ({})", a, OPS[op], b));
        let surface = run_surface(&src);
        let desugared = run_raw(&src);
        prop_assert_eq!(surface.stdout, desugared.stdout);
        prop_assert_eq!(surface.error.map(|e| e.kind), desugared.error.map(|e| e.kind));
    }

    #[test]
    fn u8_addition_wraps(a in 0u8..=255, b in 0u8..=255) {
        prop_assert_eq!(value_of(&format!("{}u8 + {}u8", a, b)), a.wrapping_add(b).to_string());
    }

    #[test]
    fn i16_multiplication_wraps(a in any::<i16>(), b in any::<i16>()) {
        prop_assert_eq!(value_of(&format!("({}i16) * ({}i16)", a, b)), a.wrapping_mul(b).to_string());
    }

    #[test]
    fn index_past_end_fails(n in 1usize..8, extra in 0usize..4) {
        let elems = vec!["1"; n].join(", ");
        let src = format!("fn main() {{ let v = vec!({}); println!(\"{{}}\", v[{}]); }}", elems, n + extra);
        prop_assert_eq!(error_of(&src), K::IndexOutOfBounds { index: (n + extra) as i128, len: n });
    }
}
