//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use frs_core::checker::check_program;
use frs_core::desugar::desugar_program;
use frs_core::diag::Diagnostic;
use frs_core::interp::{run_program, RunOutcome, RuntimeErrorKind};
use frs_core::lexer::{tokenize, LexErrorKind, Payload, Suffix, TokenKind};
use frs_core::macro_engine::{expand_all, MacroError, DEFAULT_DEPTH_LIMIT};
use frs_core::pipeline::{expand, run, run_to_string, RunReport};
use frs_core::syntax::{parse_program, print_program, Item, Program};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

fn corpus_sources() -> Vec<(String, String)> {
    let mut out: Vec<_> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "frs"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn parse(src: &str) -> Program {
    parse_program(&tokenize(src).unwrap()).unwrap()
}

/// Expanded and desugared, no checker.
fn run_desugared(src: &str) -> RunOutcome {
    run_program(&desugar_program(&expand(src, DEFAULT_DEPTH_LIMIT).unwrap()))
}

/// Expanded only; operators and `for` stay in surface form.
fn run_sugared(src: &str) -> RunOutcome {
    run_program(&expand(src, DEFAULT_DEPTH_LIMIT).unwrap())
}

fn lines_of<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string() + "\n").collect()
}

// ---------------------------------------------------------------------------
// 1. Literal tables

fn single(src: &str) -> Payload {
    let toks = tokenize(src).unwrap_or_else(|e| panic!("{}: {:?}", src, e));
    assert_eq!(toks.len(), 1, "{} lexed to {:?}", src, toks);
    toks.into_iter().next().unwrap().payload
}

fn assert_int(src: &str, value: u64, suffix: Suffix) {
    assert_eq!(single(src), Payload::Int { value: BigUint::from(value), suffix }, "{}", src);
}

fn assert_float(src: &str, same_as: &str, suffix: Suffix) {
    let want: f64 = same_as.parse().unwrap();
    match single(src) {
        Payload::Float { value, suffix: s } => {
            assert_eq!(value.to_bits(), want.to_bits(), "{}: {} vs {}", src, value, want);
            assert_eq!(s, suffix, "{}", src);
        }
        other => panic!("{}: {:?}", src, other),
    }
}

fn rejected(src: &str) {
    match tokenize(src) {
        Err(e) => assert!(matches!(e.kind, LexErrorKind::InvalidEscape(_)), "{}: {:?}", src, e),
        Ok(t) => panic!("{} should be rejected, got {:?}", src, t),
    }
}

fn criterion_1() {
    use Suffix::*;
    for (src, suffix) in [
        ("123i", I),
        ("123u", U),
        ("123i8", I8),
        ("123u8", U8),
        ("123i16", I16),
        ("123u16", U16),
        ("123i32", I32),
        ("123u32", U32),
        ("123i64", I64),
        ("123u64", U64),
    ] {
        assert_int(src, 123, suffix);
    }
    assert_int("1_2_3_4", 1234, Untyped);
    assert_int("1234_i", 1234, I);
    assert_int("0x1234", 4660, Untyped);
    assert_int("0x1234u16", 4660, U16);
    assert_int("0b1010", 10, Untyped);
    assert_int("0o1234", 668, Untyped);
    assert_eq!(single("b'a'"), Payload::Byte(97));
    assert_eq!(single("b\"a\""), Payload::ByteStr(vec![97]));

    assert_float("12.34", "12.34", Untyped);
    assert_float("12.34f32", "12.34", F32);
    assert_float("12.34f64", "12.34", F64);
    for src in ["12e34", "12E34", "12E+34"] {
        assert_float(src, "1.2e35", Untyped);
    }
    assert_float("12E-34", "1.2e-33", Untyped);
    assert_float("1_2e34", "12e34", Untyped);
    assert_float("1_2e3_4", "12e34", Untyped);

    // Escapes: (body, code point) in char, byte and string form.
    for (body, unit) in [
        (r"\x61", 0x61u32),
        (r"\\", 0x5c),
        (r"\'", 0x27),
        (r"\0", 0x00),
        (r"\t", 0x09),
        (r"\n", 0x0a),
        (r"\r", 0x0d),
    ] {
        let c = char::from_u32(unit).unwrap();
        assert_eq!(single(&format!("'{}'", body)), Payload::Char(c), "{}", body);
        assert_eq!(single(&format!("b'{}'", body)), Payload::Byte(unit as u8), "{}", body);
        if body != r"\'" {
            assert_eq!(single(&format!("\"{}\"", body)), Payload::Str(c.to_string()), "{}", body);
        }
    }
    assert_eq!(single(r#""\"""#), Payload::Str("\x22".into()));
    assert_eq!(single(r"'\u0123'"), Payload::Char('\u{0123}'));
    assert_eq!(single(r#""\u0123""#), Payload::Str("\u{0123}".into()));
    assert_eq!(single(r"'\U00012345'"), Payload::Char('\u{12345}'));
    assert_eq!(single(r#""\U00012345""#), Payload::Str("\u{12345}".into()));
    for bad in [r"'\a'", r"'\f'", r#""\a""#, r#""\f""#, r"b'\a'", r#"b"\f""#, r#""\0123""#, r"'\012'"] {
        rejected(bad);
    }

    // Raw strings: (source, value) pairs; the byte form is the same body with a
    // `b` prefix.
    let foo_bar: Vec<u8> = vec![102, 111, 111, 35, 34, 35, 98, 97, 114];
    for (src, value, bytes) in [
        (r#""foo""#, "foo", vec![102u8, 111, 111]),
        (r#""fo\"o""#, "fo\"o", vec![102, 111, 34, 111]),
        (r#"r"fo\n""#, "fo\\n", vec![102, 111, 92, 110]),
        (r##"r#"fo\"o"#"##, "fo\\\"o", vec![102, 111, 92, 34, 111]),
        (r##""foo#\"#bar""##, "foo#\"#bar", foo_bar.clone()),
        (r###"r##"foo#"#bar"##"###, "foo#\"#bar", foo_bar.clone()),
    ] {
        assert_eq!(single(src), Payload::Str(value.into()), "{}", src);
        assert_eq!(value.as_bytes(), &bytes[..], "{}", src);
        let bsrc = match src.strip_prefix('r') {
            Some(rest) => format!("rb{}", rest),
            None => format!("b{}", src),
        };
        assert_eq!(single(&bsrc), Payload::ByteStr(bytes), "{}", bsrc);
    }
}

// ---------------------------------------------------------------------------
// 2. Corpus execution

fn collatz_oracle(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    loop {
        n = if n % 2 == 0 { n / 2 } else { 3 * n + 1 };
        out.push(n);
        if n == 1 {
            return out;
        }
    }
}

/// The `pfor!` body written out by hand: a do-while counting loop.
fn pfor_oracle(s: i64, e: i64, step: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut x = s;
    loop {
        out.push(x);
        x += step;
        if x > e {
            return out;
        }
    }
}

fn criterion_2() {
    let collatz = collatz_oracle(25);
    assert_eq!(collatz.len(), 23);
    assert_eq!(run_to_string(&corpus_file("collatz_ok.frs")), lines_of(&collatz));
    assert_eq!(run_to_string(&corpus_file("while_collatz_ok.frs")), corpus_file("while_collatz_ok.stdout"));
    assert_eq!(run_to_string(&corpus_file("list_ok.frs")), "2\n");

    // Hand-evaluated: Peano numbers are equal iff they have the same depth.
    let depth = |name: &str| ["zero", "one", "two"].iter().position(|n| *n == name).unwrap();
    let pairs = [("zero", "zero"), ("zero", "two"), ("two", "zero"), ("two", "two"), ("one", "two")];
    let want: String = pairs
        .iter()
        .map(|(a, b)| {
            let eq = depth(a) == depth(b);
            format!("{} {}\n", eq, !eq)
        })
        .collect();
    assert_eq!(run_to_string(&corpus_file("peano_ok.frs")), want);

    assert_eq!(run_to_string(&corpus_file("pfor_ok.frs")), lines_of(pfor_oracle(0, 10, 1)));
    let mut want = pfor_oracle(0, 10, 2);
    assert_eq!(want, vec![0, 2, 4, 6, 8, 10]);
    want.extend(pfor_oracle(1, 3, 1));
    assert_eq!(run_to_string(&corpus_file("pfor_step_ok.frs")), lines_of(want));
    assert_eq!(run_to_string(&corpus_file("printall_ok.frs")), "hello\n42\n3.14\n");

    for (name, src) in corpus_sources() {
        if let Some(stem) = name.strip_suffix("_ok.frs") {
            assert_eq!(run_to_string(&src), corpus_file(&format!("{}_ok.stdout", stem)), "{}", name);
        }
    }
}

// ---------------------------------------------------------------------------
// 3. Checker annotations

/// Lines annotated `// OK` that are nevertheless errors, with the code given.
const ERRATA: [(&str, u32, &str); 2] = [
    ("inc_invalid.frs", 16, "E-MUTREF-IMMUT"),
    ("inc_invalid.frs", 18, "E-REF-MISMATCH"),
];

fn criterion_3() {
    let mut exceptions = 0;
    for (name, src) in corpus_sources() {
        let diags = check_program(&expand(&src, DEFAULT_DEPTH_LIMIT).unwrap());
        let on = |line: u32| -> Vec<&Diagnostic> {
            diags.iter().filter(|d| d.is_error() && d.span.start_line == line).collect()
        };
        if name.ends_with("_ok.frs") {
            assert!(diags.iter().all(|d| !d.is_error()), "{}: {:?}", name, diags);
            continue;
        }
        for (i, line) in src.lines().enumerate() {
            let n = i as u32 + 1;
            let got = on(n);
            if let Some((_, _, code)) = ERRATA.iter().find(|(f, l, _)| *f == name && *l == n) {
                assert!(line.contains("// OK"), "{}:{} is not an OK line", name, n);
                assert_eq!(got.iter().map(|d| d.code).collect::<Vec<_>>(), vec![*code], "{}:{}", name, n);
                exceptions += 1;
            } else if line.contains("// invalid!") {
                assert!(!got.is_empty(), "{}:{} has no diagnostic: {}", name, n, line);
            } else if line.contains("// OK") {
                assert!(got.is_empty(), "{}:{} unexpected {:?}", name, n, got);
            }
        }
        // No error lands on an unannotated line either.
        for d in diags.iter().filter(|d| d.is_error()) {
            let line = src.lines().nth(d.span.start_line as usize - 1).unwrap_or("");
            let erratum = ERRATA.iter().any(|(f, l, _)| *f == name && *l == d.span.start_line);
            assert!(line.contains("// invalid!") || erratum, "{}: stray {:?}", name, d);
        }
    }
    assert_eq!(exceptions, ERRATA.len());
}

// ---------------------------------------------------------------------------
// 4. Desugaring equivalence

const BINARY_OPS: [&str; 16] = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>", "==", "!=", "<", ">", "<=", ">="];

fn criterion_4() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let op = BINARY_OPS[rng.gen_range(0..BINARY_OPS.len())];
        let a: i64 = rng.gen_range(-64..64);
        let b: i64 = rng.gen_range(-64..64);
        let src = format!("fn main() {{ println!(\"{{}}\", ({}) {} ({})); }}", a, op, b);
        let sugared = run_sugared(&src);
        let desugared = run_desugared(&src);
        assert_eq!(sugared.stdout, desugared.stdout, "{}", src);
        assert_eq!(sugared.error.map(|e| e.kind), desugared.error.map(|e| e.kind), "{}", src);
    }

    let body = "{ total += i; println!(\"{} {}\", i, total); }";
    let surface = format!("fn main() {{ let mut total = 0; for i in range(0, 100) {} }}", body);
    let by_hand = format!(
        "fn main() {{ let mut total = 0; match &mut range(0, 100) {{ _v => loop {{ \
         match _v.next() {{ None => break, Some(i) => {} }} }} }} }}",
        body
    );
    let mut total = 0;
    let want = lines_of((0..100).map(|i| {
        total += i;
        format!("{} {}", i, total)
    }));
    assert_eq!(run_to_string(&surface), want);
    assert_eq!(run_to_string(&by_hand), want);
    assert_eq!(run_sugared(&surface).stdout, want);
}

// ---------------------------------------------------------------------------
// 5. Macro engine

fn pfor_def() -> String {
    let src = corpus_file("pfor_step_ok.frs");
    src[..src.find("// Example use:").unwrap()].to_string()
}

fn printall_def() -> String {
    let src = corpus_file("printall_ok.frs");
    src[..src.find("// example use:").unwrap()].to_string()
}

fn criterion_5() {
    let def = pfor_def();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let s: i64 = rng.gen_range(-20..20);
        let e: i64 = rng.gen_range(-20..40);
        let stepped = format!("{}fn main() {{ pfor!(i = {} to {} step 1 {{ println!(\"{{}}\", i); }}); }}", def, s, e);
        let plain = format!("{}fn main() {{ pfor!(i = {} to {} {{ println!(\"{{}}\", i); }}); }}", def, s, e);
        let want = lines_of(pfor_oracle(s, e, 1));
        assert_eq!(run_to_string(&stepped), want, "{} {}", s, e);
        assert_eq!(run_to_string(&plain), want, "{} {}", s, e);
    }

    // The bound is evaluated once, however many iterations run.
    for call in ["to bound(&mut n) {", "to bound(&mut n) step 1 {", "to bound(&mut n) step 3 {"] {
        let src = format!(
            "{}fn bound(c: &mut int) -> int {{ *c = *c + 1; 6 }}
             fn main() {{ let mut n = 0; pfor!(i = 0 {} println!(\"{{}}\", i); }}); println!(\"calls {{}}\", n); }}",
            def, call
        );
        let out = run_to_string(&src);
        assert!(out.ends_with("calls 1\n"), "{}: {}", call, out);
        assert!(out.lines().count() > 2, "{}", out);
    }

    let printall = printall_def();
    for n in [0usize, 1, 7] {
        let args: Vec<String> = (0..n).map(|i| (i * 11).to_string()).collect();
        let src = format!("{}fn main() {{ printall!({}); }}", printall, args.join(", "));
        let p = expand(&src, DEFAULT_DEPTH_LIMIT).unwrap();
        let Some(Item::Fn(f)) = p.items.iter().find(|i| matches!(i, Item::Fn(_))) else { panic!("no main") };
        let body = f.body.as_ref().unwrap();
        assert_eq!(body.stmts.len() + body.tail.is_some() as usize, n, "printall with {} args", n);
        assert_eq!(run_to_string(&src), lines_of(&args));
    }

    let src = "macro_rules! again ( ($e:expr) => (again!($e)) ) fn main() { let x = again!(1); }";
    for limit in [1, 4, 16, DEFAULT_DEPTH_LIMIT] {
        let errs = expand_all(&parse(src), limit).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(
            matches!(&errs[0], MacroError::RecursionLimitExceeded { limit: l, name, .. } if *l == limit && name == "again"),
            "{:?}",
            errs[0]
        );
    }
}

// ---------------------------------------------------------------------------
// 6. Semantics invariants

fn criterion_6() {
    assert_eq!(run_to_string("fn main() { let u = { 1; 2; }; println!(\"{}\", u); }"), "()\n");
    assert_eq!(run_to_string("fn main() { let u = { 1; 2 }; println!(\"{}\", u); }"), "2\n");

    let src = "struct R { a: int, b: int, c: int }
               fn main() { let z = R { a: 10, b: 20, c: 5 }; let r = R { b: 7, ..z };
                           println!(\"{} {} {}\", r.a, r.b, r.c); }";
    assert_eq!(run_to_string(src), "10 7 5\n");

    assert_eq!(run_to_string("fn main() { let x: u8 = 255; println!(\"{}\", x + 1); }"), "0\n");
    assert_eq!(run_to_string("fn main() { println!(\"{}\", 255u8 + 1u8); }"), "0\n");

    let out = run_desugared("fn main() { let v = vec!(1, 2, 3); println!(\"{}\", v[3]); }");
    assert!(
        matches!(out.error.map(|e| e.kind), Some(RuntimeErrorKind::IndexOutOfBounds { index: 3, len: 3 })),
        "{}",
        out.stdout
    );

    // `ne` comes from the trait default; compare it with `!eq` on every pair.
    let peano = corpus_file("peano_ok.frs");
    let names = ["zero", "one", "two"];
    let mut checks = String::new();
    for a in names {
        for b in names {
            checks.push_str(&format!("    println!(\"{{}} {{}}\", {a}.ne(&{b}), !{a}.eq(&{b}));\n"));
            checks.push_str(&format!("    println!(\"{{}} {{}}\", {a} != {b}, !({a} == {b}));\n"));
        }
    }
    let main_end = peano.rfind('}').unwrap();
    let src = format!("{}{}}}\n", &peano[..main_end], checks);
    let out = run_to_string(&src);
    let tail: Vec<&str> = out.lines().skip(5).collect();
    assert_eq!(tail.len(), 18);
    for line in tail {
        let (x, y) = line.split_once(' ').unwrap();
        assert_eq!(x, y, "{}", out);
    }

    for body in [
        "let b = Rc::new(3); *b = 4;",
        "let b = Rc::new(P { x: 1 }); b.x = 2;",
        "let b = Rc::new(vec!(1)); b.push(2);",
        "let b = Rc::new(vec!(1)); let c = b.clone(); *c.get_mut(0) = 5;",
    ] {
        let src = format!("struct P {{ x: int }} fn main() {{ {} println!(\"mutated\"); }}", body);
        let out = run_desugared(&src);
        assert!(
            matches!(out.error.as_ref().map(|e| &e.kind), Some(RuntimeErrorKind::SharedMutation)),
            "{}: {:?}",
            body,
            out.error
        );
        assert_eq!(out.stdout, "", "{}", body);
    }
}

// ---------------------------------------------------------------------------
// 7. Round trips

/// Skips whitespace and line comments starting at `i`.
fn skip_trivia(src: &str, mut i: usize) -> usize {
    loop {
        let rest = &src[i..];
        let trimmed = rest.trim_start();
        i += rest.len() - trimmed.len();
        if trimmed.starts_with("//") {
            i += trimmed.find('\n').map_or(trimmed.len(), |n| n + 1);
        } else {
            return i;
        }
    }
}

fn criterion_7() {
    for (name, src) in corpus_sources() {
        let p = parse(&src);
        let printed = print_program(&p);
        let again = parse(&printed);
        assert!(p == again, "{} does not round-trip:\n{}", name, printed);

        let expanded = expand(&src, DEFAULT_DEPTH_LIMIT).unwrap();
        for stage in [expanded.clone(), desugar_program(&expanded)] {
            let reparsed = expand_all(&parse(&print_program(&stage)), DEFAULT_DEPTH_LIMIT).unwrap();
            assert!(reparsed == stage, "{} staged output does not round-trip", name);
        }

        let toks = tokenize(&src).unwrap();
        let mut i = 0;
        for t in &toks {
            i = skip_trivia(&src, i);
            assert!(src[i..].starts_with(&t.text), "{}: {:?} not at offset {}", name, t.text, i);
            i += t.text.len();
        }
        assert_eq!(skip_trivia(&src, i), src.len(), "{}: trailing text", name);
        let squeeze = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        let joined: String = toks.iter().map(|t| t.text.as_str()).collect();
        let stripped: String = src.lines().map(|l| l.split("//").next().unwrap()).collect();
        if !toks.iter().any(|t| matches!(t.kind, TokenKind::StrLit | TokenKind::CharLit)) {
            assert_eq!(squeeze(&joined), squeeze(&stripped), "{}", name);
        }
    }

    // The checked pipeline accepts its own staged output.
    for (name, src) in corpus_sources().into_iter().filter(|(n, _)| n.ends_with("_ok.frs")) {
        let printed = print_program(&desugar_program(&expand(&src, DEFAULT_DEPTH_LIMIT).unwrap()));
        match run(&printed, DEFAULT_DEPTH_LIMIT, false) {
            RunReport::Ran { outcome, .. } => assert_eq!(outcome.stdout, run_to_string(&src), "{}", name),
            RunReport::Rejected(d) => panic!("{}: {:?}", name, d),
        }
    }
}

fn main() {
    let criteria: [(&str, fn()); 7] = [
        ("literal tables", criterion_1),
        ("corpus execution", criterion_2),
        ("checker annotations", criterion_3),
        ("desugaring equivalence", criterion_4),
        ("macro engine", criterion_5),
        ("semantics invariants", criterion_6),
        ("round trips", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("criterion {}: PASS ({})", n + 1, name),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL ({}): {}", n + 1, name, msg);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
