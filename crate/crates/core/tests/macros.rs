use frs_core::lexer::tokenize;
use frs_core::macro_engine::*;
use frs_core::syntax::*;

fn parse(src: &str) -> Program {
    parse_program(&tokenize(src).unwrap()).unwrap()
}

fn def(src: &str) -> MacroDef {
    let p = parse(src);
    let Item::Macro(m) = &p.items[0] else { panic!() };
    MacroDef::from_item(m).unwrap()
}

fn def_err(src: &str) -> MacroError {
    let p = parse(src);
    let Item::Macro(m) = &p.items[0] else { panic!() };
    MacroDef::from_item(m).unwrap_err()
}

fn text(tokens: &[frs_core::lexer::Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
}

fn capture_text(b: &Binding) -> String {
    match b {
        Binding::One(tts, _) => text(&tt::flatten(tts)),
        Binding::Many(items) => format!("[{}]", items.iter().map(capture_text).collect::<Vec<_>>().join("; ")),
    }
}

const PFOR1: &str = r#"macro_rules! pfor (
  ($x:ident = $s:expr to $e:expr $body:expr)
  => (match $e { e => {
    let mut $x = $s;
    loop {
      $body;
      $x += 1;
      if $x > e { break; }
    }
  }});
);"#;

const PFOR2: &str = r#"macro_rules! pfor (
  ($x:ident = $s:expr to $e:expr step $st:expr $body:expr)
  => (match $e,$st { e, st => {
    let mut $x = $s;
    loop {
      $body;
      $x += st;
      if $x > e { break; }
    }
  }});
  ($x:ident = $s:expr to $e:expr $body:expr)
  => (pfor!($x = $s to $e step 1 $body));
);"#;

const PRINTALL: &str = r#"macro_rules! printall (
  ( $( $arg:expr ),* ) => (
    $( println!("{}", $arg) );*
  );
);"#;

#[test]
fn pfor_captures() {
    let d = def(PFOR1);
    let input = tt::build(&tokenize(r#"i = 0 to 10 {println!("{}", i);}"#).unwrap()).unwrap();
    let b = match_pattern(&d.rules[0].pattern, &input).unwrap();
    assert_eq!(capture_text(&b["x"]), "i");
    assert_eq!(capture_text(&b["s"]), "0");
    assert_eq!(capture_text(&b["e"]), "10");
    assert_eq!(capture_text(&b["body"]), r#"{ println ! ( "{}" , i ) ; }"#);
}

#[test]
fn printall_captures() {
    let d = def(PRINTALL);
    let input = tt::build(&tokenize(r#""hello", 42, 3.14"#).unwrap()).unwrap();
    let b = match_pattern(&d.rules[0].pattern, &input).unwrap();
    assert_eq!(capture_text(&b["arg"]), r#"["hello"; 42; 3.14]"#);
    let b = match_pattern(&d.rules[0].pattern, &[]).unwrap();
    assert_eq!(b["arg"], Binding::Many(vec![]));
}

#[test]
fn printall_transcription() {
    let d = def(PRINTALL);
    let out = expand_invocation(&d, &tokenize(r#""hello", 42, 3.14"#).unwrap(), Default::default()).unwrap();
    assert_eq!(
        text(&out),
        r#"println ! ( "{}" , "hello" ) ; println ! ( "{}" , 42 ) ; println ! ( "{}" , 3.14 )"#
    );
}

#[test]
fn no_fragment_template_is_verbatim() {
    let d = def("macro_rules! k ( () => (1 + 2) )");
    let out = expand_invocation(&d, &[], Default::default()).unwrap();
    assert_eq!(text(&out), "1 + 2");
}

#[test]
fn pfor_without_step_delegates() {
    let d = def(PFOR2);
    let out = expand_invocation(&d, &tokenize("i = 0 to 10 { f(i); }").unwrap(), Default::default()).unwrap();
    assert_eq!(text(&out), "pfor ! ( i = 0 to 10 step 1 { f ( i ) ; } )");
}

#[test]
fn expr_capture_stops_at_bare_word() {
    let d = def(PFOR2);
    let input = tt::build(&tokenize("k = a + 1 to n * 2 step s - 1 { }").unwrap()).unwrap();
    let b = match_pattern(&d.rules[0].pattern, &input).unwrap();
    assert_eq!(capture_text(&b["s"]), "a + 1");
    assert_eq!(capture_text(&b["e"]), "n * 2");
    assert_eq!(capture_text(&b["st"]), "s - 1");
}

#[test]
fn multi_token_capture_is_parenthesized() {
    let d = def("macro_rules! dbl ( ($e:expr) => ($e * 2) )");
    let out = expand_invocation(&d, &tokenize("1 + 2").unwrap(), Default::default()).unwrap();
    assert_eq!(text(&out), "( 1 + 2 ) * 2");
}

#[test]
fn first_rule_wins() {
    let a = def("macro_rules! m ( ($x:expr) => (1); ($y:ident) => (2); )");
    let b = def("macro_rules! m ( ($y:ident) => (2); ($x:expr) => (1); )");
    let toks = tokenize("q").unwrap();
    assert_eq!(text(&expand_invocation(&a, &toks, Default::default()).unwrap()), "1");
    assert_eq!(text(&expand_invocation(&b, &toks, Default::default()).unwrap()), "2");
}

#[test]
fn definition_errors() {
    assert!(matches!(def_err("macro_rules! m ( ($x:ty) => ($x) )"), MacroError::Definition { .. }));
    assert!(matches!(def_err("macro_rules! m ( ($($x:expr),+) => ($($x)*) )"), MacroError::Definition { .. }));
    assert!(matches!(def_err("macro_rules! m ( ($x:expr) => ($y) )"), MacroError::Definition { .. }));
    assert!(matches!(def_err("macro_rules! m ( ($($x:expr),*) => ($x) )"), MacroError::Definition { .. }));
}

#[test]
fn no_rule_matched() {
    let p = parse("macro_rules! one ( (a) => (1) ) fn main() { one!(b); }");
    let errs = expand_all(&p, DEFAULT_DEPTH_LIMIT).unwrap_err();
    assert!(matches!(errs[0], MacroError::NoRuleMatched { .. }));
}

#[test]
fn unknown_macro() {
    let p = parse("fn main() { nope!(1); }");
    let errs = expand_all(&p, DEFAULT_DEPTH_LIMIT).unwrap_err();
    assert!(matches!(errs[0], MacroError::UnknownMacro { .. }));
}

#[test]
fn self_recursive_macro_hits_limit() {
    for limit in [1, 5, DEFAULT_DEPTH_LIMIT] {
        let p = parse("macro_rules! loopy ( () => (loopy!()) ) fn main() { let x = loopy!(); loopy!(); }");
        let errs = expand_all(&p, limit).unwrap_err();
        assert_eq!(errs.len(), 2);
        for e in errs {
            assert!(matches!(e, MacroError::RecursionLimitExceeded { limit: l, .. } if l == limit));
        }
    }
}

#[test]
fn no_invocations_is_fixpoint() {
    let p = parse("fn main() { let x = 1 + 2; f(x) }");
    assert_eq!(expand_all(&p, DEFAULT_DEPTH_LIMIT).unwrap(), p);
}

#[test]
fn statement_expansion_splices() {
    let src = format!("{}\nfn main() {{ printall!(1, 2, 3); printall!(); let z = 0; }}", PRINTALL);
    let p = expand_all(&parse(&src), DEFAULT_DEPTH_LIMIT).unwrap();
    assert_eq!(p.items.len(), 1);
    let Item::Fn(f) = &p.items[0] else { panic!() };
    let body = f.body.as_ref().unwrap();
    assert_eq!(body.stmts.len(), 4);
    assert!(body.stmts[..3].iter().all(|s| matches!(
        &s.kind,
        StmtKind::Expr { expr: Expr { kind: ExprKind::Builtin { mac: BuiltinMacro::Println, .. }, .. }, .. }
    )));
}

#[test]
fn recursive_expansion_reaches_match_loop() {
    let src = format!("{}\nfn main() {{ pfor!(i = 0 to 10 {{ println!(\"{{}}\", i); }}); }}", PFOR2);
    let p = expand_all(&parse(&src), DEFAULT_DEPTH_LIMIT).unwrap();
    let Item::Fn(f) = &p.items[0] else { panic!() };
    let body = f.body.as_ref().unwrap();
    let StmtKind::Expr { expr, .. } = &body.stmts[0].kind else { panic!() };
    let ExprKind::Match { scrutinee, arms } = &expr.kind else { panic!("{:?}", expr) };
    assert!(matches!(scrutinee.kind, ExprKind::Tuple(ref xs) if xs.len() == 2));
    let ExprKind::Block(b) = &arms[0].body.kind else { panic!() };
    assert!(matches!(b.tail.as_deref().map(|t| &t.kind), Some(ExprKind::Loop(_))));
}

#[test]
fn user_macro_shadows_builtin() {
    let p = parse("macro_rules! vec ( ($x:expr) => ($x + 1) ) fn main() { let a = vec!(1); }");
    let out = expand_all(&p, DEFAULT_DEPTH_LIMIT).unwrap();
    assert!(print_program(&out).contains("let a = 1 + 1;"));
}

#[test]
fn expansion_is_deterministic() {
    let src = format!("{}\nfn main() {{ pfor!(i = 0 to 3 step 1 {{ f(i); }}); }}", PFOR2);
    let a = print_program(&expand_all(&parse(&src), DEFAULT_DEPTH_LIMIT).unwrap());
    let b = print_program(&expand_all(&parse(&src), DEFAULT_DEPTH_LIMIT).unwrap());
    assert_eq!(a, b);
}
