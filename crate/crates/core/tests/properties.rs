mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use soda::backend::{lean, scala};
use soda::interpreter::{match_pattern, Env, FaultKind, Interpreter, Value};
use soda::lexer::tokenize;
use soda::parser::parse_expression;
use soda::syntax::Expr;

fn expr_of(source: &str) -> Expr {
    let lexed = tokenize(source, "p.soda");
    parse_expression(&lexed.tokens, 0).unwrap().0
}

/// Integer arithmetic with a BigInt oracle; `None` marks a zero divisor.
#[derive(Debug, Clone)]
enum Arith {
    Lit(i64),
    Op(char, Box<Arith>, Box<Arith>),
}

impl Arith {
    fn oracle(&self) -> Option<BigInt> {
        match self {
            Arith::Lit(v) => Some(BigInt::from(*v)),
            Arith::Op(op, a, b) => {
                let (a, b) = (a.oracle()?, b.oracle()?);
                match op {
                    '+' => Some(a + b),
                    '-' => Some(a - b),
                    '*' => Some(a * b),
                    // BigInt division truncates toward zero.
                    _ => (!b.is_zero()).then(|| a / b),
                }
            }
        }
    }

    fn source(&self) -> String {
        match self {
            Arith::Lit(v) => format!("({v})"),
            Arith::Op(op, a, b) => format!("({} {op} {})", a.source(), b.source()),
        }
    }
}

fn arith() -> impl Strategy<Value = Arith> {
    prop_oneof![(-20i64..20).prop_map(Arith::Lit), any::<i64>().prop_map(Arith::Lit)].prop_recursive(
        5,
        32,
        2,
        |inner| {
            (
                prop_oneof![Just('+'), Just('-'), Just('*'), Just('/')],
                inner.clone(),
                inner,
            )
                .prop_map(|(op, a, b)| Arith::Op(op, Box::new(a), Box::new(b)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arithmetic_matches_bigint(term in arith()) {
        let mut interpreter = Interpreter::empty();
        let expr = expr_of(&term.source());
        let first = interpreter.evaluate(&expr, &Env::new());
        match term.oracle() {
            Some(v) => prop_assert_eq!(first.clone(), Ok(Value::Int(v))),
            None => prop_assert!(matches!(&first, Err(f) if f.kind == FaultKind::DivisionByZero)),
        }
        // Same expression, same environment, same outcome.
        prop_assert_eq!(interpreter.evaluate(&expr, &Env::new()), first);
    }

    #[test]
    fn extractor_inverts_constructor(values in proptest::collection::vec(-50i64..50, 0..5)) {
        let k = values.len();
        let fields: String = (0..k).map(|i| format!("    f{i} : Int\n")).collect();
        let source = format!("class C\n\n  abstract\n{fields}\nend\n");
        let analyzed = common::analyze_source(&source);
        let mut interpreter = Interpreter::new(&analyzed);
        let args: String = values.iter().map(|v| format!(" ({v})")).collect();
        let object = interpreter.evaluate_in("C", &expr_of(&format!("C_{args}")), &Env::new()).unwrap();

        let pattern_source = format!("match x case C_{} ==> 0", (0..k).map(|i| format!(" (p{i})")).collect::<String>());
        let soda::syntax::ExprKind::Match { cases, .. } = &expr_of(&pattern_source).kind else { unreachable!() };
        let mut bindings = Vec::new();
        prop_assert!(match_pattern(&cases[0].pattern, &object, &mut bindings));
        let expected: Vec<(String, Value)> = values.iter().enumerate().map(|(i, v)| (format!("p{i}"), Value::int(*v))).collect();
        prop_assert_eq!(bindings, expected);
    }

    #[test]
    fn lean_translation_total_on_supported_fragment(program in common::program()) {
        let analyzed = soda::analyze(program);
        let unsupported = lean::check_lean_supported(&analyzed);
        let rendering = lean::translate_to_lean(&analyzed);
        prop_assert_eq!(rendering.text.is_some(), unsupported.is_empty());
        prop_assert_eq!(rendering.diagnostics, unsupported);
        // The Scala backend accepts everything the analyzer produced.
        let _ = scala::translate_to_scala(&analyzed);
    }
}

#[test]
fn match_arms_tried_top_to_bottom() {
    let mut interpreter = Interpreter::empty();
    let e = expr_of("match 1 case 1 ==> 10 case x ==> 20 case 1 ==> 30");
    assert_eq!(interpreter.evaluate(&e, &Env::new()), Ok(Value::int(10)));
    let e = expr_of("match 2 case 1 ==> 10");
    assert!(matches!(interpreter.evaluate(&e, &Env::new()), Err(f) if f.kind == FaultKind::NoMatchingCase));
}

#[test]
fn lean_match_keeps_arm_order() {
    let e = expr_of("match x case 0 ==> a case 1 ==> b");
    assert_eq!(lean::translate_match_to_lean(&e), "match x with | 0 => a | 1 => b");
}
