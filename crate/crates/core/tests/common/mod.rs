//! Random well-formed programs over the whole construct set, plus small
//! pipeline helpers shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use soda::syntax::token::is_reserved;
use soda::syntax::*;

fn sp() -> SourceSpan {
    SourceSpan::synthetic()
}

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, sp())
}

fn not_reserved(s: &str) -> bool {
    !is_reserved(s)
}

pub fn var_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,4}".prop_filter("reserved", |s| not_reserved(s))
}

pub fn type_name() -> impl Strategy<Value = String> {
    "[A-Z][a-zA-Z0-9]{0,4}".prop_filter("constructor-like", |s| !s.ends_with('_'))
}

pub fn constructor_name() -> impl Strategy<Value = String> {
    type_name().prop_map(|s| format!("{s}_"))
}

/// `x`, `p.fst`, `this.x`.
fn dotted_name() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => var_name(),
        1 => (var_name(), var_name()).prop_map(|(a, b)| format!("{a}.{b}")),
        1 => var_name().prop_map(|b| format!("this.{b}")),
        1 => (type_name(), var_name()).prop_map(|(a, b)| format!("{a}.{b}")),
    ]
}

fn string_content() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![Just('a'), Just(' '), Just('"'), Just('\\'), Just('z'), Just('-')],
        0..6,
    )
    .prop_map(|v| v.into_iter().collect())
}

fn int_value() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        3 => (0i64..100).prop_map(BigInt::from),
        1 => (-100i64..0).prop_map(BigInt::from),
        1 => any::<i64>().prop_map(|v| BigInt::from(v) * BigInt::from(v)),
    ]
}

pub fn type_expr() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![type_name(), Just("Int".to_string())].prop_map(TypeExpr::Named);
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (type_name(), proptest::collection::vec(inner.clone(), 1..3)).prop_map(|(base, args)| {
                TypeExpr::Applied {
                    base: Box::new(TypeExpr::Named(base)),
                    args,
                }
            }),
            (inner.clone(), inner).prop_map(|(d, c)| TypeExpr::Function {
                domain: Box::new(d),
                codomain: Box::new(c),
            }),
        ]
    })
}

fn type_param() -> impl Strategy<Value = TypeParam> {
    (
        type_name(),
        prop_oneof![
            2 => Just(TypeBound::None),
            1 => type_expr().prop_map(TypeBound::Subtype),
            1 => type_expr().prop_map(TypeBound::Supertype),
        ],
    )
        .prop_map(|(name, bound)| TypeParam {
            name,
            bound,
            span: sp(),
        })
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        int_value().prop_map(Literal::Int),
        any::<bool>().prop_map(Literal::Bool),
        string_content().prop_map(Literal::Str),
    ]
}

pub fn pattern() -> impl Strategy<Value = Pattern> {
    let leaf = prop_oneof![
        Just(PatternKind::Wildcard),
        var_name().prop_map(PatternKind::Var),
        literal().prop_map(PatternKind::Literal),
        constructor_name().prop_map(|name| PatternKind::Constructor { name, args: vec![] }),
    ]
    .prop_map(|k| Pattern::new(k, sp()));
    leaf.prop_recursive(3, 10, 3, |inner| {
        (constructor_name(), proptest::collection::vec(inner, 1..4))
            .prop_map(|(name, args)| Pattern::new(PatternKind::Constructor { name, args }, sp()))
    })
}

fn leaf_expr() -> impl Strategy<Value = Expr> {
    prop_oneof![
        1 => int_value().prop_map(|v| e(ExprKind::Int(v))),
        1 => any::<bool>().prop_map(|b| e(ExprKind::Bool(b))),
        1 => string_content().prop_map(|s| e(ExprKind::Str(s))),
        3 => dotted_name().prop_map(|n| e(ExprKind::Ident(n))),
        1 => constructor_name().prop_map(|n| e(ExprKind::Ident(n))),
        1 => Just(e(ExprKind::SelfRef)),
    ]
}

/// Builds a call chain over `head`. Positional and named arguments are not
/// mixed in one chain; type arguments come first.
fn build_call(head: Expr, type_args: Vec<TypeExpr>, args: Vec<Expr>, names: Option<Vec<String>>) -> Expr {
    let mut out = head;
    for type_arg in type_args {
        out = e(ExprKind::TypeApply {
            function: Arc::new(out),
            type_arg,
        });
    }
    for (i, arg) in args.into_iter().enumerate() {
        out = match &names {
            Some(names) => e(ExprKind::NamedApply {
                function: Arc::new(out),
                param: names[i].clone(),
                argument: Arc::new(arg),
            }),
            None => e(ExprKind::Apply {
                function: Arc::new(out),
                argument: Arc::new(arg),
            }),
        };
    }
    out
}

pub fn expr() -> impl Strategy<Value = Expr> {
    leaf_expr().prop_recursive(5, 48, 4, |inner| {
        let head = inner.clone().prop_filter("call head", |h| !h.is_call());
        let binop = proptest::sample::select(BinaryOp::ALL.to_vec());
        prop_oneof![
            // call chains
            1 => (
                head,
                proptest::collection::vec(type_expr(), 0..2),
                proptest::collection::vec(inner.clone(), 1..4),
                any::<bool>(),
                proptest::collection::vec(var_name(), 3),
            )
                .prop_map(|(h, tys, args, named, names)| {
                    let names = named.then_some(names);
                    build_call(h, tys, args, names)
                }),
            1 => (var_name(), proptest::option::of(type_expr()), inner.clone()).prop_map(|(param, param_type, body)| {
                e(ExprKind::Lambda {
                    param,
                    param_type,
                    body: Arc::new(body),
                })
            }),
            1 => (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, t, f)| e(ExprKind::If {
                condition: Arc::new(c),
                then_branch: Arc::new(t),
                else_branch: Arc::new(f),
            })),
            1 => (inner.clone(), proptest::collection::vec((pattern(), inner.clone()), 1..4)).prop_map(|(s, cases)| {
                e(ExprKind::Match {
                    scrutinee: Arc::new(s),
                    cases: cases
                        .into_iter()
                        .map(|(pattern, body)| MatchCase {
                            pattern,
                            body: Arc::new(body),
                        })
                        .collect(),
                })
            }),
            3 => (binop, inner.clone(), inner.clone()).prop_map(|(op, l, r)| e(ExprKind::Binary {
                op,
                left: Arc::new(l),
                right: Arc::new(r),
            })),
            1 => inner.prop_map(|x| e(ExprKind::Not(Arc::new(x)))),
        ]
    })
}

fn comments() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("( [a-z]{1,6}){0,3}", 0..2)
}

fn param() -> impl Strategy<Value = Param> {
    (var_name(), type_expr()).prop_map(|(name, ty)| Param { name, ty, span: sp() })
}

pub fn definition() -> impl Strategy<Value = Definition> {
    (
        var_name(),
        proptest::collection::vec(type_param(), 0..2),
        proptest::collection::vec(param(), 0..3),
        proptest::option::of(type_expr()),
        expr(),
        any::<bool>(),
        comments(),
    )
        .prop_map(
            |(name, type_params, params, result_type, body, is_tailrec, comments)| Definition {
                name,
                type_params,
                params,
                result_type,
                body: Some(Arc::new(body)),
                is_tailrec,
                comments,
                span: sp(),
            },
        )
}

fn abstract_member() -> impl Strategy<Value = Definition> {
    (
        var_name(),
        proptest::collection::vec(type_param(), 0..2),
        proptest::collection::vec(param(), 0..2),
        type_expr(),
        comments(),
    )
        .prop_map(|(name, type_params, params, ty, comments)| Definition {
            name,
            type_params,
            params,
            result_type: Some(ty),
            body: None,
            is_tailrec: false,
            comments,
            span: sp(),
        })
}

/// Raw lines: first line flush left, later lines may be indented further
/// or blank (but not trailing-blank), no trailing spaces.
fn directive() -> impl Strategy<Value = DirectiveBlock> {
    let text = "[a-zA-Z(){};.]([a-zA-Z(){}=:;.\"/+*<> -]{0,12}[a-zA-Z(){};.])?";
    (
        prop_oneof![Just("scala".to_string()), Just("lean".to_string()), var_name()],
        text,
        proptest::collection::vec(
            prop_oneof![
                Just(String::new()),
                (0usize..4, text).prop_map(|(n, t)| format!("{}{t}", " ".repeat(n)))
            ],
            0..3,
        ),
        text,
        any::<bool>(),
    )
        .prop_map(|(target, first, middle, last, multi)| {
            let mut raw_lines = vec![first];
            if multi {
                raw_lines.extend(middle);
                raw_lines.push(last);
            }
            DirectiveBlock {
                target,
                raw_lines,
                span: sp(),
            }
        })
}

fn class_item() -> impl Strategy<Value = ClassItem> {
    prop_oneof![
        1 => proptest::collection::vec(abstract_member(), 0..3).prop_map(ClassItem::Abstract),
        3 => definition().prop_map(ClassItem::Definition),
        1 => directive().prop_map(ClassItem::Directive),
    ]
}

pub fn class_decl() -> impl Strategy<Value = ClassDecl> {
    (
        type_name(),
        proptest::collection::vec(type_param(), 0..3),
        proptest::collection::vec(type_expr(), 0..3),
        proptest::collection::vec(class_item(), 0..4),
        comments(),
    )
        .prop_map(|(name, type_params, extends, items, comments)| ClassDecl {
            name,
            type_params,
            extends,
            items,
            comments,
            span: sp(),
        })
}

fn qualified_name() -> impl Strategy<Value = QualifiedName> {
    proptest::collection::vec(var_name(), 1..4).prop_map(|parts| QualifiedName {
        name: parts.join("."),
        span: sp(),
    })
}

pub fn program() -> impl Strategy<Value = Program> {
    (
        proptest::option::of(qualified_name()),
        proptest::collection::vec(qualified_name(), 0..3),
        proptest::collection::vec(
            prop_oneof![
                4 => class_decl().prop_map(TopItem::Class),
                1 => directive().prop_map(TopItem::Directive),
            ],
            0..4,
        ),
    )
        .prop_map(|(package, imports, items)| Program {
            package,
            imports,
            items,
        })
}

/// Draws `n` values from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

pub fn parse(source: &str) -> Result<Program, Vec<Diagnostic>> {
    let result = soda::parse_source(source, "test.soda");
    match result.program {
        Some(p) if !has_errors(&result.diagnostics) => Ok(p),
        _ => Err(result.diagnostics),
    }
}

pub fn analyze_source(source: &str) -> soda::AnalyzedProgram {
    let program = parse(source).unwrap_or_else(|d| panic!("parse failed: {d:?}\n{source}"));
    soda::analyze(program)
}

pub fn render_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{d}\n")).collect()
}
