//! Scala rendering.
//!
//! A class becomes a `trait` and its default constructor a `case class`
//! extending it. Constants with a body become `lazy val`, everything else
//! `def`. Subexpressions that are not atoms are always parenthesized.

use super::{indent_tail, is_atomic, Output, SourceMap};
use crate::analyzer::{filter_directives, AnalyzedProgram, ConstructorSignature};
use crate::syntax::pretty::quote;
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalaRendering {
    pub text: String,
    pub source_map: SourceMap,
}

pub fn translate_to_scala(analyzed: &AnalyzedProgram) -> ScalaRendering {
    let program = filter_directives(&analyzed.program, "scala");
    let mut out = Output::default();
    if let Some(package) = &program.package {
        out.mark(&package.span);
        out.push(&format!("package {}\n", package.name));
    }
    if !program.imports.is_empty() {
        out.separate();
        for import in &program.imports {
            out.mark(&import.span);
            out.push(&format!("import {}\n", import.name));
        }
    }
    for item in &program.items {
        out.separate();
        match item {
            TopItem::Directive(d) => directive(&mut out, d, 0),
            TopItem::Class(class) => {
                trait_decl(&mut out, class);
                if let Some(constructor) = analyzed.constructors.get(&class.name) {
                    out.push("\n");
                    out.mark(&class.span);
                    out.push(&case_class(constructor));
                }
            }
        }
    }
    ScalaRendering {
        text: out.text,
        source_map: out.map,
    }
}

fn comments(out: &mut Output, comments: &[String], indent: usize) {
    for c in comments {
        out.lines(indent, &format!("//{c}"));
    }
}

fn directive(out: &mut Output, d: &DirectiveBlock, indent: usize) {
    out.mark(&d.span);
    for line in &d.raw_lines {
        out.lines(indent, line);
        if line.is_empty() {
            out.push("\n");
        }
    }
}

fn trait_decl(out: &mut Output, class: &ClassDecl) {
    comments(out, &class.comments, 0);
    out.mark(&class.span);
    let mut header = format!(
        "trait {}{}",
        class.name,
        translate_type_params_to_scala(&class.type_params)
    );
    for (i, parent) in class.extends.iter().enumerate() {
        header.push_str(if i == 0 { " extends " } else { " with " });
        header.push_str(&translate_type_to_scala(parent));
    }
    if class.items.is_empty() {
        out.push(&header);
        out.push("\n");
        return;
    }
    out.push(&header);
    out.push(" {\n");
    for (i, item) in class.items.iter().enumerate() {
        if i > 0 {
            out.push("\n");
        }
        match item {
            ClassItem::Abstract(members) => {
                for m in members {
                    comments(out, &m.comments, 2);
                    out.mark(&m.span);
                    out.lines(2, &translate_definition_to_scala(m));
                }
            }
            ClassItem::Definition(d) => {
                comments(out, &d.comments, 2);
                out.mark(&d.span);
                out.lines(2, &translate_definition_to_scala(d));
            }
            ClassItem::Directive(d) => directive(out, d, 0),
        }
    }
    out.push("}\n");
}

fn case_class(constructor: &ConstructorSignature) -> String {
    let fields: Vec<String> = constructor
        .fields
        .iter()
        .map(|f| format!("{} : {}", f.name, translate_type_to_scala(&f.ty)))
        .collect();
    let type_args = if constructor.type_params.is_empty() {
        String::new()
    } else {
        let names: Vec<&str> = constructor.type_params.iter().map(|p| p.name.as_str()).collect();
        format!(" [{}]", names.join(", "))
    };
    format!(
        "case class {}{} ({}) extends {}{}\n",
        constructor.name,
        translate_type_params_to_scala(&constructor.type_params),
        fields.join(", "),
        constructor.class_name,
        type_args
    )
}

/// `[A : Type]` → `[A]`, `[A subtype B]` → `[A <: B]`, `[A supertype B]`
/// → `[A >: B]`; all parameters in one bracket list.
pub fn translate_type_params_to_scala(params: &[TypeParam]) -> String {
    if params.is_empty() {
        return String::new();
    }
    let rendered: Vec<String> = params
        .iter()
        .map(|p| match &p.bound {
            TypeBound::None => p.name.clone(),
            TypeBound::Subtype(b) => format!("{} <: {}", p.name, translate_type_to_scala(b)),
            TypeBound::Supertype(b) => format!("{} >: {}", p.name, translate_type_to_scala(b)),
        })
        .collect();
    format!(" [{}]", rendered.join(", "))
}

pub fn translate_type_to_scala(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Named(name) => name.clone(),
        TypeExpr::Applied { base, args } => {
            let args: Vec<String> = args.iter().map(translate_type_to_scala).collect();
            format!("{} [{}]", wrapped_type(base), args.join(", "))
        }
        TypeExpr::Function { domain, codomain } => {
            format!("{} => {}", wrapped_type(domain), translate_type_to_scala(codomain))
        }
    }
}

fn wrapped_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Function { .. } => format!("({})", translate_type_to_scala(ty)),
        _ => translate_type_to_scala(ty),
    }
}

/// Renders one definition or abstract declaration. Continuation lines are
/// indented relative to the first line.
pub fn translate_definition_to_scala(d: &Definition) -> String {
    let mut header = String::new();
    if d.is_tailrec {
        header.push_str("@annotation.tailrec\nfinal ");
    }
    let is_value = d.params.is_empty() && d.type_params.is_empty() && d.body.is_some();
    header.push_str(if is_value { "lazy val " } else { "def " });
    header.push_str(&d.name);
    header.push_str(&translate_type_params_to_scala(&d.type_params));
    for p in &d.params {
        header.push_str(&format!(" ({} : {})", p.name, translate_type_to_scala(&p.ty)));
    }
    if let Some(ty) = &d.result_type {
        header.push_str(" : ");
        header.push_str(&translate_type_to_scala(ty));
    }
    match &d.body {
        None => header,
        Some(body) => {
            let text = translate_expr_to_scala(body);
            if text.contains('\n') {
                format!("{header} =\n  {}", indent_tail(&text, 2))
            } else {
                format!("{header} = {text}")
            }
        }
    }
}

/// Identifiers ending in `_` name default constructors, which Scala
/// applies to one argument list.
fn is_constructor(head: &Expr) -> bool {
    matches!(&head.kind, ExprKind::Ident(name) if name.ends_with('_'))
}

pub fn translate_expr_to_scala(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Str(s) => quote(s),
        ExprKind::Ident(name) => name.clone(),
        ExprKind::SelfRef => "this".to_string(),
        ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => call(e),
        ExprKind::Lambda {
            param,
            param_type,
            body,
        } => match param_type {
            Some(t) => format!("({} : {}) => {}", param, translate_type_to_scala(t), sub(body)),
            None => format!("{} => {}", param, sub(body)),
        },
        ExprKind::If {
            condition,
            then_branch,
            else_branch,
        } => format!(
            "if ({}) {} else {}",
            translate_expr_to_scala(condition),
            sub(then_branch),
            sub(else_branch)
        ),
        ExprKind::Match { scrutinee, cases } => {
            let mut out = format!("{} match {{", sub(scrutinee));
            for case in cases {
                out.push_str(&format!(
                    "\n  case {} => {}",
                    pattern(&case.pattern),
                    indent_tail(&sub(&case.body), 2)
                ));
            }
            out.push_str("\n}");
            out
        }
        ExprKind::Binary { op, left, right } => {
            let symbol = match op {
                BinaryOp::And => "&&",
                BinaryOp::Or => "||",
                other => other.symbol(),
            };
            format!("{} {} {}", sub(left), symbol, sub(right))
        }
        ExprKind::Not(operand) => format!("!{}", sub(operand)),
    }
}

/// A subexpression: parenthesized unless atomic.
fn sub(e: &Expr) -> String {
    let text = translate_expr_to_scala(e);
    if is_atomic(e) {
        text
    } else {
        format!("({text})")
    }
}

fn call(e: &Expr) -> String {
    let (head, args) = e.call_chain();
    let mut out = sub(head);
    let flatten = is_constructor(head);
    let mut types: Vec<String> = Vec::new();
    let mut values: Vec<String> = Vec::new();
    let flush_types = |out: &mut String, types: &mut Vec<String>| {
        if !types.is_empty() {
            out.push_str(&format!(" [{}]", types.join(", ")));
            types.clear();
        }
    };
    for arg in args {
        match arg {
            CallArg::Type(t) => types.push(translate_type_to_scala(t)),
            CallArg::Positional(a) | CallArg::Named(_, a) => {
                flush_types(&mut out, &mut types);
                let value = translate_expr_to_scala(a);
                let value = match arg {
                    CallArg::Named(name, _) => format!("{name} = {value}"),
                    _ => value,
                };
                if flatten {
                    values.push(value);
                } else {
                    out.push_str(&format!(" ({value})"));
                }
            }
        }
    }
    flush_types(&mut out, &mut types);
    if flatten {
        out.push_str(&format!(" ({})", values.join(", ")));
    }
    out
}

fn pattern(p: &Pattern) -> String {
    match &p.kind {
        PatternKind::Wildcard => "_".to_string(),
        PatternKind::Var(name) => name.clone(),
        PatternKind::Literal(Literal::Int(v)) => v.to_string(),
        PatternKind::Literal(Literal::Bool(b)) => b.to_string(),
        PatternKind::Literal(Literal::Str(s)) => quote(s),
        PatternKind::Constructor { name, args } if args.is_empty() && !name.ends_with('_') => name.clone(),
        PatternKind::Constructor { name, args } => {
            let args: Vec<String> = args.iter().map(pattern).collect();
            format!("{} ({})", name, args.join(", "))
        }
    }
}
