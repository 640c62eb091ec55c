//! Canonical Soda concrete syntax.
//!
//! Indentation is two spaces per level. Declarations are separated by one
//! blank line. Definition bodies stay on the definition line unless they end
//! in a `match`, whose cases are then laid out one per line. Parentheses are
//! added only where the parser would otherwise build a different tree.

use super::ast::*;

/// Precedence levels used by the printer; mirrors the parser.
const WEAK: u8 = 0;
const UNARY: u8 = 6;
const APPLICATION: u8 = 7;
const ATOM: u8 = 8;

const INDENT: usize = 2;

pub fn pretty_print(program: &Program) -> String {
    let mut chunks: Vec<String> = Vec::new();
    if let Some(package) = &program.package {
        chunks.push(format!("package {}\n", package.name));
    }
    if !program.imports.is_empty() {
        chunks.push(program.imports.iter().map(|i| format!("import {}\n", i.name)).collect());
    }
    for item in &program.items {
        chunks.push(match item {
            TopItem::Class(class) => print_class(class),
            TopItem::Directive(directive) => print_directive(directive, 0),
        });
    }
    chunks.join("\n")
}

fn pad(indent: usize) -> String {
    " ".repeat(indent)
}

fn print_comments(comments: &[String], indent: usize, out: &mut String) {
    for c in comments {
        out.push_str(&pad(indent));
        out.push_str("//");
        out.push_str(c);
        out.push('\n');
    }
}

fn print_class(class: &ClassDecl) -> String {
    let mut out = String::new();
    print_comments(&class.comments, 0, &mut out);
    out.push_str("class ");
    out.push_str(&class.name);
    out.push_str(&print_type_params(&class.type_params));
    out.push('\n');
    if !class.extends.is_empty() {
        out.push_str(&pad(INDENT));
        out.push_str("extends");
        for ty in &class.extends {
            out.push(' ');
            out.push_str(&print_type_at(ty, true));
        }
        out.push('\n');
    }
    for item in &class.items {
        out.push('\n');
        match item {
            ClassItem::Abstract(members) => {
                out.push_str(&pad(INDENT));
                out.push_str("abstract\n");
                for member in members {
                    print_comments(&member.comments, 2 * INDENT, &mut out);
                    out.push_str(&pad(2 * INDENT));
                    out.push_str(&definition_header(member));
                    out.push('\n');
                }
            }
            ClassItem::Definition(d) => out.push_str(&print_definition(d, INDENT)),
            ClassItem::Directive(d) => out.push_str(&print_directive(d, INDENT)),
        }
    }
    out.push_str("\nend\n");
    out
}

fn print_directive(directive: &DirectiveBlock, indent: usize) -> String {
    let mut out = format!("{}directive {}\n", pad(indent), directive.target);
    for line in &directive.raw_lines {
        if !line.is_empty() {
            out.push_str(&pad(indent + INDENT));
            out.push_str(line);
        }
        out.push('\n');
    }
    out
}

/// `name [A : Type] (x : Int) : Int`, without body.
pub fn definition_header(d: &Definition) -> String {
    let mut out = d.name.clone();
    out.push_str(&print_type_params(&d.type_params));
    for p in &d.params {
        out.push_str(&format!(" ({} : {})", p.name, print_type(&p.ty)));
    }
    if let Some(ty) = &d.result_type {
        out.push_str(" : ");
        out.push_str(&print_type(ty));
    }
    out
}

fn print_definition(d: &Definition, indent: usize) -> String {
    let mut out = String::new();
    print_comments(&d.comments, indent, &mut out);
    if d.is_tailrec {
        out.push_str(&pad(indent));
        out.push_str("@tailrec\n");
    }
    out.push_str(&pad(indent));
    out.push_str(&definition_header(d));
    if let Some(body) = &d.body {
        let body_indent = indent + INDENT;
        let text = Printer { multiline: true }.expr(body, WEAK, true, body_indent);
        if text.contains('\n') {
            out.push_str(" =\n");
            out.push_str(&pad(body_indent));
        } else {
            out.push_str(" = ");
        }
        out.push_str(&text);
    }
    out.push('\n');
    out
}

fn print_type_params(params: &[TypeParam]) -> String {
    params
        .iter()
        .map(|p| match &p.bound {
            TypeBound::None => format!(" [{} : Type]", p.name),
            TypeBound::Subtype(b) => format!(" [{} subtype {}]", p.name, print_type(b)),
            TypeBound::Supertype(b) => format!(" [{} supertype {}]", p.name, print_type(b)),
        })
        .collect()
}

pub fn print_type(ty: &TypeExpr) -> String {
    print_type_at(ty, false)
}

/// `tight` requests a form that is a single application-level unit, as
/// needed in `extends` lists and as the base of an applied type.
fn print_type_at(ty: &TypeExpr, tight: bool) -> String {
    match ty {
        TypeExpr::Named(name) => name.clone(),
        TypeExpr::Applied { base, args } => {
            let mut out = print_type_at(base, true);
            for a in args {
                out.push_str(" [");
                out.push_str(&print_type(a));
                out.push(']');
            }
            out
        }
        TypeExpr::Function { domain, codomain } => {
            let domain = match **domain {
                TypeExpr::Function { .. } => format!("({})", print_type(domain)),
                _ => print_type(domain),
            };
            let text = format!("{} --> {}", domain, print_type(codomain));
            if tight {
                format!("({text})")
            } else {
                text
            }
        }
    }
}

/// Renders a single expression in canonical single-line form.
pub fn print_expr(expr: &Expr) -> String {
    Printer { multiline: false }.expr(expr, WEAK, true, 0)
}

pub fn print_pattern(pattern: &Pattern) -> String {
    match &pattern.kind {
        PatternKind::Wildcard => "_".to_string(),
        PatternKind::Var(name) => name.clone(),
        PatternKind::Literal(lit) => print_literal(lit),
        PatternKind::Constructor { name, args } => {
            let mut out = name.clone();
            for a in args {
                out.push_str(" (");
                out.push_str(&print_pattern(a));
                out.push(')');
            }
            out
        }
    }
}

fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Int(v) => v.to_string(),
        Literal::Bool(b) => b.to_string(),
        Literal::Str(s) => quote(s),
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Binding strength of the outermost construct of `expr`.
fn precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Int(v) if v.sign() == num_bigint::Sign::Minus => UNARY,
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Ident(_) | ExprKind::SelfRef => ATOM,
        ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => APPLICATION,
        ExprKind::Not(_) => UNARY,
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Lambda { .. } | ExprKind::If { .. } | ExprKind::Match { .. } => WEAK,
    }
}

struct Printer {
    multiline: bool,
}

impl Printer {
    /// `min_prec`: weakest construct allowed without parentheses.
    /// `trailing`: nothing follows in the enclosing group, so an open
    /// `match` cannot capture later cases.
    /// `indent`: indentation of the current output line.
    fn expr(&self, e: &Expr, min_prec: u8, trailing: bool, indent: usize) -> String {
        let needs_parens = precedence(e) < min_prec || (matches!(e.kind, ExprKind::Match { .. }) && !trailing);
        if needs_parens {
            let inner = Printer { multiline: false };
            return format!("({})", inner.expr(e, WEAK, true, indent));
        }
        match &e.kind {
            ExprKind::Int(v) => v.to_string(),
            ExprKind::Bool(b) => b.to_string(),
            ExprKind::Str(s) => quote(s),
            ExprKind::Ident(name) => name.clone(),
            ExprKind::SelfRef => "this".to_string(),
            ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => {
                let (head, args) = e.call_chain();
                let mut out = self.expr(head, ATOM, false, indent);
                let group = Printer { multiline: false };
                for arg in args {
                    match arg {
                        CallArg::Positional(a) => {
                            out.push_str(&format!(" ({})", group.expr(a, WEAK, true, indent)));
                        }
                        CallArg::Named(name, a) => {
                            out.push_str(&format!(" ({} := {})", name, group.expr(a, WEAK, true, indent)));
                        }
                        CallArg::Type(t) => out.push_str(&format!(" [{}]", print_type(t))),
                    }
                }
                out
            }
            ExprKind::Not(operand) => format!("not {}", self.expr(operand, UNARY, trailing, indent)),
            ExprKind::Binary { op, left, right } => {
                let p = op.precedence();
                format!(
                    "{} {} {}",
                    self.expr(left, p, false, indent),
                    op.symbol(),
                    self.expr(right, p + 1, trailing, indent)
                )
            }
            ExprKind::Lambda {
                param,
                param_type,
                body,
            } => {
                let head = match param_type {
                    Some(t) => format!("lambda ({} : {}) -->", param, print_type(t)),
                    None => format!("lambda {param} -->"),
                };
                format!("{} {}", head, self.expr(body, WEAK, trailing, indent))
            }
            ExprKind::If {
                condition,
                then_branch,
                else_branch,
            } => format!(
                "if {} then {} else {}",
                self.expr(condition, WEAK, false, indent),
                self.expr(then_branch, WEAK, false, indent),
                self.expr(else_branch, WEAK, trailing, indent)
            ),
            ExprKind::Match { scrutinee, cases } => {
                let mut out = format!("match {}", self.expr(scrutinee, WEAK, false, indent));
                let case_indent = indent + INDENT;
                for (i, case) in cases.iter().enumerate() {
                    let last = i + 1 == cases.len();
                    if self.multiline {
                        out.push('\n');
                        out.push_str(&pad(case_indent));
                    } else {
                        out.push(' ');
                    }
                    out.push_str("case ");
                    out.push_str(&print_pattern(&case.pattern));
                    out.push_str(" ==> ");
                    out.push_str(&self.expr(&case.body, WEAK, trailing && last, case_indent));
                }
                out
            }
        }
    }
}
