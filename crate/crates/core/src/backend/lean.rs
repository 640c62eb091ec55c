//! Lean rendering of the supported fragment.
//!
//! Each class opens a `namespace`. A class with data fields also becomes a
//! Lean `class … where` whose constructor is the default constructor.
//! Packages, imports, `this` and type bounds have no Lean rendering.

use std::collections::HashMap;

use super::{is_atomic, Output, SourceMap};
use crate::analyzer::{filter_directives, AnalyzedProgram};
use crate::syntax::pretty::quote;
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeanRendering {
    /// Absent when `diagnostics` holds an error.
    pub text: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub source_map: SourceMap,
}

fn unsupported(construct: &str, span: &SourceSpan) -> Diagnostic {
    Diagnostic::new(
        Code::LeanUnsupported,
        format!("`{construct}` is not supported by the Lean translation"),
        span.clone(),
    )
}

/// One E-LEAN-001 per use of `package`, `import`, `this`, `subtype` and
/// `supertype`.
pub fn check_lean_supported(analyzed: &AnalyzedProgram) -> Vec<Diagnostic> {
    let program = &analyzed.program;
    let mut out = Vec::new();
    if let Some(package) = &program.package {
        out.push(unsupported("package", &package.span));
    }
    for import in &program.imports {
        out.push(unsupported("import", &import.span));
    }
    let bounds = |params: &[TypeParam], out: &mut Vec<Diagnostic>| {
        for p in params {
            match p.bound {
                TypeBound::Subtype(_) => out.push(unsupported("subtype", &p.span)),
                TypeBound::Supertype(_) => out.push(unsupported("supertype", &p.span)),
                TypeBound::None => {}
            }
        }
    };
    for class in program.classes() {
        bounds(&class.type_params, &mut out);
        for d in class.all_definitions() {
            bounds(&d.type_params, &mut out);
            if let Some(body) = &d.body {
                body.walk(&mut |e| {
                    let is_this = match &e.kind {
                        ExprKind::SelfRef => true,
                        ExprKind::Ident(name) => name.starts_with("this."),
                        _ => false,
                    };
                    if is_this {
                        out.push(unsupported("this", &e.span));
                    }
                });
            }
        }
    }
    out.sort_by_key(|d| (d.span.line_start, d.span.col_start));
    out
}

pub fn translate_to_lean(analyzed: &AnalyzedProgram) -> LeanRendering {
    let diagnostics = check_lean_supported(analyzed);
    if has_errors(&diagnostics) {
        return LeanRendering {
            text: None,
            diagnostics,
            source_map: Vec::new(),
        };
    }
    let program = filter_directives(&analyzed.program, "lean");
    let translator = Translator {
        constructors: analyzed
            .constructors
            .values()
            .map(|c| (c.name.clone(), c.class_name.clone()))
            .collect(),
        class: String::new(),
    };
    let mut out = Output::default();
    for item in &program.items {
        out.separate();
        match item {
            TopItem::Directive(d) => directive(&mut out, d),
            TopItem::Class(class) => Translator {
                class: class.name.clone(),
                ..translator.clone()
            }
            .class(&mut out, class, analyzed),
        }
    }
    LeanRendering {
        text: Some(out.text),
        diagnostics,
        source_map: out.map,
    }
}

fn comments(out: &mut Output, comments: &[String]) {
    for c in comments {
        out.lines(0, &format!("--{c}"));
    }
}

fn directive(out: &mut Output, d: &DirectiveBlock) {
    out.mark(&d.span);
    for line in &d.raw_lines {
        out.lines(0, line);
        if line.is_empty() {
            out.push("\n");
        }
    }
}

pub fn translate_type_to_lean(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Named(name) => name.clone(),
        TypeExpr::Applied { base, args } => {
            let mut out = wrapped_type(base);
            for a in args {
                out.push(' ');
                out.push_str(&wrapped_type(a));
            }
            out
        }
        TypeExpr::Function { domain, codomain } => {
            let domain = match **domain {
                TypeExpr::Function { .. } => format!("({})", translate_type_to_lean(domain)),
                _ => translate_type_to_lean(domain),
            };
            format!("{} -> {}", domain, translate_type_to_lean(codomain))
        }
    }
}

fn wrapped_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Named(name) => name.clone(),
        _ => format!("({})", translate_type_to_lean(ty)),
    }
}

fn type_params(params: &[TypeParam]) -> String {
    params.iter().map(|p| format!(" ({} : Type)", p.name)).collect()
}

/// Renders `match x with | p => e …` on one line.
pub fn translate_match_to_lean(m: &Expr) -> String {
    Translator::default().expr(m)
}

#[derive(Debug, Clone, Default)]
struct Translator {
    /// Constructor name → class name.
    constructors: HashMap<String, String>,
    /// Class whose namespace is open.
    class: String,
}

impl Translator {
    fn class(&self, out: &mut Output, class: &ClassDecl, analyzed: &AnalyzedProgram) {
        comments(out, &class.comments);
        out.mark(&class.span);
        out.push(&format!("namespace {}\n", class.name));
        let fields = analyzed
            .constructors
            .get(&class.name)
            .map(|c| c.fields.as_slice())
            .unwrap_or_default();
        if !fields.is_empty() {
            out.push(&format!(
                "\nclass {}{} where\n  {} ::\n",
                class.name,
                type_params(&class.type_params),
                class.constructor_name()
            ));
            for f in fields {
                out.push(&format!("    {} : {}\n", f.name, translate_type_to_lean(&f.ty)));
            }
            out.push("  deriving DecidableEq\n");
        }
        for item in &class.items {
            match item {
                ClassItem::Abstract(_) => continue,
                ClassItem::Definition(d) => {
                    out.push("\n");
                    comments(out, &d.comments);
                    out.mark(&d.span);
                    out.lines(0, &self.definition(d));
                }
                ClassItem::Directive(d) => {
                    out.push("\n");
                    directive(out, d);
                }
            }
        }
        out.push(&format!("\nend {}\n", class.name));
    }

    fn definition(&self, d: &Definition) -> String {
        let mut out = format!("def {}{}", d.name, type_params(&d.type_params));
        for p in &d.params {
            out.push_str(&format!(" ({} : {})", p.name, translate_type_to_lean(&p.ty)));
        }
        if let Some(ty) = &d.result_type {
            out.push_str(&format!(" : {}", translate_type_to_lean(ty)));
        }
        if let Some(body) = &d.body {
            out.push_str(&format!(" :=\n  {}", self.expr(body)));
        }
        out
    }

    fn name(&self, name: &str) -> String {
        match self.constructors.get(name) {
            Some(class) if *class != self.class => format!("{class}.{name}"),
            _ => name.to_string(),
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match &e.kind {
            ExprKind::Int(v) => v.to_string(),
            ExprKind::Bool(b) => b.to_string(),
            ExprKind::Str(s) => quote(s),
            ExprKind::Ident(name) => self.name(name),
            ExprKind::SelfRef => "this".to_string(),
            ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => self.call(e),
            ExprKind::Lambda {
                param,
                param_type,
                body,
            } => match param_type {
                Some(t) => format!("fun ({} : {}) => {}", param, translate_type_to_lean(t), self.sub(body)),
                None => format!("fun {} => {}", param, self.sub(body)),
            },
            ExprKind::If {
                condition,
                then_branch,
                else_branch,
            } => format!(
                "if {} then {} else {}",
                self.sub(condition),
                self.sub(then_branch),
                self.sub(else_branch)
            ),
            ExprKind::Match { scrutinee, cases } => {
                let mut out = format!("match {} with", self.sub(scrutinee));
                for case in cases {
                    out.push_str(&format!(
                        " | {} => {}",
                        self.pattern(&case.pattern),
                        self.sub(&case.body)
                    ));
                }
                out
            }
            ExprKind::Binary { op, left, right } => {
                let symbol = match op {
                    BinaryOp::And => "&&",
                    BinaryOp::Or => "||",
                    other => other.symbol(),
                };
                format!("{} {} {}", self.sub(left), symbol, self.sub(right))
            }
            ExprKind::Not(operand) => format!("!{}", self.sub(operand)),
        }
    }

    fn sub(&self, e: &Expr) -> String {
        let text = self.expr(e);
        if is_atomic(e) {
            text
        } else {
            format!("({text})")
        }
    }

    /// Positional application; explicit type arguments need the `@` form.
    fn call(&self, e: &Expr) -> String {
        let (head, args) = e.call_chain();
        let explicit = args.iter().any(|a| matches!(a, CallArg::Type(_)));
        let mut out = self.sub(head);
        if explicit {
            out.insert(0, '@');
        }
        for arg in args {
            out.push(' ');
            match arg {
                CallArg::Positional(a) => out.push_str(&self.sub(a)),
                CallArg::Named(name, a) => out.push_str(&format!("({} := {})", name, self.expr(a))),
                CallArg::Type(t) => out.push_str(&wrapped_type(t)),
            }
        }
        out
    }

    fn pattern(&self, p: &Pattern) -> String {
        match &p.kind {
            PatternKind::Wildcard => "_".to_string(),
            PatternKind::Var(name) => name.clone(),
            PatternKind::Literal(Literal::Int(v)) => v.to_string(),
            PatternKind::Literal(Literal::Bool(b)) => b.to_string(),
            PatternKind::Literal(Literal::Str(s)) => quote(s),
            PatternKind::Constructor { name, args } => {
                let mut out = self.name(name);
                for a in args {
                    out.push(' ');
                    match a.kind {
                        PatternKind::Constructor { ref args, .. } if !args.is_empty() => {
                            out.push_str(&format!("({})", self.pattern(a)))
                        }
                        PatternKind::Literal(Literal::Int(ref v)) if v.sign() == num_bigint::Sign::Minus => {
                            out.push_str(&format!("({})", self.pattern(a)))
                        }
                        _ => out.push_str(&self.pattern(a)),
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;
    use crate::parser::parse_expression;
    use crate::{analyze, parse_source};

    fn analyzed(src: &str) -> AnalyzedProgram {
        let parsed = parse_source(src, "t.soda");
        analyze(parsed.program.unwrap_or_else(|| panic!("{:?}", parsed.diagnostics)))
    }

    fn lean(src: &str) -> String {
        translate_to_lean(&analyzed(src)).text.expect("supported")
    }

    fn match_text(src: &str) -> String {
        let lexed = tokenize(src, "t.soda");
        translate_match_to_lean(&parse_expression(&lexed.tokens, 0).unwrap().0)
    }

    #[test]
    fn empty_program_is_empty_text() {
        assert_eq!(lean(""), "");
    }

    #[test]
    fn match_translation() {
        assert_eq!(
            match_text("match x case Pair_ (a) (b) ==> a"),
            "match x with | Pair_ a b => a"
        );
        assert_eq!(match_text("match x case _ ==> e"), "match x with | _ => e");
        assert_eq!(
            match_text("match n case 0 ==> 1 case 1 ==> 0"),
            "match n with | 0 => 1 | 1 => 0"
        );
        assert_eq!(
            match_text("match p case Pair_ (Pair_ (a) (_)) (-1) ==> a + 1"),
            "match p with | Pair_ (Pair_ a _) (-1) => (a + 1)"
        );
    }

    #[test]
    fn concrete_only_class_is_namespace_with_defs() {
        let text = lean("// numbers\nclass C\n\n  // zero\n  zero : Int = 0\n\n  inc (x : Int) : Int = x + 1\n\nend\n");
        assert_eq!(
            text,
            "-- numbers\nnamespace C\n\n-- zero\ndef zero : Int :=\n  0\n\ndef inc (x : Int) : Int :=\n  x + 1\n\nend C\n"
        );
    }

    #[test]
    fn each_unsupported_construct_reported_once() {
        let cases = [
            ("package p\n\nclass A\nend\n", "package"),
            ("import a.B\n\nclass A\nend\n", "import"),
            (
                "class A\n\n  abstract\n    x : Int\n\n  y : Int = this.x\n\nend\n",
                "this",
            ),
            ("class A [T subtype B]\nend\n", "subtype"),
            ("class A [T supertype B]\nend\n", "supertype"),
        ];
        for (src, construct) in cases {
            let rendering = translate_to_lean(&analyzed(src));
            assert!(rendering.text.is_none());
            assert_eq!(rendering.diagnostics.len(), 1, "{construct}");
            assert_eq!(rendering.diagnostics[0].code, Code::LeanUnsupported);
            assert!(rendering.diagnostics[0].message.contains(&format!("`{construct}`")));
        }
    }

    #[test]
    fn expressions() {
        let src = "class C\n\n  f (a : Bool) (n : Int) : Int = if not a or n < 0 then (lambda (x : Int) --> x * 2) (n) else g (n) (-1)\n\nend\n";
        let text = lean(src);
        assert!(
            text.contains("  if ((!a) || (n < 0)) then ((fun (x : Int) => (x * 2)) n) else (g n (-1))\n"),
            "{text}"
        );
    }

    #[test]
    fn foreign_constructors_are_qualified() {
        let src = "class Pair\n\n  abstract\n    fst : Int\n    snd : Int\n\nend\n\nclass Main\n\n  p : Pair = Pair_ [Int] (1) (2)\n\n  q (x : Pair) : Int =\n    match x\n      case Pair_ (a) (b) ==> a\n\nend\n";
        let text = lean(src);
        assert!(text.contains("def p : Pair :=\n  @Pair.Pair_ Int 1 2\n"), "{text}");
        assert!(text.contains("match x with | Pair.Pair_ a b => a\n"), "{text}");
    }

    #[test]
    fn lean_directives_spliced() {
        let src = "class C\n\n  directive lean\n    theorem t : True := by\n      trivial\n\n  directive scala\n    val x = 1\n\nend\n";
        assert_eq!(lean(src), "namespace C\n\ntheorem t : True := by\n  trivial\n\nend C\n");
    }
}
