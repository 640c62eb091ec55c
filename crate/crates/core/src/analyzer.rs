//! Structural checks and enrichment of parsed programs.
//!
//! No type checking happens here: types are left to the target languages.
//! The analyzer enforces the single-definition rule, synthesizes default
//! constructors, verifies `@tailrec` annotations, rewrites named-argument
//! calls into positional ones and warns about identifiers it cannot see.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::syntax::*;

/// Names the interpreter provides without a declaration.
pub const BUILTINS: [&str; 2] = ["range", "fold"];

/// Signature of a synthesized default constructor `<ClassName>_`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorSignature {
    pub name: String,
    pub class_name: String,
    pub type_params: Vec<TypeParam>,
    /// Parameterless abstract members in source order.
    pub fields: Vec<Param>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedProgram {
    /// The input program with named-argument calls resolved.
    pub program: Program,
    /// Keyed by class name.
    pub constructors: BTreeMap<String, ConstructorSignature>,
    pub diagnostics: Vec<Diagnostic>,
}

impl AnalyzedProgram {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }

    pub fn constructor(&self, name: &str) -> Option<&ConstructorSignature> {
        self.constructors.values().find(|c| c.name == name)
    }
}

pub fn analyze(program: Program) -> AnalyzedProgram {
    let mut diagnostics = check_single_definition(&program);
    diagnostics.extend(check_parameters(&program));
    let constructors = synthesize_constructors(&program);
    for class in program.classes() {
        for d in class.definitions().filter(|d| d.is_tailrec) {
            diagnostics.extend(verify_tailrec(d));
        }
    }
    let mut resolver = Resolver::new(&program, &constructors);
    let program = resolver.program(&program);
    diagnostics.extend(resolver.diagnostics);
    diagnostics.sort_by_key(|d| (d.span.line_start, d.span.col_start));
    AnalyzedProgram {
        program,
        constructors,
        diagnostics,
    }
}

/// One E-SEM-001 per repeated class name in the program and per repeated
/// member name within a class; the first occurrence is never flagged.
pub fn check_single_definition(program: &Program) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    let mut classes = HashSet::new();
    for class in program.classes() {
        if !classes.insert(class.name.as_str()) {
            diagnostics.push(Diagnostic::new(
                Code::DuplicateDefinition,
                format!("class `{}` is already defined", class.name),
                class.span.clone(),
            ));
        }
        let mut members = HashSet::new();
        for d in class.all_definitions() {
            if !members.insert(d.name.as_str()) {
                diagnostics.push(Diagnostic::new(
                    Code::DuplicateDefinition,
                    format!("`{}` is already defined in class `{}`", d.name, class.name),
                    d.span.clone(),
                ));
            }
        }
    }
    diagnostics
}

/// Parameter names of each definition must be pairwise distinct.
fn check_parameters(program: &Program) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    for d in program.classes().flat_map(|c| c.all_definitions()) {
        let mut seen = HashSet::new();
        for p in &d.params {
            if !seen.insert(p.name.as_str()) {
                diagnostics.push(Diagnostic::new(
                    Code::DuplicateParameter,
                    format!("parameter `{}` of `{}` is declared twice", p.name, d.name),
                    p.span.clone(),
                ));
            }
        }
    }
    diagnostics
}

/// One constructor per class. Abstract members taking parameters are
/// functions, not data, and are left out of the constructor.
pub fn synthesize_constructors(program: &Program) -> BTreeMap<String, ConstructorSignature> {
    let mut constructors = BTreeMap::new();
    for class in program.classes() {
        let fields = class
            .abstract_members()
            .filter(|m| m.params.is_empty())
            .map(|m| Param {
                name: m.name.clone(),
                ty: m.result_type.clone().unwrap_or_else(|| TypeExpr::named("Any")),
                span: m.span.clone(),
            })
            .collect();
        constructors.entry(class.name.clone()).or_insert(ConstructorSignature {
            name: class.constructor_name(),
            class_name: class.name.clone(),
            type_params: class.type_params.clone(),
            fields,
        });
    }
    constructors
}

/// Reports every self-call of `definition` outside tail position. Tail
/// positions are the body itself, both branches of a tail `if`, and every
/// arm of a tail `match`.
pub fn verify_tailrec(definition: &Definition) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    if let Some(body) = &definition.body {
        let shadowed = definition.params.iter().any(|p| p.name == definition.name);
        if !shadowed {
            tail_calls(&definition.name, body, true, &mut diagnostics);
        }
    }
    diagnostics
}

fn tail_calls(name: &str, e: &Expr, tail: bool, out: &mut Vec<Diagnostic>) {
    match &e.kind {
        ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => {
            let (head, args) = e.call_chain();
            if matches!(&head.kind, ExprKind::Ident(n) if n == name) {
                if !tail {
                    out.push(Diagnostic::new(
                        Code::NonTailSelfCall,
                        format!("recursive call to `{name}` is not in tail position"),
                        e.span.clone(),
                    ));
                }
            } else {
                tail_calls(name, head, false, out);
            }
            for arg in args {
                if let CallArg::Positional(a) | CallArg::Named(_, a) = arg {
                    tail_calls(name, a, false, out);
                }
            }
        }
        ExprKind::If {
            condition,
            then_branch,
            else_branch,
        } => {
            tail_calls(name, condition, false, out);
            tail_calls(name, then_branch, tail, out);
            tail_calls(name, else_branch, tail, out);
        }
        ExprKind::Match { scrutinee, cases } => {
            tail_calls(name, scrutinee, false, out);
            for case in cases {
                if !case.pattern.bound_names().contains(&name) {
                    tail_calls(name, &case.body, tail, out);
                }
            }
        }
        ExprKind::Lambda { param, body, .. } => {
            if param != name {
                tail_calls(name, body, false, out);
            }
        }
        _ => {
            for child in e.children() {
                tail_calls(name, child, false, out);
            }
        }
    }
}

/// Rewrites a call chain made only of named (and type) arguments into the
/// positional chain in declared parameter order.
pub fn resolve_named_arguments(call: &Expr, params: &[String]) -> Result<Expr, Vec<Diagnostic>> {
    let (head, args) = call.call_chain();
    let mut diagnostics = Vec::new();
    let mut types = Vec::new();
    let mut given: HashMap<&str, &Arc<Expr>> = HashMap::new();
    for arg in &args {
        match *arg {
            CallArg::Type(t) => types.push(t.clone()),
            CallArg::Named(name, value) => {
                if !params.iter().any(|p| p == name) {
                    diagnostics.push(Diagnostic::new(
                        Code::UnknownParameter,
                        format!("unknown parameter `{}`, expected one of: {}", name, params.join(", ")),
                        value.span.clone(),
                    ));
                } else if given.insert(name, value).is_some() {
                    diagnostics.push(Diagnostic::new(
                        Code::RepeatedParameter,
                        format!("parameter `{name}` is given more than once"),
                        value.span.clone(),
                    ));
                }
            }
            CallArg::Positional(value) => diagnostics.push(Diagnostic::new(
                Code::MixedArguments,
                "named (`:=`) and positional arguments cannot be mixed in one call",
                value.span.clone(),
            )),
        }
    }
    let missing: Vec<&str> = params
        .iter()
        .map(String::as_str)
        .filter(|p| !given.contains_key(p))
        .collect();
    if !missing.is_empty() && diagnostics.is_empty() {
        diagnostics.push(Diagnostic::new(
            Code::MissingParameter,
            format!("missing argument for parameter(s): {}", missing.join(", ")),
            call.span.clone(),
        ));
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let mut expr = head.clone();
    for type_arg in types {
        expr = Expr::new(
            ExprKind::TypeApply {
                function: Arc::new(expr),
                type_arg,
            },
            call.span.clone(),
        );
    }
    for p in params {
        expr = Expr::new(
            ExprKind::Apply {
                function: Arc::new(expr),
                argument: given[p.as_str()].clone(),
            },
            call.span.clone(),
        );
    }
    Ok(expr)
}

/// Keeps only the directive blocks addressed to `target`.
pub fn filter_directives(program: &Program, target: &str) -> Program {
    let keep = |d: &DirectiveBlock| d.target == target;
    Program {
        package: program.package.clone(),
        imports: program.imports.clone(),
        items: program
            .items
            .iter()
            .filter(|item| !matches!(item, TopItem::Directive(d) if !keep(d)))
            .map(|item| match item {
                TopItem::Class(c) => TopItem::Class(ClassDecl {
                    items: c
                        .items
                        .iter()
                        .filter(|i| !matches!(i, ClassItem::Directive(d) if !keep(d)))
                        .cloned()
                        .collect(),
                    ..c.clone()
                }),
                other => other.clone(),
            })
            .collect(),
    }
}

/// Renames directive blocks addressed to `from` so that they are addressed
/// to `to`; blocks already addressed to `to` are dropped.
pub fn retarget_directives(program: &Program, from: &str, to: &str) -> Program {
    let retarget = |d: &DirectiveBlock| {
        if d.target == from {
            Some(DirectiveBlock {
                target: to.to_string(),
                ..d.clone()
            })
        } else if d.target == to {
            None
        } else {
            Some(d.clone())
        }
    };
    Program {
        package: program.package.clone(),
        imports: program.imports.clone(),
        items: program
            .items
            .iter()
            .filter_map(|item| match item {
                TopItem::Directive(d) => retarget(d).map(TopItem::Directive),
                TopItem::Class(c) => Some(TopItem::Class(ClassDecl {
                    items: c
                        .items
                        .iter()
                        .filter_map(|i| match i {
                            ClassItem::Directive(d) => retarget(d).map(ClassItem::Directive),
                            other => Some(other.clone()),
                        })
                        .collect(),
                    ..c.clone()
                })),
            })
            .collect(),
    }
}

/// E-SEM-030 for each `this` in `expr` when it is not inside a class.
pub fn check_this(expr: &Expr, inside_class: bool) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !inside_class {
        expr.walk(&mut |e| {
            let is_this = match &e.kind {
                ExprKind::SelfRef => true,
                ExprKind::Ident(name) => name == "this" || name.starts_with("this."),
                _ => false,
            };
            if is_this {
                out.push(Diagnostic::new(
                    Code::ThisOutsideClass,
                    "`this` used outside of a class",
                    e.span.clone(),
                ));
            }
        });
    }
    out
}

/// Walks definition bodies with lexical scope: resolves named arguments
/// and warns about undeclared identifiers.
struct Resolver<'p> {
    program: &'p Program,
    constructors: HashMap<&'p str, Vec<String>>,
    class_names: HashSet<&'p str>,
    imported: HashSet<&'p str>,
    /// Members visible in the class being walked, own and inherited.
    members: HashMap<&'p str, &'p Definition>,
    locals: Vec<String>,
    diagnostics: Vec<Diagnostic>,
}

impl<'p> Resolver<'p> {
    fn new(program: &'p Program, constructors: &'p BTreeMap<String, ConstructorSignature>) -> Self {
        Self {
            program,
            constructors: constructors
                .values()
                .map(|c| (c.name.as_str(), c.fields.iter().map(|f| f.name.clone()).collect()))
                .collect(),
            class_names: program.classes().map(|c| c.name.as_str()).collect(),
            imported: program
                .imports
                .iter()
                .map(|i| i.name.rsplit('.').next().unwrap_or(&i.name))
                .collect(),
            members: HashMap::new(),
            locals: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn program(&mut self, program: &'p Program) -> Program {
        let items = program
            .items
            .iter()
            .map(|item| match item {
                TopItem::Class(c) => TopItem::Class(self.class(c)),
                other => other.clone(),
            })
            .collect();
        Program {
            items,
            ..program.clone()
        }
    }

    fn class(&mut self, class: &'p ClassDecl) -> ClassDecl {
        self.members.clear();
        self.collect_members(class, &mut HashSet::new());
        let items = class
            .items
            .iter()
            .map(|item| match item {
                ClassItem::Definition(d) => ClassItem::Definition(self.definition(d)),
                other => other.clone(),
            })
            .collect();
        ClassDecl { items, ..class.clone() }
    }

    /// Own members shadow inherited ones; cycles in `extends` are cut.
    fn collect_members(&mut self, class: &'p ClassDecl, visited: &mut HashSet<&'p str>) {
        if !visited.insert(class.name.as_str()) {
            return;
        }
        for d in class.all_definitions() {
            self.members.entry(d.name.as_str()).or_insert(d);
        }
        for parent in &class.extends {
            let mut base = parent;
            while let TypeExpr::Applied { base: b, .. } = base {
                base = b;
            }
            if let TypeExpr::Named(name) = base {
                if let Some(parent) = self.program.class(name) {
                    self.collect_members(parent, visited);
                }
            }
        }
    }

    fn definition(&mut self, d: &Definition) -> Definition {
        let Some(body) = &d.body else { return d.clone() };
        self.locals = d.params.iter().map(|p| p.name.clone()).collect();
        let body = self.expr(body);
        Definition {
            body: Some(body),
            ..d.clone()
        }
    }

    fn is_declared(&self, name: &str) -> bool {
        let first = name.split('.').next().unwrap_or(name);
        first == "this"
            || self.locals.iter().any(|l| l == first)
            || self.members.contains_key(first)
            || self.constructors.contains_key(first)
            || self.class_names.contains(first)
            || self.imported.contains(first)
            || BUILTINS.contains(&first)
    }

    /// Declared parameter names of the function a named call targets.
    fn target_params(&self, head: &Expr) -> Option<Vec<String>> {
        let ExprKind::Ident(name) = &head.kind else { return None };
        let names = |d: &Definition| d.params.iter().map(|p| p.name.clone()).collect();
        if let Some((class, member)) = name.split_once('.') {
            let class = self.program.class(class)?;
            return class.all_definitions().find(|d| d.name == member).map(names);
        }
        if self.locals.contains(name) {
            return None;
        }
        if let Some(d) = self.members.get(name.as_str()) {
            return Some(names(d));
        }
        if let Some(fields) = self.constructors.get(name.as_str()) {
            return Some(fields.clone());
        }
        self.program
            .classes()
            .flat_map(|c| c.all_definitions())
            .find(|d| &d.name == name)
            .map(names)
    }

    fn with_locals<T>(&mut self, names: Vec<String>, f: impl FnOnce(&mut Self) -> T) -> T {
        let depth = self.locals.len();
        self.locals.extend(names);
        let out = f(self);
        self.locals.truncate(depth);
        out
    }

    fn expr(&mut self, e: &Arc<Expr>) -> Arc<Expr> {
        match &e.kind {
            ExprKind::Ident(name) => {
                if !self.is_declared(name) {
                    self.diagnostics.push(Diagnostic::new(
                        Code::UndeclaredIdentifier,
                        format!("`{name}` is not declared in this file"),
                        e.span.clone(),
                    ));
                }
                e.clone()
            }
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::SelfRef => e.clone(),
            ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => self.call(e),
            ExprKind::Lambda {
                param,
                param_type,
                body,
            } => {
                let body = self.with_locals(vec![param.clone()], |r| r.expr(body));
                rebuilt(
                    e,
                    ExprKind::Lambda {
                        param: param.clone(),
                        param_type: param_type.clone(),
                        body,
                    },
                )
            }
            ExprKind::If {
                condition,
                then_branch,
                else_branch,
            } => rebuilt(
                e,
                ExprKind::If {
                    condition: self.expr(condition),
                    then_branch: self.expr(then_branch),
                    else_branch: self.expr(else_branch),
                },
            ),
            ExprKind::Match { scrutinee, cases } => {
                let scrutinee = self.expr(scrutinee);
                let cases = cases
                    .iter()
                    .map(|case| {
                        self.check_pattern(&case.pattern);
                        let bound = case.pattern.bound_names().into_iter().map(String::from).collect();
                        MatchCase {
                            pattern: case.pattern.clone(),
                            body: self.with_locals(bound, |r| r.expr(&case.body)),
                        }
                    })
                    .collect();
                rebuilt(e, ExprKind::Match { scrutinee, cases })
            }
            ExprKind::Binary { op, left, right } => rebuilt(
                e,
                ExprKind::Binary {
                    op: *op,
                    left: self.expr(left),
                    right: self.expr(right),
                },
            ),
            ExprKind::Not(operand) => rebuilt(e, ExprKind::Not(self.expr(operand))),
        }
    }

    fn check_pattern(&mut self, pattern: &Pattern) {
        if let PatternKind::Constructor { name, args } = &pattern.kind {
            if !self.is_declared(name) {
                self.diagnostics.push(Diagnostic::new(
                    Code::UndeclaredIdentifier,
                    format!("constructor `{name}` is not declared in this file"),
                    pattern.span.clone(),
                ));
            }
            args.iter().for_each(|a| self.check_pattern(a));
        }
    }

    /// Resolves arguments first, then the chain itself if it is named.
    fn call(&mut self, e: &Arc<Expr>) -> Arc<Expr> {
        let expr = self.chain(e);
        let (head, args) = expr.call_chain();
        if !args.iter().any(|a| matches!(a, CallArg::Named(..))) {
            return expr;
        }
        let Some(params) = self.target_params(head) else {
            let name = match &head.kind {
                ExprKind::Ident(n) => format!("`{n}`"),
                _ => "this expression".to_string(),
            };
            self.diagnostics.push(Diagnostic::new(
                Code::UnknownCallTarget,
                format!("cannot resolve named arguments: {name} has no declared signature in this file"),
                e.span.clone(),
            ));
            return expr;
        };
        match resolve_named_arguments(&expr, &params) {
            Ok(resolved) => Arc::new(resolved),
            Err(diagnostics) => {
                self.diagnostics.extend(diagnostics);
                expr
            }
        }
    }

    /// Rebuilds a call chain node by node, keeping every span.
    fn chain(&mut self, e: &Arc<Expr>) -> Arc<Expr> {
        match &e.kind {
            ExprKind::Apply { function, argument } => rebuilt(
                e,
                ExprKind::Apply {
                    function: self.chain(function),
                    argument: self.expr(argument),
                },
            ),
            ExprKind::NamedApply {
                function,
                param,
                argument,
            } => rebuilt(
                e,
                ExprKind::NamedApply {
                    function: self.chain(function),
                    param: param.clone(),
                    argument: self.expr(argument),
                },
            ),
            ExprKind::TypeApply { function, type_arg } => rebuilt(
                e,
                ExprKind::TypeApply {
                    function: self.chain(function),
                    type_arg: type_arg.clone(),
                },
            ),
            _ => self.expr(e),
        }
    }
}

fn rebuilt(original: &Expr, kind: ExprKind) -> Arc<Expr> {
    Arc::new(Expr::new(kind, original.span.clone()))
}
