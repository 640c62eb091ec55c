//! Immutable syntax tree for Soda programs.
//!
//! Multi-parameter functions and calls are curried: `f (a) (b)` is
//! `Apply(Apply(f, a), b)` and `lambda x --> lambda y --> e` nests two
//! single-parameter lambdas. Children are behind `Arc` so that closures in
//! the interpreter can hold on to bodies without copying the tree.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Bool(bool),
    Str(String),
    /// A possibly dotted name, e.g. `x` or `p.fst`.
    Ident(String),
    /// `this`
    SelfRef,
    Apply {
        function: Arc<Expr>,
        argument: Arc<Expr>,
    },
    /// `f (param := argument)`
    NamedApply {
        function: Arc<Expr>,
        param: String,
        argument: Arc<Expr>,
    },
    /// `f [T]`, explicit type argument as in `Pair_ [Int] [Int] (1) (2)`.
    TypeApply {
        function: Arc<Expr>,
        type_arg: TypeExpr,
    },
    Lambda {
        param: String,
        param_type: Option<TypeExpr>,
        body: Arc<Expr>,
    },
    If {
        condition: Arc<Expr>,
        then_branch: Arc<Expr>,
        else_branch: Arc<Expr>,
    },
    Match {
        scrutinee: Arc<Expr>,
        cases: Vec<MatchCase>,
    },
    Binary {
        op: BinaryOp,
        left: Arc<Expr>,
        right: Arc<Expr>,
    },
    Not(Arc<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchCase {
    pub pattern: Pattern,
    pub body: Arc<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Add,
    Sub,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 11] = [
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Eq,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::And,
        BinaryOp::Or,
    ];

    /// Soda spelling.
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Eq => "==",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter. Application (7) and unary
    /// operators (6) sit above every binary operator.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Mul | BinaryOp::Div => 5,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Eq | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 3,
            BinaryOp::And => 2,
            BinaryOp::Or => 1,
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<BinaryOp> {
        BinaryOp::ALL.into_iter().find(|op| op.symbol() == symbol)
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Int(BigInt),
    Bool(bool),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternKind {
    Wildcard,
    Var(String),
    Literal(Literal),
    Constructor { name: String, args: Vec<Pattern> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Named(String),
    /// `Seq [Int]`; never has an empty argument list.
    Applied {
        base: Box<TypeExpr>,
        args: Vec<TypeExpr>,
    },
    /// `A --> B`
    Function {
        domain: Box<TypeExpr>,
        codomain: Box<TypeExpr>,
    },
}

impl TypeExpr {
    pub fn named(name: impl Into<String>) -> Self {
        TypeExpr::Named(name.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeBound {
    /// `[A : Type]`
    None,
    /// `[A subtype B]` or `[A <: B]`
    Subtype(TypeExpr),
    /// `[A supertype B]` or `[A >: B]`
    Supertype(TypeExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeParam {
    pub name: String,
    pub bound: TypeBound,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
    pub span: SourceSpan,
}

/// A constant (no parameters) or function. Declarations inside an
/// `abstract` block have no body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub type_params: Vec<TypeParam>,
    pub params: Vec<Param>,
    pub result_type: Option<TypeExpr>,
    pub body: Option<Arc<Expr>>,
    pub is_tailrec: bool,
    /// Text of the `//` comment lines directly above the definition,
    /// without the leading `//`.
    pub comments: Vec<String>,
    pub span: SourceSpan,
}

impl Definition {
    pub fn is_constant(&self) -> bool {
        self.params.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveBlock {
    pub target: String,
    /// Lines with the block's base indentation removed; otherwise verbatim.
    pub raw_lines: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassItem {
    Abstract(Vec<Definition>),
    Definition(Definition),
    Directive(DirectiveBlock),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub type_params: Vec<TypeParam>,
    pub extends: Vec<TypeExpr>,
    /// Body items in source order.
    pub items: Vec<ClassItem>,
    pub comments: Vec<String>,
    pub span: SourceSpan,
}

impl ClassDecl {
    /// Body-less declarations of every `abstract` block, in source order.
    pub fn abstract_members(&self) -> impl Iterator<Item = &Definition> {
        self.items.iter().flat_map(|item| match item {
            ClassItem::Abstract(members) => members.as_slice(),
            _ => &[],
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Definition> {
        self.items.iter().filter_map(|item| match item {
            ClassItem::Definition(d) => Some(d),
            _ => None,
        })
    }

    pub fn directives(&self) -> impl Iterator<Item = &DirectiveBlock> {
        self.items.iter().filter_map(|item| match item {
            ClassItem::Directive(d) => Some(d),
            _ => None,
        })
    }

    /// Abstract members followed by concrete definitions, in source order.
    pub fn all_definitions(&self) -> impl Iterator<Item = &Definition> {
        self.items.iter().flat_map(|item| match item {
            ClassItem::Abstract(members) => members.as_slice(),
            ClassItem::Definition(d) => std::slice::from_ref(d),
            ClassItem::Directive(_) => &[],
        })
    }

    /// Name of the default constructor, `<ClassName>_`.
    pub fn constructor_name(&self) -> String {
        format!("{}_", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualifiedName {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopItem {
    Class(ClassDecl),
    Directive(DirectiveBlock),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub package: Option<QualifiedName>,
    pub imports: Vec<QualifiedName>,
    /// Classes and top-level directive blocks in source order.
    pub items: Vec<TopItem>,
}

impl Program {
    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.items.iter().filter_map(|item| match item {
            TopItem::Class(c) => Some(c),
            _ => None,
        })
    }

    pub fn top_directives(&self) -> impl Iterator<Item = &DirectiveBlock> {
        self.items.iter().filter_map(|item| match item {
            TopItem::Directive(d) => Some(d),
            _ => None,
        })
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes().find(|c| c.name == name)
    }
}

/// One argument of a curried call chain.
#[derive(Debug, Clone, Copy)]
pub enum CallArg<'a> {
    Positional(&'a Arc<Expr>),
    Named(&'a str, &'a Arc<Expr>),
    Type(&'a TypeExpr),
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Self { kind, span }
    }

    /// Splits `f [T] (a) (b := c)` into its head `f` and the arguments in
    /// application order. A non-call expression is its own head.
    pub fn call_chain(&self) -> (&Expr, Vec<CallArg<'_>>) {
        let mut args = Vec::new();
        let mut head = self;
        loop {
            match &head.kind {
                ExprKind::Apply { function, argument } => {
                    args.push(CallArg::Positional(argument));
                    head = function;
                }
                ExprKind::NamedApply {
                    function,
                    param,
                    argument,
                } => {
                    args.push(CallArg::Named(param, argument));
                    head = function;
                }
                ExprKind::TypeApply { function, type_arg } => {
                    args.push(CallArg::Type(type_arg));
                    head = function;
                }
                _ => break,
            }
        }
        args.reverse();
        (head, args)
    }

    pub fn is_call(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. }
        )
    }

    /// Immediate subexpressions, left to right.
    pub fn children(&self) -> Vec<&Arc<Expr>> {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Ident(_) | ExprKind::SelfRef => {
                Vec::new()
            }
            ExprKind::Apply { function, argument } | ExprKind::NamedApply { function, argument, .. } => {
                vec![function, argument]
            }
            ExprKind::TypeApply { function, .. } => vec![function],
            ExprKind::Lambda { body, .. } => vec![body],
            ExprKind::If {
                condition,
                then_branch,
                else_branch,
            } => vec![condition, then_branch, else_branch],
            ExprKind::Match { scrutinee, cases } => {
                let mut out = vec![scrutinee];
                out.extend(cases.iter().map(|c| &c.body));
                out
            }
            ExprKind::Binary { left, right, .. } => vec![left, right],
            ExprKind::Not(operand) => vec![operand],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }
}

impl Pattern {
    pub fn new(kind: PatternKind, span: SourceSpan) -> Self {
        Self { kind, span }
    }

    /// Variables bound by the pattern, left to right.
    pub fn bound_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            PatternKind::Var(name) => out.push(name),
            PatternKind::Constructor { args, .. } => args.iter().for_each(|a| a.collect_bound(out)),
            PatternKind::Wildcard | PatternKind::Literal(_) => {}
        }
    }
}

/// Returns a copy with every source span replaced by the synthetic span,
/// so trees parsed from different texts compare by structure alone.
pub trait EraseSpans {
    fn erase_spans(&self) -> Self;
}

impl EraseSpans for Expr {
    fn erase_spans(&self) -> Self {
        let e = |x: &Arc<Expr>| Arc::new(x.erase_spans());
        let kind = match &self.kind {
            ExprKind::Apply { function, argument } => ExprKind::Apply {
                function: e(function),
                argument: e(argument),
            },
            ExprKind::NamedApply {
                function,
                param,
                argument,
            } => ExprKind::NamedApply {
                function: e(function),
                param: param.clone(),
                argument: e(argument),
            },
            ExprKind::TypeApply { function, type_arg } => ExprKind::TypeApply {
                function: e(function),
                type_arg: type_arg.clone(),
            },
            ExprKind::Lambda {
                param,
                param_type,
                body,
            } => ExprKind::Lambda {
                param: param.clone(),
                param_type: param_type.clone(),
                body: e(body),
            },
            ExprKind::If {
                condition,
                then_branch,
                else_branch,
            } => ExprKind::If {
                condition: e(condition),
                then_branch: e(then_branch),
                else_branch: e(else_branch),
            },
            ExprKind::Match { scrutinee, cases } => ExprKind::Match {
                scrutinee: e(scrutinee),
                cases: cases
                    .iter()
                    .map(|c| MatchCase {
                        pattern: c.pattern.erase_spans(),
                        body: e(&c.body),
                    })
                    .collect(),
            },
            ExprKind::Binary { op, left, right } => ExprKind::Binary {
                op: *op,
                left: e(left),
                right: e(right),
            },
            ExprKind::Not(operand) => ExprKind::Not(e(operand)),
            leaf => leaf.clone(),
        };
        Expr::new(kind, SourceSpan::synthetic())
    }
}

impl EraseSpans for Pattern {
    fn erase_spans(&self) -> Self {
        let kind = match &self.kind {
            PatternKind::Constructor { name, args } => PatternKind::Constructor {
                name: name.clone(),
                args: args.iter().map(EraseSpans::erase_spans).collect(),
            },
            other => other.clone(),
        };
        Pattern::new(kind, SourceSpan::synthetic())
    }
}

impl EraseSpans for TypeParam {
    fn erase_spans(&self) -> Self {
        TypeParam {
            span: SourceSpan::synthetic(),
            ..self.clone()
        }
    }
}

impl EraseSpans for Definition {
    fn erase_spans(&self) -> Self {
        Definition {
            name: self.name.clone(),
            type_params: self.type_params.iter().map(EraseSpans::erase_spans).collect(),
            params: self
                .params
                .iter()
                .map(|p| Param {
                    span: SourceSpan::synthetic(),
                    ..p.clone()
                })
                .collect(),
            result_type: self.result_type.clone(),
            body: self.body.as_ref().map(|b| Arc::new(b.erase_spans())),
            is_tailrec: self.is_tailrec,
            comments: self.comments.clone(),
            span: SourceSpan::synthetic(),
        }
    }
}

impl EraseSpans for DirectiveBlock {
    fn erase_spans(&self) -> Self {
        DirectiveBlock {
            span: SourceSpan::synthetic(),
            ..self.clone()
        }
    }
}

impl EraseSpans for ClassDecl {
    fn erase_spans(&self) -> Self {
        ClassDecl {
            name: self.name.clone(),
            type_params: self.type_params.iter().map(EraseSpans::erase_spans).collect(),
            extends: self.extends.clone(),
            items: self
                .items
                .iter()
                .map(|item| match item {
                    ClassItem::Abstract(members) => {
                        ClassItem::Abstract(members.iter().map(EraseSpans::erase_spans).collect())
                    }
                    ClassItem::Definition(d) => ClassItem::Definition(d.erase_spans()),
                    ClassItem::Directive(d) => ClassItem::Directive(d.erase_spans()),
                })
                .collect(),
            comments: self.comments.clone(),
            span: SourceSpan::synthetic(),
        }
    }
}

impl EraseSpans for Program {
    fn erase_spans(&self) -> Self {
        let qualified = |q: &QualifiedName| QualifiedName {
            name: q.name.clone(),
            span: SourceSpan::synthetic(),
        };
        Program {
            package: self.package.as_ref().map(qualified),
            imports: self.imports.iter().map(qualified).collect(),
            items: self
                .items
                .iter()
                .map(|item| match item {
                    TopItem::Class(c) => TopItem::Class(c.erase_spans()),
                    TopItem::Directive(d) => TopItem::Directive(d.erase_spans()),
                })
                .collect(),
        }
    }
}

/// Structural equality: same tree, spans ignored.
pub fn structurally_equal<T: EraseSpans + PartialEq>(a: &T, b: &T) -> bool {
    a.erase_spans() == b.erase_spans()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(col: u32) -> SourceSpan {
        SourceSpan::new("t".into(), 1, col, 1, col + 1)
    }

    fn ident(name: &str, col: u32) -> Arc<Expr> {
        Arc::new(Expr::new(ExprKind::Ident(name.into()), sp(col)))
    }

    #[test]
    fn call_chain_in_application_order() {
        let f = ident("f", 1);
        let inner = Arc::new(Expr::new(
            ExprKind::TypeApply {
                function: f,
                type_arg: TypeExpr::named("Int"),
            },
            sp(1),
        ));
        let mid = Arc::new(Expr::new(
            ExprKind::Apply {
                function: inner,
                argument: ident("a", 5),
            },
            sp(1),
        ));
        let call = Expr::new(
            ExprKind::NamedApply {
                function: mid,
                param: "y".into(),
                argument: ident("b", 9),
            },
            sp(1),
        );
        let (head, args) = call.call_chain();
        assert_eq!(head.kind, ExprKind::Ident("f".into()));
        assert!(matches!(args[0], CallArg::Type(TypeExpr::Named(n)) if n == "Int"));
        assert!(matches!(args[1], CallArg::Positional(_)));
        assert!(matches!(args[2], CallArg::Named("y", _)));
    }

    #[test]
    fn erase_spans_ignores_positions_only() {
        let a = Expr::new(ExprKind::Not(ident("x", 3)), sp(1));
        let b = Expr::new(ExprKind::Not(ident("x", 8)), sp(6));
        let c = Expr::new(ExprKind::Not(ident("y", 3)), sp(1));
        assert_ne!(a, b);
        assert!(structurally_equal(&a, &b));
        assert!(!structurally_equal(&a, &c));
    }

    #[test]
    fn pattern_bindings_left_to_right() {
        let var = |n: &str| Pattern::new(PatternKind::Var(n.into()), sp(1));
        let p = Pattern::new(
            PatternKind::Constructor {
                name: "Pair_".into(),
                args: vec![
                    var("a"),
                    Pattern::new(
                        PatternKind::Constructor {
                            name: "Pair_".into(),
                            args: vec![var("b"), Pattern::new(PatternKind::Wildcard, sp(1))],
                        },
                        sp(1),
                    ),
                ],
            },
            sp(1),
        );
        assert_eq!(p.bound_names(), vec!["a", "b"]);
    }
}
