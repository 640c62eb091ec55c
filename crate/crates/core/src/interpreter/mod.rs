//! Reference tree-walking interpreter.
//!
//! Evaluation is strict except for `and`/`or`, `if` and `match`. Calls in
//! tail position reuse the current evaluation frame, so tail-recursive
//! loops run in constant evaluation depth. Other calls nest, up to a
//! configurable call depth after which a `recursion_limit` fault is
//! returned. Faults are ordinary return values.

mod value;

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub use value::*;

use crate::analyzer::AnalyzedProgram;
use crate::syntax::*;

pub const DEFAULT_MAX_CALL_DEPTH: usize = 10_000;

/// Stack headroom kept free before growing onto a new segment.
const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

/// Instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Deepest nesting of evaluation frames.
    pub max_eval_depth: usize,
    /// Deepest nesting of non-tail calls.
    pub max_call_depth: usize,
    /// Function bodies entered, tail calls included.
    pub calls: u64,
}

pub struct Interpreter {
    classes: HashMap<String, Rc<ClassInfo>>,
    constructors: HashMap<String, Rc<ClassInfo>>,
    max_call_depth: usize,
    eval_depth: usize,
    call_depth: usize,
    stats: EvalStats,
}

impl Interpreter {
    pub fn new(analyzed: &AnalyzedProgram) -> Self {
        let program = &analyzed.program;
        let mut classes = HashMap::new();
        for class in program.classes() {
            if classes.contains_key(&class.name) {
                continue;
            }
            let mut members = HashMap::new();
            collect_members(program, class, &mut members, &mut HashSet::new());
            let fields = analyzed
                .constructors
                .get(&class.name)
                .map(|c| c.fields.iter().map(|f| Rc::from(f.name.as_str())).collect())
                .unwrap_or_default();
            let info = ClassInfo {
                name: class.name.as_str().into(),
                constructor: class.constructor_name().into(),
                fields,
                members,
            };
            classes.insert(class.name.clone(), Rc::new(info));
        }
        let constructors = classes
            .values()
            .map(|c| (c.constructor.to_string(), c.clone()))
            .collect();
        Self {
            classes,
            constructors,
            max_call_depth: DEFAULT_MAX_CALL_DEPTH,
            eval_depth: 0,
            call_depth: 0,
            stats: EvalStats::default(),
        }
    }

    /// An interpreter for bare expressions, with no classes in scope.
    pub fn empty() -> Self {
        Self::new(&crate::analyze(Program::default()))
    }

    pub fn with_max_call_depth(mut self, depth: usize) -> Self {
        self.max_call_depth = depth;
        self
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = EvalStats::default();
    }

    /// Evaluates `expr` outside of any class.
    pub fn evaluate(&mut self, expr: &Expr, env: &Env) -> EvalOutcome {
        self.eval(&Arc::new(expr.clone()), env, &Context::default())
    }

    /// Evaluates `expr` as if it were a body in `class`.
    pub fn evaluate_in(&mut self, class: &str, expr: &Expr, env: &Env) -> EvalOutcome {
        let context = Context {
            class: self.classes.get(class).cloned(),
            this: None,
        };
        self.eval(&Arc::new(expr.clone()), env, &context)
    }

    /// Calls `class.definition` with `args`, one argument per parameter.
    pub fn run_entry(&mut self, class: &str, definition: &str, args: Vec<Value>) -> EvalOutcome {
        let span = SourceSpan::synthetic();
        let Some(info) = self.classes.get(class).cloned() else {
            return Err(RuntimeFault::new(
                FaultKind::UnknownIdentifier,
                format!("no class `{class}`"),
                &span,
            ));
        };
        let context = Context {
            class: Some(info.clone()),
            this: None,
        };
        let mut value = self.member(&info, definition, &context, &span)?;
        for arg in args {
            value = self.apply(value, arg, &span)?;
        }
        Ok(value)
    }

    /// Calls `f` with one argument outside of tail position.
    pub fn apply(&mut self, f: Value, arg: Value, span: &SourceSpan) -> EvalOutcome {
        match self.apply_step(f, arg, span)? {
            Step::Done(v) => Ok(v),
            Step::Enter(body, env, context) => self.eval_call(&body, &env, &context, span),
        }
    }

    /// Evaluates a function body in a new frame that counts as one call.
    fn eval_call(&mut self, body: &Arc<Expr>, env: &Env, context: &Context, span: &SourceSpan) -> EvalOutcome {
        let mut in_call = false;
        let result = match self.enter_call(&mut in_call, span) {
            Ok(()) => self.eval(body, env, context),
            Err(fault) => Err(fault),
        };
        self.call_depth -= 1;
        result
    }

    fn eval(&mut self, expr: &Arc<Expr>, env: &Env, context: &Context) -> EvalOutcome {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || {
            self.eval_depth += 1;
            self.stats.max_eval_depth = self.stats.max_eval_depth.max(self.eval_depth);
            let mut in_call = false;
            let result = self.eval_frame(expr.clone(), env.clone(), context.clone(), &mut in_call);
            if in_call {
                self.call_depth -= 1;
            }
            self.eval_depth -= 1;
            result
        })
    }

    /// Marks the current frame as executing a call; only the first call of
    /// a frame counts, later ones are tail calls that replace it.
    fn enter_call(&mut self, in_call: &mut bool, span: &SourceSpan) -> Result<(), RuntimeFault> {
        self.stats.calls += 1;
        if !*in_call {
            *in_call = true;
            self.call_depth += 1;
            self.stats.max_call_depth = self.stats.max_call_depth.max(self.call_depth);
            if self.call_depth > self.max_call_depth {
                return Err(RuntimeFault::new(
                    FaultKind::RecursionLimit,
                    format!("call depth exceeds the limit of {}", self.max_call_depth),
                    span,
                ));
            }
        }
        Ok(())
    }

    fn eval_frame(
        &mut self,
        mut expr: Arc<Expr>,
        mut env: Env,
        mut context: Context,
        in_call: &mut bool,
    ) -> EvalOutcome {
        loop {
            let span = &expr.span;
            let next = match &expr.kind {
                ExprKind::Int(v) => return Ok(Value::Int(v.clone())),
                ExprKind::Bool(b) => return Ok(Value::Bool(*b)),
                ExprKind::Str(s) => return Ok(Value::str(s)),
                ExprKind::SelfRef => {
                    return match &context.this {
                        Some(this) => Ok(Value::Object(this.clone())),
                        None => Err(RuntimeFault::new(
                            FaultKind::UnknownIdentifier,
                            "`this` has no object here",
                            span,
                        )),
                    }
                }
                ExprKind::Ident(name) => return self.lookup(name, &env, &context, span),
                ExprKind::Lambda { param, body, .. } => {
                    return Ok(Value::Closure(Rc::new(Closure {
                        param: param.as_str().into(),
                        body: body.clone(),
                        env: env.clone(),
                        context: context.clone(),
                    })))
                }
                ExprKind::Not(operand) => {
                    let v = self.eval(operand, &env, &context)?;
                    return match v.as_bool() {
                        Some(b) => Ok(Value::Bool(!b)),
                        None => Err(operand_fault("not", &v, span)),
                    };
                }
                ExprKind::Binary { op, left, right } => return self.binary(*op, left, right, &env, &context, span),
                ExprKind::If {
                    condition,
                    then_branch,
                    else_branch,
                } => {
                    let c = self.eval(condition, &env, &context)?;
                    match c.as_bool() {
                        Some(true) => then_branch.clone(),
                        Some(false) => else_branch.clone(),
                        None => return Err(operand_fault("if", &c, &condition.span)),
                    }
                }
                ExprKind::Match { scrutinee, cases } => {
                    let v = self.eval(scrutinee, &env, &context)?;
                    let mut chosen = None;
                    for case in cases {
                        let mut bindings = Vec::new();
                        if match_pattern(&case.pattern, &v, &mut bindings) {
                            chosen = Some((case.body.clone(), bindings));
                            break;
                        }
                    }
                    let Some((body, bindings)) = chosen else {
                        return Err(RuntimeFault::new(
                            FaultKind::NoMatchingCase,
                            format!("no case matches {v}"),
                            span,
                        ));
                    };
                    for (name, value) in bindings {
                        env = env.bind(name.into(), value);
                    }
                    body
                }
                ExprKind::Apply { .. } | ExprKind::NamedApply { .. } | ExprKind::TypeApply { .. } => {
                    let (head, args) = expr.call_chain();
                    let mut f = match &head.kind {
                        ExprKind::Ident(name) => self.lookup(name, &env, &context, &head.span)?,
                        _ => self.eval(&Arc::new(head.clone()), &env, &context)?,
                    };
                    let mut values = Vec::with_capacity(args.len());
                    for arg in &args {
                        match *arg {
                            CallArg::Positional(a) => values.push(self.eval(a, &env, &context)?),
                            CallArg::Named(name, a) => {
                                return Err(RuntimeFault::new(
                                    FaultKind::ArityFault,
                                    format!("named argument `{name}` of a call whose target is unknown"),
                                    &a.span,
                                ))
                            }
                            CallArg::Type(_) => {}
                        }
                    }
                    let Some(last) = values.pop() else { return Ok(f) };
                    for v in values {
                        f = self.apply(f, v, span)?;
                    }
                    match self.apply_step(f, last, span)? {
                        Step::Done(v) => return Ok(v),
                        Step::Enter(body, new_env, new_context) => {
                            self.enter_call(in_call, span)?;
                            env = new_env;
                            context = new_context;
                            body
                        }
                    }
                }
            };
            expr = next;
        }
    }

    fn binary(
        &mut self,
        op: BinaryOp,
        left: &Arc<Expr>,
        right: &Arc<Expr>,
        env: &Env,
        context: &Context,
        span: &SourceSpan,
    ) -> EvalOutcome {
        let l = self.eval(left, env, context)?;
        if let BinaryOp::And | BinaryOp::Or = op {
            let Some(lb) = l.as_bool() else {
                return Err(operand_fault(op.symbol(), &l, span));
            };
            if lb == (op == BinaryOp::Or) {
                return Ok(Value::Bool(lb));
            }
            let r = self.eval(right, env, context)?;
            return match r.as_bool() {
                Some(rb) => Ok(Value::Bool(rb)),
                None => Err(operand_fault(op.symbol(), &r, span)),
            };
        }
        let r = self.eval(right, env, context)?;
        if op == BinaryOp::Eq {
            return match l.structural_eq(&r) {
                Some(eq) => Ok(Value::Bool(eq)),
                None => Err(RuntimeFault::new(
                    FaultKind::ArityFault,
                    "functions cannot be compared",
                    span,
                )),
            };
        }
        match (&l, &r) {
            (Value::Int(a), Value::Int(b)) => int_op(op, a, b, span),
            (Value::Str(a), Value::Str(b)) => match op {
                BinaryOp::Add => Ok(Value::Str(format!("{a}{b}").into())),
                BinaryOp::Lt => Ok(Value::Bool(a < b)),
                BinaryOp::Le => Ok(Value::Bool(a <= b)),
                BinaryOp::Gt => Ok(Value::Bool(a > b)),
                BinaryOp::Ge => Ok(Value::Bool(a >= b)),
                _ => Err(operand_fault(op.symbol(), &l, span)),
            },
            (Value::Int(_), _) => Err(operand_fault(op.symbol(), &r, span)),
            _ => Err(operand_fault(op.symbol(), &l, span)),
        }
    }

    fn lookup(&mut self, name: &str, env: &Env, context: &Context, span: &SourceSpan) -> EvalOutcome {
        let mut segments = name.split('.');
        let first = segments.next().unwrap_or(name);
        let mut value = if first == "this" {
            match &context.this {
                Some(this) => Value::Object(this.clone()),
                None => {
                    return Err(RuntimeFault::new(
                        FaultKind::UnknownIdentifier,
                        "`this` has no object here",
                        span,
                    ))
                }
            }
        } else if let Some(v) = env.lookup(first) {
            v.clone()
        } else if let Some(v) = context.this.as_ref().and_then(|o| o.field(first)) {
            v.clone()
        } else if let Some(class) = context.class.clone().filter(|c| c.members.contains_key(first)) {
            self.member(&class, first, context, span)?
        } else if let Some(class) = self.constructors.get(first).cloned() {
            if class.fields.is_empty() {
                Value::Object(Rc::new(Object {
                    class,
                    fields: Vec::new(),
                }))
            } else {
                partial(Callable::Constructor(class), Vec::new())
            }
        } else if let Some(builtin) = Builtin::from_name(first) {
            partial(Callable::Builtin(builtin), Vec::new())
        } else if let Some(class) = self.classes.get(first).cloned() {
            // `Class.member` without a receiver.
            let Some(member) = segments.next() else {
                return Err(RuntimeFault::new(
                    FaultKind::UnknownIdentifier,
                    format!("class `{first}` is not a value"),
                    span,
                ));
            };
            let context = Context {
                class: Some(class.clone()),
                this: None,
            };
            self.member(&class, member, &context, span)?
        } else {
            return Err(RuntimeFault::new(
                FaultKind::UnknownIdentifier,
                format!("`{first}` is not defined"),
                span,
            ));
        };
        for segment in segments {
            value = self.project(&value, segment, span)?;
        }
        Ok(value)
    }

    /// `value.name`: a field, or a member evaluated with `value` as `this`.
    fn project(&mut self, value: &Value, name: &str, span: &SourceSpan) -> EvalOutcome {
        let Value::Object(object) = value else {
            return Err(RuntimeFault::new(
                FaultKind::UnknownIdentifier,
                format!("a {} has no member `{name}`", value.type_name()),
                span,
            ));
        };
        if let Some(v) = object.field(name) {
            return Ok(v.clone());
        }
        let context = Context {
            class: Some(object.class.clone()),
            this: Some(object.clone()),
        };
        self.member(&object.class, name, &context, span)
    }

    /// A member of `class`: constants are evaluated, functions become
    /// partial applications.
    fn member(&mut self, class: &Rc<ClassInfo>, name: &str, context: &Context, span: &SourceSpan) -> EvalOutcome {
        let Some(def) = class.members.get(name).cloned() else {
            return Err(RuntimeFault::new(
                FaultKind::UnknownIdentifier,
                format!("class `{}` has no member `{name}`", class.name),
                span,
            ));
        };
        if !def.params.is_empty() {
            return Ok(partial(
                Callable::Definition {
                    def,
                    context: context.clone(),
                },
                Vec::new(),
            ));
        }
        let Some(body) = &def.body else {
            return Err(RuntimeFault::new(
                FaultKind::UnknownIdentifier,
                format!("abstract member `{name}` has no value here"),
                span,
            ));
        };
        self.eval_call(body, &Env::new(), context, span)
    }

    fn apply_step(&mut self, f: Value, arg: Value, span: &SourceSpan) -> Result<Step, RuntimeFault> {
        match f {
            Value::Closure(c) => Ok(Step::Enter(
                c.body.clone(),
                c.env.bind(c.param.clone(), arg),
                c.context.clone(),
            )),
            Value::Partial(p) => {
                let mut args = p.args.clone();
                args.push(arg);
                if args.len() < p.callable.arity() {
                    return Ok(Step::Done(partial(p.callable.clone(), args)));
                }
                self.invoke(&p.callable, args, span)
            }
            other => Err(RuntimeFault::new(
                FaultKind::ArityFault,
                format!("a {} cannot be applied to an argument", other.type_name()),
                span,
            )),
        }
    }

    fn invoke(&mut self, callable: &Callable, args: Vec<Value>, span: &SourceSpan) -> Result<Step, RuntimeFault> {
        match callable {
            Callable::Constructor(class) => Ok(Step::Done(Value::Object(Rc::new(Object {
                class: class.clone(),
                fields: args,
            })))),
            Callable::Builtin(Builtin::Range) => Ok(Step::Done(range(&args[0], span)?)),
            Callable::Builtin(Builtin::Fold) => {
                let mut args = args.into_iter();
                let (seq, init, op) = (args.next().unwrap(), args.next().unwrap(), args.next().unwrap());
                Ok(Step::Done(self.fold(&seq, init, &op, span)?))
            }
            Callable::Definition { def, context } => {
                let Some(body) = &def.body else {
                    return Err(RuntimeFault::new(
                        FaultKind::UnknownIdentifier,
                        format!("abstract member `{}` has no implementation here", def.name),
                        span,
                    ));
                };
                let mut env = Env::new();
                for (param, value) in def.params.iter().zip(args) {
                    env = env.bind(param.name.as_str().into(), value);
                }
                Ok(Step::Enter(body.clone(), env, context.clone()))
            }
        }
    }

    /// Left fold, accumulator first: `op (acc) (element)`.
    fn fold(&mut self, seq: &Value, init: Value, op: &Value, span: &SourceSpan) -> EvalOutcome {
        let Value::Seq(items) = seq else {
            return Err(RuntimeFault::new(
                FaultKind::ArityFault,
                format!("fold expects a sequence, got a {}", seq.type_name()),
                span,
            ));
        };
        if !matches!(op, Value::Closure(_) | Value::Partial(_)) {
            return Err(RuntimeFault::new(
                FaultKind::ArityFault,
                format!("fold expects a function, got a {}", op.type_name()),
                span,
            ));
        }
        let mut acc = init;
        for item in items.iter() {
            let step = self.apply(op.clone(), acc, span)?;
            acc = self.apply(step, item.clone(), span)?;
        }
        Ok(acc)
    }
}

/// Result of applying a function: a value, or a body to evaluate next.
enum Step {
    Done(Value),
    Enter(Arc<Expr>, Env, Context),
}

fn partial(callable: Callable, args: Vec<Value>) -> Value {
    Value::Partial(Rc::new(Partial { callable, args }))
}

fn collect_members(
    program: &Program,
    class: &ClassDecl,
    members: &mut HashMap<String, Rc<Definition>>,
    visited: &mut HashSet<String>,
) {
    if !visited.insert(class.name.clone()) {
        return;
    }
    for d in class.all_definitions() {
        // A concrete inherited definition implements an abstract own one.
        match members.entry(d.name.clone()) {
            Entry::Vacant(v) => {
                v.insert(Rc::new(d.clone()));
            }
            Entry::Occupied(mut o) => {
                if o.get().body.is_none() && d.body.is_some() {
                    o.insert(Rc::new(d.clone()));
                }
            }
        }
    }
    for parent in &class.extends {
        let mut base = parent;
        while let TypeExpr::Applied { base: b, .. } = base {
            base = b;
        }
        if let TypeExpr::Named(name) = base {
            if let Some(parent) = program.class(name) {
                collect_members(program, parent, members, visited);
            }
        }
    }
}

pub fn match_pattern(pattern: &Pattern, value: &Value, bindings: &mut Vec<(String, Value)>) -> bool {
    match &pattern.kind {
        PatternKind::Wildcard => true,
        PatternKind::Var(name) => {
            bindings.push((name.clone(), value.clone()));
            true
        }
        PatternKind::Literal(lit) => match (lit, value) {
            (Literal::Int(a), Value::Int(b)) => a == b,
            (Literal::Bool(a), Value::Bool(b)) => a == b,
            (Literal::Str(a), Value::Str(b)) => a.as_str() == &**b,
            _ => false,
        },
        PatternKind::Constructor { name, args } => {
            let Value::Object(object) = value else { return false };
            let same = &*object.class.constructor == name || (args.is_empty() && &*object.class.name == name);
            same && object.fields.len() == args.len()
                && args
                    .iter()
                    .zip(object.fields.iter())
                    .all(|(p, v)| match_pattern(p, v, bindings))
        }
    }
}

fn operand_fault(op: &str, v: &Value, span: &SourceSpan) -> RuntimeFault {
    RuntimeFault::new(
        FaultKind::ArityFault,
        format!("`{op}` cannot take a {} operand", v.type_name()),
        span,
    )
}

fn int_op(op: BinaryOp, a: &BigInt, b: &BigInt, span: &SourceSpan) -> EvalOutcome {
    Ok(match op {
        BinaryOp::Add => Value::Int(a + b),
        BinaryOp::Sub => Value::Int(a - b),
        BinaryOp::Mul => Value::Int(a * b),
        BinaryOp::Div => {
            if b.is_zero() {
                return Err(RuntimeFault::new(FaultKind::DivisionByZero, "division by zero", span));
            }
            // BigInt division truncates toward zero.
            Value::Int(a / b)
        }
        BinaryOp::Lt => Value::Bool(a < b),
        BinaryOp::Le => Value::Bool(a <= b),
        BinaryOp::Gt => Value::Bool(a > b),
        BinaryOp::Ge => Value::Bool(a >= b),
        BinaryOp::Eq => Value::Bool(a == b),
        BinaryOp::And | BinaryOp::Or => unreachable!("handled lazily"),
    })
}

/// `range (n)`: the first `n` naturals; empty when `n ≤ 0`.
pub fn range(n: &Value, span: &SourceSpan) -> EvalOutcome {
    let Some(n) = n.as_int() else {
        return Err(RuntimeFault::new(
            FaultKind::ArityFault,
            format!("range expects an integer, got a {}", n.type_name()),
            span,
        ));
    };
    if !n.is_positive() {
        return Ok(Value::seq(Vec::new()));
    }
    let Some(n) = n.to_usize() else {
        return Err(RuntimeFault::new(
            FaultKind::ArityFault,
            "range argument is too large",
            span,
        ));
    };
    Ok(Value::seq((0..n).map(Value::int).collect()))
}
