use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::syntax::pretty::quote;
use crate::syntax::{Definition, Expr, SourceSpan};

/// Runtime value. Compound values are shared, never mutated.
#[derive(Debug, Clone)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Str(Rc<str>),
    Seq(Rc<Vec<Value>>),
    Closure(Rc<Closure>),
    Object(Rc<Object>),
    /// A builtin, definition or constructor with the arguments collected
    /// so far.
    Partial(Rc<Partial>),
}

#[derive(Debug)]
pub struct Closure {
    pub param: Rc<str>,
    pub body: Arc<Expr>,
    pub env: Env,
    pub context: Context,
}

#[derive(Debug)]
pub struct Object {
    pub class: Rc<ClassInfo>,
    /// In constructor parameter order.
    pub fields: Vec<Value>,
}

impl Object {
    pub fn field(&self, name: &str) -> Option<&Value> {
        let index = self.class.fields.iter().position(|f| &**f == name)?;
        self.fields.get(index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Range,
    Fold,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "range" => Some(Builtin::Range),
            "fold" => Some(Builtin::Fold),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Range => "range",
            Builtin::Fold => "fold",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Callable {
    Builtin(Builtin),
    Definition { def: Rc<Definition>, context: Context },
    Constructor(Rc<ClassInfo>),
}

impl Callable {
    pub fn arity(&self) -> usize {
        match self {
            Callable::Builtin(Builtin::Range) => 1,
            Callable::Builtin(Builtin::Fold) => 3,
            Callable::Definition { def, .. } => def.params.len(),
            Callable::Constructor(class) => class.fields.len(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Callable::Builtin(b) => b.name().to_string(),
            Callable::Definition { def, .. } => def.name.clone(),
            Callable::Constructor(class) => class.constructor.to_string(),
        }
    }
}

#[derive(Debug)]
pub struct Partial {
    pub callable: Callable,
    pub args: Vec<Value>,
}

/// A class as seen at run time.
#[derive(Debug)]
pub struct ClassInfo {
    pub name: Rc<str>,
    pub constructor: Rc<str>,
    pub fields: Vec<Rc<str>>,
    /// Own members first, then inherited ones not overridden.
    pub members: HashMap<String, Rc<Definition>>,
}

/// Class and receiver an expression is evaluated in.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub class: Option<Rc<ClassInfo>>,
    pub this: Option<Rc<Object>>,
}

/// Immutable chain of bindings; lookup is innermost first.
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Rc<Binding>>);

#[derive(Debug)]
struct Binding {
    name: Rc<str>,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&self, name: Rc<str>, value: Value) -> Env {
        Env(Some(Rc::new(Binding {
            name,
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut current = &self.0;
        while let Some(binding) = current {
            if &*binding.name == name {
                return Some(&binding.value);
            }
            current = &binding.next.0;
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultKind {
    DivisionByZero,
    NoMatchingCase,
    UnknownIdentifier,
    ArityFault,
    RecursionLimit,
}

impl FaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::DivisionByZero => "division_by_zero",
            FaultKind::NoMatchingCase => "no_matching_case",
            FaultKind::UnknownIdentifier => "unknown_identifier",
            FaultKind::ArityFault => "arity_fault",
            FaultKind::RecursionLimit => "recursion_limit",
        }
    }
}

/// A failed evaluation, returned as a value rather than unwound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeFault {
    pub kind: FaultKind,
    pub message: String,
    pub span: SourceSpan,
}

impl RuntimeFault {
    pub fn new(kind: FaultKind, message: impl Into<String>, span: &SourceSpan) -> Self {
        Self {
            kind,
            message: message.into(),
            span: span.clone(),
        }
    }
}

impl fmt::Display for RuntimeFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: runtime fault[{}]: {}",
            self.span,
            self.kind.as_str(),
            self.message
        )
    }
}

pub type EvalOutcome = Result<Value, RuntimeFault>;

impl Value {
    pub fn int(v: impl Into<BigInt>) -> Value {
        Value::Int(v.into())
    }

    pub fn str(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn seq(items: Vec<Value>) -> Value {
        Value::Seq(Rc::new(items))
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Seq(_) => "sequence",
            Value::Closure(_) | Value::Partial(_) => "function",
            Value::Object(_) => "object",
        }
    }

    /// Structural equality; `None` when either side is a function.
    pub fn structural_eq(&self, other: &Value) -> Option<bool> {
        Some(match (self, other) {
            (Value::Closure(_) | Value::Partial(_), _) | (_, Value::Closure(_) | Value::Partial(_)) => return None,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Seq(a), Value::Seq(b)) => {
                if a.len() != b.len() {
                    return Some(false);
                }
                for (x, y) in a.iter().zip(b.iter()) {
                    if !x.structural_eq(y)? {
                        return Some(false);
                    }
                }
                true
            }
            (Value::Object(a), Value::Object(b)) => {
                if a.class.constructor != b.class.constructor {
                    return Some(false);
                }
                for (x, y) in a.fields.iter().zip(b.fields.iter()) {
                    if !x.structural_eq(y)? {
                        return Some(false);
                    }
                }
                true
            }
            _ => false,
        })
    }
}

/// Equality for tests and oracles: structural, functions never equal.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        self.structural_eq(other).unwrap_or(false)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => f.write_str(&quote(s)),
            Value::Seq(items) => {
                f.write_str("Seq (")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            Value::Object(o) => {
                f.write_str(&o.class.constructor)?;
                for field in &o.fields {
                    write!(f, " ({field})")?;
                }
                Ok(())
            }
            Value::Closure(c) => write!(f, "<lambda {}>", c.param),
            Value::Partial(p) => write!(f, "<function {}>", p.callable.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_lookup_is_innermost_first() {
        let env = Env::new()
            .bind("x".into(), Value::int(1))
            .bind("x".into(), Value::int(2));
        assert_eq!(env.lookup("x"), Some(&Value::int(2)));
        assert_eq!(env.lookup("y"), None);
    }

    #[test]
    fn display() {
        let v = Value::seq(vec![Value::int(1), Value::str("a\"b"), Value::Bool(true)]);
        assert_eq!(v.to_string(), "Seq (1, \"a\\\"b\", true)");
    }

    #[test]
    fn sequences_compare_structurally() {
        let a = Value::seq(vec![Value::int(1), Value::int(2)]);
        assert_eq!(
            a.structural_eq(&Value::seq(vec![Value::int(1), Value::int(2)])),
            Some(true)
        );
        assert_eq!(a.structural_eq(&Value::seq(vec![Value::int(1)])), Some(false));
        assert_eq!(Value::int(1).structural_eq(&Value::Bool(true)), Some(false));
    }
}
