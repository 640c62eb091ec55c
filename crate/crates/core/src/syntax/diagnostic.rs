//! Diagnostics and the registry of diagnostic codes.
//!
//! | code        | severity | meaning                                              |
//! |-------------|----------|------------------------------------------------------|
//! | E-LEX-001   | error    | unterminated string literal                          |
//! | E-LEX-002   | error    | illegal character                                    |
//! | E-LEX-003   | error    | tab in indentation                                   |
//! | E-PAR-001   | error    | unexpected token                                     |
//! | E-PAR-002   | error    | class is missing its `end`                           |
//! | E-PAR-003   | error    | `package` is not the first declaration               |
//! | E-PAR-004   | error    | class name ends with `_` (reserved for constructors) |
//! | E-PAR-010   | error    | `if`/`then` without `else`                           |
//! | E-PAR-011   | error    | `match` without any `case`                           |
//! | E-PAR-012   | error    | pattern is not a constructor, literal or variable    |
//! | E-PAR-013   | error    | named and positional arguments mixed in one call     |
//! | E-SEM-001   | error    | duplicate definition                                 |
//! | E-SEM-002   | error    | duplicate parameter name                             |
//! | E-SEM-010   | error    | `@tailrec` function calls itself in non-tail position|
//! | E-SEM-020   | error    | unknown parameter name in named argument             |
//! | E-SEM-021   | error    | repeated parameter name in named arguments           |
//! | E-SEM-022   | error    | missing parameter in named arguments                 |
//! | W-SEM-023   | warning  | named-argument target signature unknown              |
//! | E-SEM-030   | error    | `this` used outside a class                          |
//! | W-SEM-040   | warning  | undeclared identifier                                |
//! | E-LEAN-001  | error    | construct not supported by the Lean translation      |
//! | E-IO-001    | error    | file could not be read or written                    |

use std::fmt;

use super::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    UnterminatedString,
    IllegalCharacter,
    TabInIndentation,
    UnexpectedToken,
    MissingEnd,
    PackageNotFirst,
    ConstructorStyleClassName,
    MissingElse,
    EmptyMatch,
    InvalidPattern,
    MixedArguments,
    DuplicateDefinition,
    DuplicateParameter,
    NonTailSelfCall,
    UnknownParameter,
    RepeatedParameter,
    MissingParameter,
    UnknownCallTarget,
    ThisOutsideClass,
    UndeclaredIdentifier,
    LeanUnsupported,
    Io,
}

impl Code {
    pub const ALL: [Code; 22] = [
        Code::UnterminatedString,
        Code::IllegalCharacter,
        Code::TabInIndentation,
        Code::UnexpectedToken,
        Code::MissingEnd,
        Code::PackageNotFirst,
        Code::ConstructorStyleClassName,
        Code::MissingElse,
        Code::EmptyMatch,
        Code::InvalidPattern,
        Code::MixedArguments,
        Code::DuplicateDefinition,
        Code::DuplicateParameter,
        Code::NonTailSelfCall,
        Code::UnknownParameter,
        Code::RepeatedParameter,
        Code::MissingParameter,
        Code::UnknownCallTarget,
        Code::ThisOutsideClass,
        Code::UndeclaredIdentifier,
        Code::LeanUnsupported,
        Code::Io,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::UnterminatedString => "E-LEX-001",
            Code::IllegalCharacter => "E-LEX-002",
            Code::TabInIndentation => "E-LEX-003",
            Code::UnexpectedToken => "E-PAR-001",
            Code::MissingEnd => "E-PAR-002",
            Code::PackageNotFirst => "E-PAR-003",
            Code::ConstructorStyleClassName => "E-PAR-004",
            Code::MissingElse => "E-PAR-010",
            Code::EmptyMatch => "E-PAR-011",
            Code::InvalidPattern => "E-PAR-012",
            Code::MixedArguments => "E-PAR-013",
            Code::DuplicateDefinition => "E-SEM-001",
            Code::DuplicateParameter => "E-SEM-002",
            Code::NonTailSelfCall => "E-SEM-010",
            Code::UnknownParameter => "E-SEM-020",
            Code::RepeatedParameter => "E-SEM-021",
            Code::MissingParameter => "E-SEM-022",
            Code::UnknownCallTarget => "W-SEM-023",
            Code::ThisOutsideClass => "E-SEM-030",
            Code::UndeclaredIdentifier => "W-SEM-040",
            Code::LeanUnsupported => "E-LEAN-001",
            Code::Io => "E-IO-001",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::UnknownCallTarget | Code::UndeclaredIdentifier => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    /// Builds a diagnostic whose severity is the one registered for `code`.
    pub fn new(code: Code, message: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `file:line:col: severity[code]: message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}]: {}",
            self.span.file, self.span.line_start, self.span.col_start, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn codes_are_unique_and_prefixed_by_severity() {
        let mut seen = HashSet::new();
        for code in Code::ALL {
            assert!(seen.insert(code.as_str()), "duplicate {code}");
            let expected = match code.severity() {
                Severity::Error => 'E',
                Severity::Warning => 'W',
            };
            assert!(code.as_str().starts_with(expected));
        }
    }

    #[test]
    fn display_format() {
        let d = Diagnostic::new(
            Code::LeanUnsupported,
            "`this` is not supported",
            SourceSpan::new("x.soda".into(), 3, 7, 3, 11),
        );
        assert_eq!(d.to_string(), "x.soda:3:7: error[E-LEAN-001]: `this` is not supported");
    }
}
