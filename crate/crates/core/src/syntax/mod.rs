//! Syntax tree, tokens, source spans, diagnostics and the canonical printer
//! shared by every stage of the toolchain.

pub mod ast;
pub mod diagnostic;
pub mod pretty;
pub mod span;
pub mod token;

pub use ast::*;
pub use diagnostic::{has_errors, Code, Diagnostic, Severity};
pub use pretty::pretty_print;
pub use span::SourceSpan;
pub use token::{Token, TokenKind};
