//! Toolchain for the Soda specification language.
//!
//! The pipeline is [`lexer::tokenize`] → [`parser::parse_program`] →
//! [`analyzer::analyze`], after which an analyzed program can be translated
//! with [`backend::scala`] or [`backend::lean`], or executed with the
//! reference [`interpreter`].

pub mod analyzer;
pub mod backend;
pub mod interpreter;
pub mod lexer;
pub mod parser;
pub mod syntax;

pub use analyzer::{analyze, AnalyzedProgram};
pub use syntax::{Diagnostic, Program, SourceSpan};

/// Lexes and parses `source`, returning the program (absent on errors)
/// together with all lexer and parser diagnostics.
pub fn parse_source(source: &str, file_name: &str) -> parser::ParseResult {
    parser::parse_program(&lexer::tokenize(source, file_name))
}
