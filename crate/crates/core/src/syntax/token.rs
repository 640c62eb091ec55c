use std::fmt;

use super::span::SourceSpan;

pub const RESERVED_WORDS: [&str; 21] = [
    "lambda",
    "if",
    "then",
    "else",
    "match",
    "case",
    "class",
    "extends",
    "end",
    "abstract",
    "this",
    "subtype",
    "supertype",
    "package",
    "import",
    "directive",
    "not",
    "and",
    "or",
    "true",
    "false",
];

/// Operator symbols, longest first so that greedy matching picks `-->`
/// before `-` and `:=` before `:`.
pub const OPERATORS: [&str; 16] = [
    "-->", "==>", ":=", "<:", ">:", "==", "<=", ">=", ":", "=", "+", "-", "*", "/", "<", ">",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    IntegerLiteral,
    StringLiteral,
    ReservedWord,
    OperatorSymbol,
    Annotation,
    OpenParen,
    CloseParen,
    OpenBracket,
    CloseBracket,
    Newline,
    Indent,
    Dedent,
    Comment,
    /// One verbatim line inside a `directive` block.
    DirectiveLine,
    EndOfInput,
}

impl TokenKind {
    /// Layout and comment tokens, which carry no expression content.
    pub fn is_trivia(self) -> bool {
        matches!(
            self,
            TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent | TokenKind::Comment
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenKind::Identifier => "identifier",
            TokenKind::IntegerLiteral => "integer literal",
            TokenKind::StringLiteral => "string literal",
            TokenKind::ReservedWord => "reserved word",
            TokenKind::OperatorSymbol => "operator",
            TokenKind::Annotation => "annotation",
            TokenKind::OpenParen => "`(`",
            TokenKind::CloseParen => "`)`",
            TokenKind::OpenBracket => "`[`",
            TokenKind::CloseBracket => "`]`",
            TokenKind::Newline => "end of line",
            TokenKind::Indent => "indentation",
            TokenKind::Dedent => "end of block",
            TokenKind::Comment => "comment",
            TokenKind::DirectiveLine => "directive line",
            TokenKind::EndOfInput => "end of input",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Verbatim lexeme; empty for indent, dedent and end of input.
    pub text: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_word(&self, word: &str) -> bool {
        self.is(TokenKind::ReservedWord, word)
    }

    pub fn is_op(&self, op: &str) -> bool {
        self.is(TokenKind::OperatorSymbol, op)
    }

    /// Human-readable description for diagnostics.
    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Identifier
            | TokenKind::IntegerLiteral
            | TokenKind::ReservedWord
            | TokenKind::OperatorSymbol
            | TokenKind::Annotation => format!("`{}`", self.text),
            _ => self.kind.to_string(),
        }
    }
}
