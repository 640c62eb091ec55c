//! Tokenizer with offside-rule layout.
//!
//! Besides ordinary tokens the lexer emits `Newline` at the end of every
//! line outside parentheses and brackets, and `Indent`/`Dedent` when the
//! indentation of a code line changes. Blank and comment-only lines do not
//! affect layout. Lines more indented than a `directive <target>` line are
//! emitted verbatim as `DirectiveLine` tokens.

use std::sync::Arc;

use crate::syntax::token::{is_reserved, OPERATORS};
use crate::syntax::{Code, Diagnostic, SourceSpan, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexResult {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn tokenize(source: &str, file_name: &str) -> LexResult {
    let mut lexer = Lexer {
        file: Arc::from(file_name),
        tokens: Vec::new(),
        diagnostics: Vec::new(),
        indents: vec![0],
        depth: 0,
        directive: None,
    };
    let mut lines = source.split('\n').peekable();
    let mut line_no = 0u32;
    let mut last_len = 0;
    while let Some(line) = lines.next() {
        line_no += 1;
        let has_newline = lines.peek().is_some();
        let line = line.strip_suffix('\r').unwrap_or(line);
        let chars: Vec<char> = line.chars().collect();
        last_len = chars.len();
        lexer.line(line_no, &chars, has_newline);
    }
    lexer.finish(line_no, last_len as u32 + 1);
    LexResult {
        tokens: lexer.tokens,
        diagnostics: lexer.diagnostics,
    }
}

struct RawBlock {
    /// Column (0-based) of the `directive` keyword.
    column: usize,
    /// Blank lines seen since the last raw line; they belong to the block
    /// only if another raw line follows.
    pending_blank: Vec<(u32, bool)>,
}

struct Lexer {
    file: Arc<str>,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
    indents: Vec<usize>,
    depth: usize,
    directive: Option<RawBlock>,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

impl Lexer {
    fn span(&self, line: u32, start: usize, end: usize) -> SourceSpan {
        SourceSpan::new(self.file.clone(), line, start as u32 + 1, line, end as u32 + 1)
    }

    fn push(&mut self, kind: TokenKind, text: impl Into<String>, span: SourceSpan) {
        self.tokens.push(Token {
            kind,
            text: text.into(),
            span,
        });
    }

    fn error(&mut self, code: Code, message: impl Into<String>, span: SourceSpan) {
        self.diagnostics.push(Diagnostic::new(code, message, span));
    }

    fn newline(&mut self, line: u32, len: usize) {
        let span = self.span(line, len, len + 1);
        self.push(TokenKind::Newline, "\n", span);
    }

    /// Leading-space count; reports tabs inside the indentation.
    fn indentation(&mut self, line: u32, chars: &[char]) -> usize {
        let mut width = 0;
        for (i, &c) in chars.iter().enumerate() {
            match c {
                ' ' => width += 1,
                '\t' => {
                    let span = self.span(line, i, i + 1);
                    self.error(Code::TabInIndentation, "tab character in indentation", span);
                    width += 1;
                }
                _ => break,
            }
        }
        width
    }

    fn line(&mut self, line: u32, chars: &[char], has_newline: bool) {
        let blank = chars.iter().all(|c| c.is_whitespace());

        if let Some(block) = &mut self.directive {
            if blank {
                block.pending_blank.push((line, has_newline));
                return;
            }
            let column = block.column;
            let indent = chars.iter().take_while(|c| c.is_whitespace()).count();
            if indent > column {
                let pending = std::mem::take(&mut block.pending_blank);
                for (blank_line, nl) in pending {
                    let span = self.span(blank_line, 0, 0);
                    self.push(TokenKind::DirectiveLine, "", span);
                    if nl {
                        self.newline(blank_line, 0);
                    }
                }
                let indent = self.indentation(line, chars);
                let text: String = chars[indent..].iter().collect();
                let span = self.span(line, indent, chars.len());
                self.push(TokenKind::DirectiveLine, text, span);
                if has_newline {
                    self.newline(line, chars.len());
                }
                return;
            }
            self.close_directive();
        }

        let starts_logical_line = self.depth == 0;
        let mut pos = 0;
        if starts_logical_line {
            let indent = self.indentation(line, chars);
            pos = indent;
            let comment_only = chars[indent..].starts_with(&['/', '/']);
            if !blank && !comment_only {
                self.layout(line, indent);
            }
        }
        let code_start = self.tokens.len();
        self.scan(line, chars, pos);

        if starts_logical_line {
            let line_tokens: Vec<&Token> = self.tokens[code_start..]
                .iter()
                .filter(|t| t.kind != TokenKind::Comment)
                .collect();
            if line_tokens.len() == 2
                && line_tokens[0].is_word("directive")
                && line_tokens[1].kind == TokenKind::Identifier
            {
                let column = line_tokens[0].span.col_start as usize - 1;
                self.directive = Some(RawBlock {
                    column,
                    pending_blank: Vec::new(),
                });
            }
        }
        if has_newline && self.depth == 0 {
            self.newline(line, chars.len());
        }
    }

    fn close_directive(&mut self) {
        if let Some(block) = self.directive.take() {
            for (line, nl) in block.pending_blank {
                if nl {
                    self.newline(line, 0);
                }
            }
        }
    }

    fn layout(&mut self, line: u32, indent: usize) {
        let span = self.span(line, indent, indent);
        let top = *self.indents.last().unwrap();
        if indent > top {
            self.indents.push(indent);
            self.push(TokenKind::Indent, "", span);
            return;
        }
        while indent < *self.indents.last().unwrap() {
            self.indents.pop();
            self.push(TokenKind::Dedent, "", span.clone());
        }
        if indent > *self.indents.last().unwrap() {
            self.indents.push(indent);
            self.push(TokenKind::Indent, "", span);
        }
    }

    fn scan(&mut self, line: u32, chars: &[char], mut pos: usize) {
        while pos < chars.len() {
            let c = chars[pos];
            let start = pos;
            if c.is_whitespace() {
                pos += 1;
                continue;
            }
            if c == '/' && chars.get(pos + 1) == Some(&'/') {
                let text: String = chars[pos..].iter().collect();
                let span = self.span(line, pos, chars.len());
                self.push(TokenKind::Comment, text, span);
                return;
            }
            if c == '"' {
                pos = self.string(line, chars, pos);
                continue;
            }
            if c.is_ascii_digit() {
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                let text: String = chars[start..pos].iter().collect();
                let span = self.span(line, start, pos);
                self.push(TokenKind::IntegerLiteral, text, span);
                continue;
            }
            if is_ident_start(c) {
                pos = self.word(line, chars, pos);
                continue;
            }
            if c == '@' && chars.get(pos + 1).is_some_and(|&n| is_ident_start(n)) {
                pos += 1;
                while pos < chars.len() && is_ident_continue(chars[pos]) {
                    pos += 1;
                }
                let text: String = chars[start..pos].iter().collect();
                let span = self.span(line, start, pos);
                self.push(TokenKind::Annotation, text, span);
                continue;
            }
            let bracket = match c {
                '(' => Some(TokenKind::OpenParen),
                ')' => Some(TokenKind::CloseParen),
                '[' => Some(TokenKind::OpenBracket),
                ']' => Some(TokenKind::CloseBracket),
                _ => None,
            };
            if let Some(kind) = bracket {
                match kind {
                    TokenKind::OpenParen | TokenKind::OpenBracket => self.depth += 1,
                    _ => self.depth = self.depth.saturating_sub(1),
                }
                let span = self.span(line, pos, pos + 1);
                self.push(kind, c.to_string(), span);
                pos += 1;
                continue;
            }
            if let Some(op) = OPERATORS
                .iter()
                .find(|op| op.chars().enumerate().all(|(i, oc)| chars.get(pos + i) == Some(&oc)))
            {
                let len = op.chars().count();
                let span = self.span(line, pos, pos + len);
                self.push(TokenKind::OperatorSymbol, *op, span);
                pos += len;
                continue;
            }
            let span = self.span(line, pos, pos + 1);
            self.error(Code::IllegalCharacter, format!("illegal character `{c}`"), span);
            pos += 1;
        }
    }

    /// Identifier (possibly dotted, `p.fst`) or reserved word.
    fn word(&mut self, line: u32, chars: &[char], start: usize) -> usize {
        let segment_end = |mut p: usize| {
            while p < chars.len() && is_ident_continue(chars[p]) {
                p += 1;
            }
            p
        };
        let mut pos = segment_end(start + 1);
        let first: String = chars[start..pos].iter().collect();
        if !is_reserved(&first) || first == "this" {
            while chars.get(pos) == Some(&'.') && chars.get(pos + 1).is_some_and(|&c| is_ident_start(c)) {
                pos = segment_end(pos + 2);
            }
        }
        let text: String = chars[start..pos].iter().collect();
        let kind = if is_reserved(&text) {
            TokenKind::ReservedWord
        } else {
            TokenKind::Identifier
        };
        let span = self.span(line, start, pos);
        self.push(kind, text, span);
        pos
    }

    fn string(&mut self, line: u32, chars: &[char], start: usize) -> usize {
        let mut pos = start + 1;
        while pos < chars.len() {
            match chars[pos] {
                '\\' if matches!(chars.get(pos + 1), Some('"') | Some('\\')) => pos += 2,
                '"' => {
                    let text: String = chars[start..=pos].iter().collect();
                    let span = self.span(line, start, pos + 1);
                    self.push(TokenKind::StringLiteral, text, span);
                    return pos + 1;
                }
                _ => pos += 1,
            }
        }
        let span = self.span(line, start, chars.len());
        self.error(Code::UnterminatedString, "unterminated string literal", span);
        chars.len()
    }

    fn finish(&mut self, line: u32, col: u32) {
        self.close_directive();
        let span = SourceSpan::point(self.file.clone(), line, col);
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(TokenKind::Dedent, "", span.clone());
        }
        self.push(TokenKind::EndOfInput, "", span);
    }
}

/// Decodes the body of a string literal lexeme (quotes included).
pub fn unescape_string(lexeme: &str) -> String {
    let inner = &lexeme[1..lexeme.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(e @ ('"' | '\\')) => out.push(e),
                Some(other) => {
                    out.push('\\');
                    out.push(other);
                }
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_and_text(source: &str) -> Vec<(TokenKind, String)> {
        tokenize(source, "t.soda")
            .tokens
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    fn significant(source: &str) -> Vec<(TokenKind, String)> {
        kinds_and_text(source)
            .into_iter()
            .filter(|(k, _)| !k.is_trivia() && *k != TokenKind::EndOfInput)
            .collect()
    }

    use TokenKind::*;

    fn t(kind: TokenKind, text: &str) -> (TokenKind, String) {
        (kind, text.to_string())
    }

    #[test]
    fn named_argument_call() {
        assert_eq!(
            significant("f (x := 0) (y := 1)"),
            vec![
                t(Identifier, "f"),
                t(OpenParen, "("),
                t(Identifier, "x"),
                t(OperatorSymbol, ":="),
                t(IntegerLiteral, "0"),
                t(CloseParen, ")"),
                t(OpenParen, "("),
                t(Identifier, "y"),
                t(OperatorSymbol, ":="),
                t(IntegerLiteral, "1"),
                t(CloseParen, ")"),
            ]
        );
    }

    #[test]
    fn empty_input_is_just_end_of_input() {
        let r = tokenize("", "t.soda");
        assert!(r.diagnostics.is_empty());
        assert_eq!(r.tokens.len(), 1);
        assert_eq!(r.tokens[0].kind, EndOfInput);
    }

    #[test]
    fn lambda_arrow() {
        // Hand-tokenized against the token table.
        assert_eq!(
            significant("lambda x --> x + 1"),
            vec![
                t(ReservedWord, "lambda"),
                t(Identifier, "x"),
                t(OperatorSymbol, "-->"),
                t(Identifier, "x"),
                t(OperatorSymbol, "+"),
                t(IntegerLiteral, "1"),
            ]
        );
    }

    #[test]
    fn longest_operator_wins() {
        let ops: Vec<String> = significant("a ==> b == c <: d < e <= f >: g := h : i = j")
            .into_iter()
            .filter(|(k, _)| *k == OperatorSymbol)
            .map(|(_, s)| s)
            .collect();
        assert_eq!(ops, ["==>", "==", "<:", "<", "<=", ">:", ":=", ":", "="]);
    }

    #[test]
    fn reserved_words_and_annotations() {
        assert_eq!(
            significant("@tailrec if true then this else false"),
            vec![
                t(Annotation, "@tailrec"),
                t(ReservedWord, "if"),
                t(ReservedWord, "true"),
                t(ReservedWord, "then"),
                t(ReservedWord, "this"),
                t(ReservedWord, "else"),
                t(ReservedWord, "false"),
            ]
        );
    }

    #[test]
    fn dotted_names() {
        assert_eq!(
            significant("package soda.example p.fst this.x"),
            vec![
                t(ReservedWord, "package"),
                t(Identifier, "soda.example"),
                t(Identifier, "p.fst"),
                t(Identifier, "this.x"),
            ]
        );
    }

    #[test]
    fn layout_tokens() {
        let src = "class A\n  f = 1\n  g =\n    2\nend\n";
        let layout: Vec<TokenKind> = kinds_and_text(src)
            .into_iter()
            .map(|(k, _)| k)
            .filter(|k| matches!(k, Indent | Dedent | Newline))
            .collect();
        assert_eq!(
            layout,
            vec![Newline, Indent, Newline, Newline, Indent, Newline, Dedent, Dedent, Newline]
        );
    }

    #[test]
    fn blank_and_comment_lines_do_not_affect_layout() {
        let src = "class A\n\n// note\n  f = 1\n      // deep\n  g = 2\nend";
        let indents = kinds_and_text(src).iter().filter(|(k, _)| *k == Indent).count();
        let dedents = kinds_and_text(src).iter().filter(|(k, _)| *k == Dedent).count();
        assert_eq!((indents, dedents), (1, 1));
    }

    #[test]
    fn newlines_inside_parentheses_are_whitespace() {
        let toks = kinds_and_text("f (a\n      b)\n");
        assert_eq!(toks.iter().filter(|(k, _)| *k == Newline).count(), 1);
        assert!(!toks.iter().any(|(k, _)| *k == Indent));
    }

    #[test]
    fn dedents_closed_at_end_of_input() {
        let toks = kinds_and_text("a\n  b\n    c");
        let indents = toks.iter().filter(|(k, _)| *k == Indent).count();
        let dedents = toks.iter().filter(|(k, _)| *k == Dedent).count();
        assert_eq!((indents, dedents), (2, 2));
        assert_eq!(toks.last().unwrap().0, EndOfInput);
    }

    #[test]
    fn string_escapes() {
        let toks = significant(r#"s = "a \"q\" \\ b""#);
        assert_eq!(toks[2], t(StringLiteral, r#""a \"q\" \\ b""#));
        assert_eq!(unescape_string(&toks[2].1), r#"a "q" \ b"#);
    }

    #[test]
    fn unterminated_string() {
        let r = tokenize("s = \"abc\nt = 1", "t.soda");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].code, Code::UnterminatedString);
        assert_eq!(
            (r.diagnostics[0].span.line_start, r.diagnostics[0].span.col_start),
            (1, 5)
        );
        // Lexing continues on the next line.
        assert!(r.tokens.iter().any(|t| t.text == "t"));
    }

    #[test]
    fn illegal_character() {
        let r = tokenize("a $ b", "t.soda");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].code, Code::IllegalCharacter);
        assert_eq!(r.diagnostics[0].span.col_start, 3);
    }

    #[test]
    fn tab_in_indentation() {
        let r = tokenize("class A\n\tf = 1\nend", "t.soda");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].code, Code::TabInIndentation);
        assert_eq!(r.diagnostics[0].span.line_start, 2);
    }

    #[test]
    fn directive_lines_are_verbatim() {
        let src = "directive lean\n  theorem t : 1 + 1 = 2 := by rfl\n\n    -- nested, {x}\nclass A\n\nend\n";
        let r = tokenize(src, "t.soda");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let raw: Vec<&str> = r
            .tokens
            .iter()
            .filter(|t| t.kind == DirectiveLine)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(raw, ["theorem t : 1 + 1 = 2 := by rfl", "", "-- nested, {x}"]);
        assert!(r.tokens.iter().any(|t| t.is_word("class")));
    }

    #[test]
    fn trailing_blank_lines_leave_directive_block() {
        let src = "directive scala\n  val x = 1\n\n\nclass A\n\nend";
        let r = tokenize(src, "t.soda");
        let raw = r.tokens.iter().filter(|t| t.kind == DirectiveLine).count();
        assert_eq!(raw, 1);
    }
}
