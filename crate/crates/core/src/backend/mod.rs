//! Translation of analyzed programs to target-language source text.

pub mod lean;
pub mod scala;

use crate::syntax::{Expr, ExprKind, SourceSpan};

/// Pairs of source span and the 1-based output line its translation
/// starts on, in output order.
pub type SourceMap = Vec<(SourceSpan, usize)>;

/// Accumulates output text and the source map alongside it.
#[derive(Debug, Default)]
struct Output {
    text: String,
    map: SourceMap,
}

impl Output {
    fn line_number(&self) -> usize {
        self.text.matches('\n').count() + 1
    }

    fn mark(&mut self, span: &SourceSpan) {
        let line = self.line_number();
        self.map.push((span.clone(), line));
    }

    fn push(&mut self, text: &str) {
        self.text.push_str(text);
    }

    /// Writes `text` as lines at `indent`, leaving empty lines empty.
    fn lines(&mut self, indent: usize, text: &str) {
        for line in text.lines() {
            if !line.is_empty() {
                self.text.push_str(&" ".repeat(indent));
                self.text.push_str(line);
            }
            self.text.push('\n');
        }
    }

    /// Starts a new blank-line separated chunk unless at the beginning.
    fn separate(&mut self) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
    }
}

/// Expressions rendered without surrounding parentheses in any position.
fn is_atomic(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Int(v) => v.sign() != num_bigint::Sign::Minus,
        ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Ident(_) | ExprKind::SelfRef => true,
        _ => false,
    }
}

/// Indents every line after the first by `indent` spaces.
fn indent_tail(text: &str, indent: usize) -> String {
    text.replace('\n', &format!("\n{}", " ".repeat(indent)))
}
