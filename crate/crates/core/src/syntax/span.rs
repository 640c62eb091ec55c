use std::fmt;
use std::sync::Arc;

/// A region of a source file. Lines and columns are 1-based; columns count
/// characters, and `col_end` is the column just past the last character.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line_start: u32,
    pub col_start: u32,
    pub line_end: u32,
    pub col_end: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, line_start: u32, col_start: u32, line_end: u32, col_end: u32) -> Self {
        debug_assert!(line_start >= 1 && col_start >= 1);
        debug_assert!(
            line_start < line_end || (line_start == line_end && col_start <= col_end),
            "inverted span"
        );
        Self {
            file,
            line_start,
            col_start,
            line_end,
            col_end,
        }
    }

    /// A zero-width span at `line:col`.
    pub fn point(file: Arc<str>, line: u32, col: u32) -> Self {
        Self::new(file, line, col, line, col)
    }

    /// Placeholder span for synthesized nodes.
    pub fn synthetic() -> Self {
        Self::point(Arc::from(""), 1, 1)
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        let (line_start, col_start) = (self.line_start, self.col_start).min((other.line_start, other.col_start));
        let (line_end, col_end) = (self.line_end, self.col_end).max((other.line_end, other.col_end));
        SourceSpan {
            file: self.file.clone(),
            line_start,
            col_start,
            line_end,
            col_end,
        }
    }

    pub fn contains(&self, inner: &SourceSpan) -> bool {
        (self.line_start, self.col_start) <= (inner.line_start, inner.col_start)
            && (inner.line_end, inner.col_end) <= (self.line_end, self.col_end)
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        Self::synthetic()
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line_start, self.col_start)
    }
}
