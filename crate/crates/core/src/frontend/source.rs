use std::fmt;

/// Byte range plus 1-based start position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(lo: u32, hi: u32, line: u32, col: u32) -> Self {
        Span { lo, hi, line, col }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if other.lo < self.lo {
            return other.to(self);
        }
        Span { lo: self.lo, hi: self.hi.max(other.hi), line: self.line, col: self.col }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Project-relative path with `/` separators.
    pub path: String,
    pub text: String,
    line_index: Vec<u32>,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_index = vec![0];
        line_index.extend(text.match_indices('\n').map(|(i, _)| i as u32 + 1));
        SourceFile { path: path.into(), text, line_index }
    }

    pub fn line_index(&self) -> &[u32] {
        &self.line_index
    }

    /// 1-based (line, col) of a byte offset. Columns count chars.
    pub fn position(&self, offset: u32) -> (u32, u32) {
        let line = match self.line_index.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_index[line] as usize;
        let end = (offset as usize).min(self.text.len());
        let col = self.text[start..end].chars().count() as u32 + 1;
        (line as u32 + 1, col)
    }

    /// `(startLine, startCol, endLine, endCol)` of a span.
    pub fn span_range(&self, span: Span) -> (u32, u32, u32, u32) {
        let (el, ec) = self.position(span.hi);
        (span.line, span.col, el, ec)
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.lo as usize..span.hi as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_index_starts_at_zero_and_increases() {
        let f = SourceFile::new("a.ets", "ab\ncd\n\nx");
        assert_eq!(f.line_index(), &[0, 3, 6, 7]);
        assert_eq!(f.position(4), (2, 2));
        assert_eq!(f.position(7), (4, 1));
    }
}
