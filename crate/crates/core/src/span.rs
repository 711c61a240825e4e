//! Source positions.

use std::fmt;

/// A region of source text.
///
/// Lines and columns are 1-based and counted in characters. `end_col` is
/// exclusive, so a one-character token at column 5 has `end_col == 6`.
/// `lo`/`hi` are the matching byte offsets into the source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file_id: u32,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub lo: u32,
    pub hi: u32,
}

impl SourceSpan {
    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        let (first, last) = if (self.lo, self.hi) <= (other.lo, other.hi) {
            (self, other)
        } else {
            (other, self)
        };
        let end = if last.hi >= first.hi { last } else { first };
        SourceSpan {
            file_id: self.file_id,
            start_line: first.start_line,
            start_col: first.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
            lo: first.lo,
            hi: end.hi,
        }
    }

    pub fn is_dummy(&self) -> bool {
        self.start_line == 0
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}
