//! Diagnostics shared by every pipeline stage, and their text/JSON rendering.

use std::fmt::Write as _;

use serde_json::json;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// Stable diagnostic codes.
pub mod codes {
    pub const IMMUT_ASSIGN: &str = "E-IMMUT-ASSIGN";
    pub const BORROWED_USE: &str = "E-BORROWED-USE";
    pub const MOVED_USE: &str = "E-MOVED-USE";
    pub const MUTREF_IMMUT: &str = "E-MUTREF-IMMUT";
    pub const ALIAS: &str = "E-ALIAS";
    pub const REF_MISMATCH: &str = "E-REF-MISMATCH";
    pub const REF_OPERAND: &str = "E-REF-OPERAND";
    pub const UNUSED_MUT: &str = "W-UNUSED-MUT";
    pub const LEX: &str = "E-LEX";
    pub const PARSE: &str = "E-PARSE";
    pub const MACRO: &str = "E-MACRO";
    pub const RUNTIME: &str = "E-RUNTIME";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: SourceSpan,
    pub note: Option<(SourceSpan, String)>,
}

impl Diagnostic {
    pub fn error(code: &'static str, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
            note: None,
        }
    }

    pub fn warning(code: &'static str, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, span, message)
        }
    }

    pub fn with_note(mut self, span: SourceSpan, note: impl Into<String>) -> Self {
        self.note = Some((span, note.into()));
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// Sorts diagnostics by position, keeping emission order for ties.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by_key(|d| (d.span.file_id, d.span.start_line, d.span.start_col));
}

fn source_line(source: &str, line: u32) -> Option<&str> {
    source.lines().nth(line.checked_sub(1)? as usize)
}

/// Renders diagnostics as `file:line:col: severity[CODE]: message`, each
/// followed by the offending source line and a caret underline.
pub fn render_text(diags: &[Diagnostic], source: &str, file_name: &str) -> String {
    let mut sorted = diags.to_vec();
    sort_diagnostics(&mut sorted);
    let mut out = String::new();
    for d in &sorted {
        let _ = writeln!(
            out,
            "{}:{}:{}: {}[{}]: {}",
            file_name,
            d.span.start_line,
            d.span.start_col,
            d.severity.as_str(),
            d.code,
            d.message
        );
        render_snippet(&mut out, source, d.span);
        if let Some((span, note)) = &d.note {
            let _ = writeln!(
                out,
                "{}:{}:{}: note: {}",
                file_name, span.start_line, span.start_col, note
            );
            render_snippet(&mut out, source, *span);
        }
    }
    out
}

fn render_snippet(out: &mut String, source: &str, span: SourceSpan) {
    let Some(text) = source_line(source, span.start_line) else {
        return;
    };
    let gutter = span.start_line.to_string();
    let pad = " ".repeat(gutter.len());
    let _ = writeln!(out, "{} | {}", gutter, text);
    let start = span.start_col.max(1) as usize;
    let line_len = text.chars().count() + 1;
    let end = if span.end_line == span.start_line {
        (span.end_col as usize).max(start + 1)
    } else {
        line_len.max(start + 1)
    };
    // Tabs in the prefix are kept so the caret lines up with the echoed line.
    let prefix: String = text
        .chars()
        .take(start - 1)
        .map(|c| if c == '\t' { '\t' } else { ' ' })
        .collect();
    let _ = writeln!(out, "{} | {}{}", pad, prefix, "^".repeat(end - start));
}

/// One JSON object per line, fields `{code, severity, line, col, end_line,
/// end_col, message}`.
pub fn render_json(diags: &[Diagnostic]) -> String {
    let mut sorted = diags.to_vec();
    sort_diagnostics(&mut sorted);
    let mut out = String::new();
    for d in &sorted {
        let obj = json!({
            "code": d.code,
            "severity": d.severity.as_str(),
            "line": d.span.start_line,
            "col": d.span.start_col,
            "end_line": d.span.end_line,
            "end_col": d.span.end_col,
            "message": d.message,
        });
        out.push_str(&obj.to_string());
        out.push('\n');
    }
    out
}

/// `"N errors, M warnings"`.
pub fn summary(diags: &[Diagnostic]) -> String {
    let errors = diags.iter().filter(|d| d.is_error()).count();
    let warnings = diags.len() - errors;
    let plural = |n: usize, word: &str| {
        if n == 1 {
            format!("{} {}", n, word)
        } else {
            format!("{} {}s", n, word)
        }
    };
    format!("{}, {}", plural(errors, "error"), plural(warnings, "warning"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(line: u32, col: u32, end_col: u32) -> SourceSpan {
        SourceSpan {
            start_line: line,
            start_col: col,
            end_line: line,
            end_col,
            ..SourceSpan::default()
        }
    }

    #[test]
    fn caret_under_column() {
        let src = "a\nb\nc\nd\ne\nf\nfn g() { a = 3; }\n";
        let d = Diagnostic::error(codes::IMMUT_ASSIGN, span(7, 10, 11), "nope");
        let text = render_text(&[d], src, "t.frs");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t.frs:7:10: error[E-IMMUT-ASSIGN]: nope");
        assert_eq!(lines[1], "7 | fn g() { a = 3; }");
        assert_eq!(lines[2], "  |          ^");
    }

    #[test]
    fn empty_list() {
        assert_eq!(render_text(&[], "", "x"), "");
        assert_eq!(render_json(&[]), "");
        assert_eq!(summary(&[]), "0 errors, 0 warnings");
    }

    #[test]
    fn same_line_sorted_by_column() {
        let src = "let a = b + c;\n";
        let diags = vec![
            Diagnostic::error(codes::MOVED_USE, span(1, 13, 14), "second"),
            Diagnostic::error(codes::MOVED_USE, span(1, 9, 10), "first"),
        ];
        let text = render_text(&diags, src, "f");
        let first = text.find("first").unwrap();
        let second = text.find("second").unwrap();
        assert!(first < second);
        let json = render_json(&diags);
        let cols: Vec<i64> = json
            .lines()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["col"].as_i64().unwrap())
            .collect();
        assert_eq!(cols, vec![9, 13]);
    }
}
