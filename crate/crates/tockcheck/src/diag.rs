//! Source locations and rendered diagnostics.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// 1-based line and column of a byte range in a named file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

/// A source text with a line table for turning byte offsets into spans.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub name: Arc<str>,
    pub text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(name: &str, text: String) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        SourceFile {
            name: name.into(),
            text,
            line_starts,
        }
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        let start = start.min(self.text.len());
        let end = end.clamp(start, self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= start);
        let line_start = self.line_starts[line - 1];
        SourceSpan {
            file: self.name.clone(),
            line,
            column: self.text[line_start..start].chars().count() + 1,
            length: self.text[start..end].chars().count(),
        }
    }

    fn line_text(&self, line: usize) -> &str {
        let start = self.line_starts[line - 1];
        let end = self.line_starts.get(line).map_or(self.text.len(), |e| e - 1);
        self.text[start..end].trim_end_matches('\r')
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Option<SourceSpan>,
    /// Tokens that would have been accepted, for syntax errors.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Option<SourceSpan>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
            expected: Vec::new(),
        }
    }

    /// Renders the diagnostic with the offending line underlined.
    pub fn render(&self, source: Option<&SourceFile>) -> String {
        let mut out = self.to_string();
        if let (Some(span), Some(src)) = (&self.span, source) {
            if span.file == src.name && span.line <= src.line_starts.len() {
                let text = src.line_text(span.line);
                let gutter = span.line.to_string().len();
                let pad = " ".repeat(gutter);
                let lead: String = text
                    .chars()
                    .take(span.column - 1)
                    .map(|c| if c == '\t' { '\t' } else { ' ' })
                    .collect();
                out.push_str(&format!(
                    "\n{pad} |\n{} | {text}\n{pad} | {lead}{}",
                    span.line,
                    "^".repeat(span.length.max(1))
                ));
            }
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}", self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        if let Some(s) = &self.span {
            write!(f, "\n  --> {}:{}:{}", s.file, s.line, s.column)?;
        }
        Ok(())
    }
}
