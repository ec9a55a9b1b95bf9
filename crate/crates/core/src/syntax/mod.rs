//! Concrete syntax for programs (`.lpar`) and topology files (`.topo`).

mod lexer;
mod parser;
mod pretty;
mod topo;

use std::fmt;

use crate::term::{Path, Term};

pub use parser::{conditional_type, parse_program, parse_program_with, parse_type, Parsed};
pub use pretty::{pretty, pretty_header, pretty_program};
pub use topo::{parse_topology, TopologyFile};

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn from_offsets(src: &str, start: usize, end: usize) -> SourceSpan {
        let start = start.min(src.len());
        let end = end.clamp(start, src.len());
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SourceSpan { start, end, line, column }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: SourceSpan) -> ParseError {
        ParseError { message: message.into(), span }
    }
}

/// Source spans shaped like the term: one child per subterm, in [`Term::children`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanTree {
    pub span: SourceSpan,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    pub fn new(span: SourceSpan, children: Vec<SpanTree>) -> SpanTree {
        SpanTree { span, children }
    }

    pub fn leaf(span: SourceSpan) -> SpanTree {
        SpanTree { span, children: Vec::new() }
    }

    pub fn with_span(mut self, span: SourceSpan) -> SpanTree {
        self.span = span;
        self
    }

    /// Span of the deepest node along `path` that the tree covers.
    pub fn locate(&self, term: &Term, path: &Path) -> &SourceSpan {
        let mut tree = self;
        let mut cur = term;
        for step in path.steps() {
            let children = cur.children();
            let Some(i) = children.iter().position(|(s, _)| s == step) else {
                break;
            };
            let Some(sub) = tree.children.get(i) else {
                break;
            };
            tree = sub;
            cur = children[i].1;
        }
        &tree.span
    }
}

/// Renders `message` with the offending source line and a caret under `span`.
pub fn render_snippet(src: &str, span: &SourceSpan, message: &str) -> String {
    let line_text = src.lines().nth(span.line.saturating_sub(1)).unwrap_or("");
    let width = src[span.start..span.end].chars().take_while(|&c| c != '\n').count().max(1);
    format!(
        "{}: {message}\n  {line_text}\n  {}{}",
        span,
        " ".repeat(span.column.saturating_sub(1)),
        "^".repeat(width)
    )
}
