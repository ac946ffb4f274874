//! Static analysis of Python snippets.
//!
//! Parsing is delegated to `rustpython-parser`; everything on top of the
//! syntax tree (library call discovery, def-use dataflow between library
//! calls, trimming and dead-code elimination) lives here.

mod analyze;
mod dce;
pub(crate) mod lexical;
mod trim;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use rustpython_parser::ast::{self, Ranged};
use rustpython_parser::Parse;
use serde::{Deserialize, Serialize};

pub use analyze::{ProgramFacts, StmtOutline};
pub use dce::{eliminate_dead_code, strip_prints};
pub use lexical::LineIndex;
pub use trim::trim_to_parse;

/// First syntax error reported by the parser, with 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SyntaxError {}

pub(crate) fn parse_suite(source: &str) -> Result<ast::Suite, SyntaxError> {
    // The parser is third-party code fed with arbitrary model output; a panic
    // inside it is reported as a syntax error instead of tearing down a worker.
    let result = std::panic::catch_unwind(|| ast::Suite::parse(source, "<snippet>"));
    match result {
        Ok(Ok(suite)) => Ok(suite),
        Ok(Err(err)) => {
            let offset = usize::from(err.offset).min(source.len());
            let index = LineIndex::new(source);
            Err(SyntaxError {
                line: index.line_of(offset),
                column: index.column_of(offset),
                message: err.error.to_string(),
            })
        }
        Err(_) => Err(SyntaxError { line: 1, column: 1, message: "parser panicked".into() }),
    }
}

/// Validates `source` against the Python grammar.
pub fn parse_check(source: &str) -> Result<(), SyntaxError> {
    parse_suite(source).map(|_| ())
}

pub(crate) fn span<T: Ranged>(node: &T) -> Range<usize> {
    let r = node.range();
    usize::from(r.start())..usize::from(r.end())
}

/// How a call site was attributed to the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CallKind {
    /// The callee is a dotted name rooted at a library prefix or an import
    /// alias of one, e.g. `torch.mm` or `F.relu`.
    Direct,
    /// A method called on a value that a library call produced, e.g.
    /// `ds.batch(5)` where `ds` came from `tf.data.Dataset.range(10)`.
    Method,
}

/// A library call found in a snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    /// Source text of the callee expression.
    pub callee: String,
    /// Resolved API name. Import aliases are expanded for direct calls;
    /// method calls are named `<root>.·<method>`.
    pub api: String,
    pub kind: CallKind,
    /// Bytes strictly between the parentheses of the argument list.
    pub arg_span: Range<usize>,
    pub call_span: Range<usize>,
    /// Bytes of the callee that name the function, without the library root
    /// (`nn.conv2d` in `tf.nn.conv2d`) or the receiver (`batch` in `ds.batch`).
    pub name_span: Range<usize>,
    /// Inclusive 1-based line range of the call.
    pub line_range: (usize, usize),
    /// Whitespace- and comment-insensitive spelling of the argument list.
    pub normalized_args: String,
}

impl CallSite {
    pub fn is_call_to(&self, qualified_name: &str) -> bool {
        self.kind == CallKind::Direct && self.api == qualified_name
    }
}

/// Data dependencies between library call sites. Node `i` is the `i`-th site
/// returned by [`find_calls`] on the same source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataflowGraph {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub depth: usize,
}

impl DataflowGraph {
    pub(crate) fn new(nodes: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        let depth = longest_path(nodes, &edges);
        Self { nodes, edges, depth }
    }
}

/// Longest path, counted in edges, of a DAG whose edges all point from a lower
/// to a higher node index.
fn longest_path(nodes: usize, edges: &BTreeSet<(usize, usize)>) -> usize {
    let mut best = vec![0usize; nodes];
    // BTreeSet iterates by producer, so every producer is final before it is read.
    for &(from, to) in edges {
        debug_assert!(from < to);
        best[to] = best[to].max(best[from] + 1);
    }
    best.into_iter().max().unwrap_or(0)
}

/// Every library call in `source`, in evaluation order (inner calls before the
/// calls that consume them).
pub fn find_calls<P: AsRef<str>>(source: &str, library_prefixes: &[P]) -> Result<Vec<CallSite>, SyntaxError> {
    Ok(ProgramFacts::analyze(source, library_prefixes)?.calls)
}

/// Def-use graph between the library calls of `source`.
pub fn build_dataflow<P: AsRef<str>>(source: &str, library_prefixes: &[P]) -> Result<DataflowGraph, SyntaxError> {
    Ok(ProgramFacts::analyze(source, library_prefixes)?.dataflow)
}
