//! Token-level helpers that work on raw text, including text that does not
//! parse. Only string literals and comments are recognized; everything else
//! is treated as opaque code.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SegmentKind {
    Code,
    Str,
    Comment,
}

/// Splits `src` into contiguous code, string-literal and comment segments.
///
/// Unterminated triple-quoted strings run to the end of the input and
/// unterminated single-quoted strings stop at the end of their line, which
/// mirrors how a tokenizer would recover.
pub(crate) fn segments(src: &str) -> Vec<(Range<usize>, SegmentKind)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut code_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'#' => {
                if code_start < i {
                    out.push((code_start..i, SegmentKind::Code));
                }
                let end = memchr(b'\n', &bytes[i..]).map_or(bytes.len(), |n| i + n);
                out.push((i..end, SegmentKind::Comment));
                i = end;
                code_start = i;
            }
            q @ (b'\'' | b'"') => {
                if code_start < i {
                    out.push((code_start..i, SegmentKind::Code));
                }
                let end = string_end(bytes, i, q);
                out.push((i..end, SegmentKind::Str));
                i = end;
                code_start = i;
            }
            _ => i += 1,
        }
    }
    if code_start < bytes.len() {
        out.push((code_start..bytes.len(), SegmentKind::Code));
    }
    out
}

fn memchr(needle: u8, hay: &[u8]) -> Option<usize> {
    hay.iter().position(|&b| b == needle)
}

fn string_end(bytes: &[u8], start: usize, quote: u8) -> usize {
    let triple = bytes.len() >= start + 3 && bytes[start + 1] == quote && bytes[start + 2] == quote;
    let mut i = if triple { start + 3 } else { start + 1 };
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\\' {
            i += 2;
            continue;
        }
        if triple {
            if b == quote && i + 2 < bytes.len() && bytes[i + 1] == quote && bytes[i + 2] == quote {
                return i + 3;
            }
        } else if b == quote {
            return i + 1;
        } else if b == b'\n' {
            return i;
        }
        i += 1;
    }
    bytes.len()
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Canonical spelling of a code fragment: comments and line continuations are
/// dropped, whitespace is removed except for a single space between two word
/// characters, and string literals are kept verbatim.
pub(crate) fn canonical_code(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut pending_space = false;
    for (range, kind) in segments(src) {
        let text = &src[range];
        match kind {
            SegmentKind::Comment => pending_space = true,
            SegmentKind::Str => {
                if pending_space && out.chars().last().is_some_and(is_word) && text.starts_with(is_word) {
                    out.push(' ');
                }
                pending_space = false;
                out.push_str(text);
            }
            SegmentKind::Code => {
                for c in text.chars() {
                    if c.is_whitespace() || c == '\\' {
                        pending_space = true;
                        continue;
                    }
                    if pending_space && is_word(c) && out.chars().last().is_some_and(is_word) {
                        out.push(' ');
                    }
                    pending_space = false;
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Position of the first `(` in `src[from..to]`, skipping whitespace,
/// comments and line continuations.
pub(crate) fn find_open_paren(src: &str, from: usize, to: usize) -> Option<usize> {
    let bytes = src.as_bytes();
    let mut i = from;
    while i < to {
        match bytes[i] {
            b'(' => return Some(i),
            b' ' | b'\t' | b'\n' | b'\r' | b'\\' | b'\x0c' => i += 1,
            b'#' => {
                i = memchr(b'\n', &bytes[i..to]).map_or(to, |n| i + n);
            }
            _ => return None,
        }
    }
    None
}

/// Offsets of the start of every line (the first is always 0).
#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
    len: usize,
}

impl LineIndex {
    pub fn new(src: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(src.bytes().enumerate().filter(|&(_, b)| b == b'\n').map(|(i, _)| i + 1));
        Self { starts, len: src.len() }
    }

    /// 1-based line containing `offset`.
    pub fn line_of(&self, offset: usize) -> usize {
        match self.starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    /// 1-based column of `offset` within its line.
    pub fn column_of(&self, offset: usize) -> usize {
        offset - self.starts[self.line_of(offset) - 1] + 1
    }

    pub fn line_count(&self) -> usize {
        self.starts.len()
    }

    /// Byte offset where 1-based `line` starts.
    pub fn line_start(&self, line: usize) -> usize {
        self.starts[line - 1]
    }

    /// Byte offset just before the newline that terminates 1-based `line`
    /// (or the end of input for the last line).
    pub fn line_end(&self, line: usize) -> usize {
        if line < self.starts.len() {
            self.starts[line] - 1
        } else {
            self.len
        }
    }
}

/// Leading whitespace of the line that contains `offset`.
pub(crate) fn indent_at<'a>(src: &'a str, index: &LineIndex, offset: usize) -> &'a str {
    let start = index.line_start(index.line_of(offset));
    let line = &src[start..];
    let n = line.len() - line.trim_start_matches([' ', '\t']).len();
    &line[..n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(&str, SegmentKind)> {
        segments(src).into_iter().map(|(r, k)| (&src[r], k)).collect()
    }

    #[test]
    fn segments_split_strings_and_comments() {
        use SegmentKind::*;
        assert_eq!(
            kinds("x = '#' # c\ny"),
            vec![("x = ", Code), ("'#'", Str), (" ", Code), ("# c", Comment), ("\ny", Code)]
        );
        assert_eq!(kinds("s = \"\"\"a\n# no\"\"\""), vec![("s = ", Code), ("\"\"\"a\n# no\"\"\"", Str)]);
        assert_eq!(kinds("'a\\'b'"), vec![("'a\\'b'", Str)]);
        // unterminated single quote stops at newline
        assert_eq!(kinds("'ab\nc"), vec![("'ab", Str), ("\nc", Code)]);
    }

    #[test]
    fn canonical_code_drops_insignificant_whitespace() {
        assert_eq!(canonical_code("x , y"), "x,y");
        assert_eq!(canonical_code(" a,\n  b  # why\n"), "a,b");
        assert_eq!(canonical_code("not  x"), "not x");
        assert_eq!(canonical_code("'a  b', c"), "'a  b',c");
        assert_eq!(canonical_code("dim = 1"), "dim=1");
    }

    #[test]
    fn open_paren_skips_trivia() {
        let src = "f  (x)";
        assert_eq!(find_open_paren(src, 1, src.len()), Some(3));
        assert_eq!(find_open_paren("f.x", 1, 3), None);
    }

    #[test]
    fn line_index_roundtrip() {
        let src = "ab\ncd\n\nef";
        let idx = LineIndex::new(src);
        assert_eq!(idx.line_count(), 4);
        assert_eq!(idx.line_of(0), 1);
        assert_eq!(idx.line_of(2), 1);
        assert_eq!(idx.line_of(3), 2);
        assert_eq!(idx.line_of(6), 3);
        assert_eq!(idx.line_of(7), 4);
        assert_eq!(idx.column_of(4), 2);
        assert_eq!(&src[idx.line_start(2)..idx.line_end(2)], "cd");
        assert_eq!(&src[idx.line_start(4)..idx.line_end(4)], "ef");
    }
}
