use crate::pyast::lexical::{segments, SegmentKind};

/// Canonical text used for deduplication.
///
/// Comments, blank lines and trailing whitespace are removed; everything else,
/// including the contents of multi-line strings, is kept verbatim. Text that
/// does not parse is handled the same way, since only string literals and
/// comments need to be recognized.
pub fn normalize(source: &str) -> String {
    // Comment-free text plus, for every byte, whether it sits inside a string.
    let mut text = String::with_capacity(source.len());
    let mut in_string = Vec::with_capacity(source.len());
    for (range, kind) in segments(source) {
        match kind {
            SegmentKind::Comment => {}
            SegmentKind::Code => {
                text.push_str(&source[range.clone()]);
                in_string.extend(std::iter::repeat_n(false, range.len()));
            }
            SegmentKind::Str => {
                text.push_str(&source[range.clone()]);
                in_string.extend(std::iter::repeat_n(true, range.len()));
            }
        }
    }

    let mut lines = Vec::new();
    let mut start = 0;
    let mut starts_in_string = false;
    loop {
        let end = text[start..].find('\n').map_or(text.len(), |n| start + n);
        let ends_in_string = end < text.len() && in_string[end];
        let line = &text[start..end];
        if ends_in_string {
            lines.push(line);
        } else {
            // Whitespace inside an unterminated string is content: dropping
            // it could turn a preceding backslash into a line continuation.
            let mut keep = line.len();
            while keep > 0 && line.as_bytes()[keep - 1].is_ascii_whitespace() && !in_string[start + keep - 1] {
                keep -= 1;
            }
            let trimmed = &line[..keep];
            if starts_in_string || !trimmed.trim().is_empty() {
                lines.push(trimmed);
            }
        }
        if end == text.len() {
            break;
        }
        starts_in_string = ends_in_string;
        start = end + 1;
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_comments_and_blank_lines() {
        assert_eq!(normalize("x=1  # c\n\n"), "x=1");
        assert_eq!(normalize("x=1"), "x=1");
        assert_eq!(normalize("# header\nimport torch\n\n\ny = torch.abs(x)   \n"), "import torch\ny = torch.abs(x)");
    }

    #[test]
    fn comment_only_differences_vanish() {
        let a = "a = torch.rand(3)  # input\nb = torch.log(a)\n";
        let b = "# make input\na = torch.rand(3)\n\nb = torch.log(a)   # go";
        assert_eq!(normalize(a), normalize(b));
    }

    #[test]
    fn strings_are_preserved() {
        assert_eq!(normalize("s = '# not a comment'  "), "s = '# not a comment'");
        let doc = "s = \"\"\"a  \n\n# b\n\"\"\"\nx = 1";
        assert_eq!(normalize(doc), doc);
    }

    #[test]
    fn indentation_is_preserved() {
        assert_eq!(normalize("if a:\n    b = 1  \n\n    c = 2"), "if a:\n    b = 1\n    c = 2");
    }

    proptest! {
        #[test]
        fn idempotent(src in "[a-c #'\"\\\\\n\t=()]{0,60}") {
            let once = normalize(&src);
            prop_assert_eq!(normalize(&once), once.clone());
        }
    }
}
