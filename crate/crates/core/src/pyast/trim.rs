use super::parse_check;

/// Longest prefix of whole lines of `source` that parses.
///
/// Sources that already parse are returned unchanged; otherwise trailing
/// lines are dropped one at a time. The result never ends with a newline
/// unless it is the untouched input, and it is empty if no prefix parses.
pub fn trim_to_parse(source: &str) -> String {
    if parse_check(source).is_ok() {
        return source.to_owned();
    }
    let mut end = source.len();
    while let Some(newline) = source[..end].rfind('\n') {
        end = newline;
        if parse_check(&source[..end]).is_ok() {
            return source[..end].to_owned();
        }
    }
    String::new()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_truncated_tail() {
        assert_eq!(trim_to_parse("a = torch.rand(3)\nb = torch."), "a = torch.rand(3)");
    }

    #[test]
    fn valid_source_is_unchanged() {
        let src = "import torch\nx = torch.rand(2)\n";
        assert_eq!(trim_to_parse(src), src);
    }

    #[test]
    fn nothing_parses() {
        assert_eq!(trim_to_parse("def f(:"), "");
    }

    #[test]
    fn unterminated_block_is_dropped() {
        let src = "x = torch.rand(3)\nfor i in range(3):";
        assert_eq!(trim_to_parse(src), "x = torch.rand(3)");
        let src = "x = torch.rand(3)\ny = torch.nn.functional.conv2d(x,\n    weight";
        assert_eq!(trim_to_parse(src), "x = torch.rand(3)");
    }
}
