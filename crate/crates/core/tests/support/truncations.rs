//! Truncated completions for the trimming tests.

use super::programs::FIXTURES;

/// Completions cut off the way token limits cut them.
pub const HAND: &[&str] = &[
    "import torch\nx = torch.rand(3)\ny = torch.",
    "import torch\nx = torch.rand(3\n",
    "import torch\ns = 'unterminated\n",
    "import torch\nif x:\n",
    "import torch\nfor i in range(3):\n    y = torch.abs(",
    "import torch\nx = [1, 2,\n",
    "import torch\ndef f(a):\n    return a\n  z = 1\n",
    "x = torch.rand(2)\ny = x +\n",
    "x = 1\n\"\"\"doc\n",
    "x = torch.ones(2)  # comment\ny = torch.abs(x) if",
];

/// Every byte prefix length from `FIXTURES` sources, ending mid-line.
pub fn truncations() -> Vec<String> {
    let mut out: Vec<String> = HAND.iter().map(|s| (*s).to_owned()).collect();
    for (i, f) in FIXTURES.iter().enumerate().take(20) {
        let src = f.source;
        let mut cut = (src.len() * (3 + i % 5)) / 9;
        while !src.is_char_boundary(cut) || src.as_bytes().get(cut.wrapping_sub(1)) == Some(&b'\n') {
            cut += 1;
        }
        out.push(src[..cut].to_owned());
    }
    out
}

/// True when `out` is the first k lines of `input` (without the k-th newline).
pub fn is_line_prefix(out: &str, input: &str) -> bool {
    out.is_empty() || out == input || (input.starts_with(out) && input[out.len()..].starts_with('\n'))
}
