use thiserror::Error;

use crate::corpus::ApiTarget;
use crate::pyast::lexical::{segments, SegmentKind};
use crate::pyast::{eliminate_dead_code, strip_prints, trim_to_parse, ProgramFacts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Raw completion of a seed prompt, possibly echoing the prompt.
    Seed,
    /// A mutant produced by infilling.
    Mutant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum Reject {
    #[error("no line prefix parses")]
    Unparseable,
    #[error("nothing left after cleanup")]
    EmptyAfterTrim,
    #[error("target API is never called")]
    NoTargetCall,
}

impl Reject {
    pub fn as_str(self) -> &'static str {
        match self {
            Reject::Unparseable => "unparseable",
            Reject::EmptyAfterTrim => "empty-after-trim",
            Reject::NoTargetCall => "no-target-call",
        }
    }
}

/// Removes a leading docstring, which is how a prompt echo starts.
fn strip_leading_docstring(raw: &str) -> &str {
    for (range, kind) in segments(raw) {
        match kind {
            SegmentKind::Code if raw[range.clone()].trim().is_empty() => continue,
            SegmentKind::Str if raw[range.clone()].starts_with("\"\"\"") || raw[range.clone()].starts_with("'''") => {
                let rest = &raw[range.end..];
                return rest.strip_prefix('\n').or_else(|| rest.strip_prefix("\r\n")).unwrap_or(rest);
            }
            _ => break,
        }
    }
    raw
}

/// Cleans a raw generation into a candidate program: trim to the longest
/// parsing line prefix, drop prints, remove dead code, and require at least
/// one static call to the target API.
pub fn postprocess(raw: &str, mode: Mode, target: &ApiTarget) -> Result<String, Reject> {
    let text = match mode {
        Mode::Seed => strip_leading_docstring(raw),
        Mode::Mutant => raw,
    };
    let trimmed = trim_to_parse(text);
    if trimmed.trim().is_empty() {
        return Err(if text.trim().is_empty() { Reject::EmptyAfterTrim } else { Reject::Unparseable });
    }
    let prefixes = target.library_prefixes();
    let without_prints = strip_prints(&trimmed, &prefixes).map_err(|_| Reject::Unparseable)?;
    let cleaned = eliminate_dead_code(&without_prints, target).map_err(|_| Reject::Unparseable)?;
    if cleaned.trim().is_empty() {
        return Err(Reject::EmptyAfterTrim);
    }
    let facts = ProgramFacts::analyze(&cleaned, &prefixes).map_err(|_| Reject::Unparseable)?;
    if facts.target_sites(&target.qualified_name).is_empty() {
        return Err(Reject::NoTargetCall);
    }
    Ok(cleaned)
}
