use std::ops::Range;

use super::{MutationError, OperatorId};
use crate::corpus::{ApiTarget, NormHash};

/// Marker used when a masked program is rendered for humans and fixtures.
pub const PLACEHOLDER: &str = "<SPAN>";

/// What a hole stands for, which decides the neutral text that keeps the
/// program syntactically coherent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleRole {
    Arguments,
    KeywordName,
    KeywordValue,
    MethodName,
    /// Whole statements replaced before the target call.
    Region,
    /// New statements inserted after the target call.
    Insertion,
}

impl HoleRole {
    pub fn neutral_fill(self) -> &'static str {
        match self {
            HoleRole::Arguments | HoleRole::KeywordValue => "None",
            HoleRole::KeywordName | HoleRole::MethodName => "x",
            HoleRole::Region | HoleRole::Insertion => "pass",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Segment {
    /// Unchanged text of the parent.
    Text(String),
    /// Text added around holes that is not part of the parent.
    Scaffold(String),
    Hole { role: HoleRole, original: String },
}

/// A parent program with one or two regions cut out for infilling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedProgram {
    segments: Vec<Segment>,
    pub operator: OperatorId,
    pub parent_hash: NormHash,
    pub target: ApiTarget,
}

impl MaskedProgram {
    pub(crate) fn new(segments: Vec<Segment>, operator: OperatorId, parent_hash: NormHash, target: ApiTarget) -> Self {
        let mut merged: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match (merged.last_mut(), seg) {
                (_, Segment::Text(t) | Segment::Scaffold(t)) if t.is_empty() => {}
                (Some(Segment::Text(prev)), Segment::Text(t)) => prev.push_str(&t),
                (_, seg) => merged.push(seg),
            }
        }
        Self { segments: merged, operator, parent_hash, target }
    }

    pub fn hole_count(&self) -> usize {
        self.segments.iter().filter(|s| matches!(s, Segment::Hole { .. })).count()
    }

    pub fn roles(&self) -> Vec<HoleRole> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Hole { role, .. } => Some(*role),
                _ => None,
            })
            .collect()
    }

    /// Texts that were cut out, one per hole.
    pub fn originals(&self) -> Vec<&str> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Hole { original, .. } => Some(original.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Literal text around the holes: `hole_count() + 1` pieces.
    pub fn literals(&self) -> Vec<String> {
        let mut out = vec![String::new()];
        for seg in &self.segments {
            match seg {
                Segment::Text(t) | Segment::Scaffold(t) => out.last_mut().expect("non-empty").push_str(t),
                Segment::Hole { .. } => out.push(String::new()),
            }
        }
        out
    }

    pub fn render(&self, marker: &str) -> String {
        self.literals().join(marker)
    }

    pub fn masked_source(&self) -> String {
        self.render(PLACEHOLDER)
    }

    /// Byte offset of every placeholder in [`masked_source`](Self::masked_source).
    pub fn spans(&self) -> Vec<usize> {
        let literals = self.literals();
        let mut offsets = Vec::with_capacity(literals.len() - 1);
        let mut at = 0;
        for lit in &literals[..literals.len() - 1] {
            at += lit.len();
            offsets.push(at);
            at += PLACEHOLDER.len();
        }
        offsets
    }

    /// Ranges of the parent source that the holes replace. Insertions
    /// are empty ranges.
    pub fn masked_ranges(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut at = 0;
        for seg in &self.segments {
            match seg {
                Segment::Text(t) => at += t.len(),
                Segment::Scaffold(_) => {}
                Segment::Hole { original, .. } => {
                    out.push(at..at + original.len());
                    at += original.len();
                }
            }
        }
        out
    }

    /// Fills the holes in order.
    pub fn splice<S: AsRef<str>>(&self, fills: &[S]) -> Result<String, MutationError> {
        let literals = self.literals();
        if fills.len() != literals.len() - 1 {
            return Err(MutationError::FillCount { expected: literals.len() - 1, got: fills.len() });
        }
        let mut out = literals[0].clone();
        for (fill, lit) in fills.iter().zip(&literals[1..]) {
            out.push_str(fill.as_ref());
            out.push_str(lit);
        }
        Ok(out)
    }

    /// The parent source, rebuilt from the masked-out texts.
    pub fn restore(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Text(t) => out.push_str(t),
                Segment::Scaffold(_) => {}
                Segment::Hole { original, .. } => out.push_str(original),
            }
        }
        out
    }

    /// Every hole filled with its role's neutral text.
    pub fn neutral(&self) -> String {
        let fills: Vec<&str> = self.roles().into_iter().map(HoleRole::neutral_fill).collect();
        self.splice(&fills).expect("one fill per hole")
    }
}
