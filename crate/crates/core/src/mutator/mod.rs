//! Masking operators that turn a program into an infilling request.
//!
//! Every operator cuts one or two regions out of a parent program. The masked
//! texts are kept, so filling the holes with them gives the parent back
//! byte for byte.

mod masked;
mod ops;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TestProgram;
use crate::pyast::{ProgramFacts, SyntaxError};

pub use masked::{HoleRole, MaskedProgram, PLACEHOLDER};
pub use ops::{
    mask_argument, mask_keyword, mask_method, mask_method_at, mask_prefix, mask_prefix_argument, mask_prefix_at,
    mask_suffix, mask_suffix_argument, prefix_unit_count,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorId {
    Argument,
    Keyword,
    Prefix,
    Suffix,
    PrefixArgument,
    SuffixArgument,
    Method,
}

impl OperatorId {
    pub const ALL: [OperatorId; 7] = [
        OperatorId::Argument,
        OperatorId::Keyword,
        OperatorId::Prefix,
        OperatorId::Suffix,
        OperatorId::PrefixArgument,
        OperatorId::SuffixArgument,
        OperatorId::Method,
    ];

    /// Stable integer code used in manifests.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code)).copied()
    }

    pub(crate) fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::Argument => "argument",
            OperatorId::Keyword => "keyword",
            OperatorId::Prefix => "prefix",
            OperatorId::Suffix => "suffix",
            OperatorId::PrefixArgument => "prefix-argument",
            OperatorId::SuffixArgument => "suffix-argument",
            OperatorId::Method => "method",
        }
    }

    /// Number of holes the operator produces.
    pub fn arity(self) -> usize {
        match self {
            OperatorId::Argument | OperatorId::Prefix | OperatorId::Suffix | OperatorId::Method => 1,
            OperatorId::Keyword | OperatorId::PrefixArgument | OperatorId::SuffixArgument => 2,
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("call site not found in program")]
    NoCallSite,
    #[error("program does not call the target API")]
    NoTargetCall,
    #[error("program makes no library call")]
    NoLibraryCall,
    #[error("no statement before the target call")]
    NothingBeforeTarget,
    #[error("operator not applicable: {0}")]
    Inapplicable(&'static str),
    #[error("expected {expected} fills, got {got}")]
    FillCount { expected: usize, got: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Operators that can be applied to `program` at some site.
pub fn applicable_operators(program: &TestProgram, facts: &ProgramFacts) -> Vec<OperatorId> {
    OperatorId::ALL.into_iter().filter(|&op| !ops::candidate_sites(op, program, facts).is_empty()).collect()
}

/// Applies `op` at a site chosen uniformly among those where it applies.
pub fn mutate<R: Rng + ?Sized>(
    op: OperatorId,
    program: &TestProgram,
    facts: &ProgramFacts,
    rng: &mut R,
) -> Result<MaskedProgram, MutationError> {
    let sites = ops::candidate_sites(op, program, facts);
    if sites.is_empty() {
        return Err(match op {
            OperatorId::Argument | OperatorId::Keyword | OperatorId::Method if facts.calls.is_empty() => {
                MutationError::NoLibraryCall
            }
            OperatorId::Keyword => MutationError::Inapplicable("every call takes a bare generator"),
            OperatorId::Prefix | OperatorId::PrefixArgument
                if !facts.target_sites(&program.target.qualified_name).is_empty() =>
            {
                MutationError::NothingBeforeTarget
            }
            _ => MutationError::NoTargetCall,
        });
    }
    let site = &facts.calls[sites[rng.random_range(0..sites.len())]];
    ops::apply(op, program, facts, site, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable() {
        let codes: Vec<u8> = OperatorId::ALL.iter().map(|o| o.code()).collect();
        assert_eq!(codes, [0, 1, 2, 3, 4, 5, 6]);
        for op in OperatorId::ALL {
            assert_eq!(OperatorId::from_code(op.code()), Some(op));
            let json = serde_json::to_string(&op).unwrap();
            assert_eq!(json, format!("\"{}\"", op.name()));
        }
        assert_eq!(OperatorId::from_code(7), None);
    }
}
