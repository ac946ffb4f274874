//! The `D + U - R` fitness score.
//!
//! `D` is the longest path of the library-call dataflow graph, `U` the number
//! of distinct library APIs called and `R` the number of call sites that repeat
//! an earlier site's API with the same (normalized) arguments.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::corpus::{compare_fitness, FitnessScore};
use crate::pyast::{ProgramFacts, SyntaxError};

pub fn score<P: AsRef<str>>(source: &str, library_prefixes: &[P]) -> Result<FitnessScore, SyntaxError> {
    Ok(score_facts(&ProgramFacts::analyze(source, library_prefixes)?))
}

pub fn score_facts(facts: &ProgramFacts) -> FitnessScore {
    let mut apis = HashSet::new();
    let mut seen = HashSet::new();
    let mut repeats = 0u32;
    for site in &facts.calls {
        apis.insert(site.api.as_str());
        if !seen.insert((site.api.as_str(), site.normalized_args.as_str())) {
            repeats += 1;
        }
    }
    FitnessScore::new(facts.dataflow.depth as u32, apis.len() as u32, repeats)
}

/// Orders by total, best first.
pub fn compare(a: &FitnessScore, b: &FitnessScore) -> Ordering {
    compare_fitness(a, b)
}
