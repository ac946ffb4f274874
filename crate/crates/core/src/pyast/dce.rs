use std::collections::BTreeSet;
use std::ops::Range;

use super::analyze::ProgramFacts;
use super::{parse_check, SyntaxError};
use crate::corpus::ApiTarget;

/// Removes top-level statements whose results are never read and that make
/// no library call.
///
/// Liveness is computed backwards over the module body: a statement is live
/// when it calls the library (or a function defined in the snippet), or when
/// it binds a name that a later live statement reads. Statements sharing a
/// line with another statement are always kept.
pub fn eliminate_dead_code(source: &str, target: &ApiTarget) -> Result<String, SyntaxError> {
    let facts = ProgramFacts::analyze(source, &target.library_prefixes())?;
    let mut live_names = BTreeSet::new();
    let mut dead = Vec::new();
    for (i, stmt) in facts.top_level.iter().enumerate().rev() {
        let live = stmt.has_library_call || stmt.calls_local_fn || !stmt.defs.is_disjoint(&live_names);
        if live {
            for k in &stmt.kills {
                live_names.remove(k);
            }
            live_names.extend(stmt.uses.iter().cloned());
        } else if owns_its_lines(&facts, i) {
            dead.push(i);
        }
    }
    let lines: BTreeSet<usize> = dead
        .into_iter()
        .flat_map(|i| {
            let (first, last) = facts.outline[i].lines;
            first..=last
        })
        .collect();
    Ok(checked(source, drop_lines(source, &lines)))
}

/// Removes top-level `print(...)` statements. A print whose arguments call
/// the library is replaced by its bare arguments so the calls survive.
pub fn strip_prints<P: AsRef<str>>(source: &str, library_prefixes: &[P]) -> Result<String, SyntaxError> {
    let facts = ProgramFacts::analyze(source, library_prefixes)?;
    let mut edits: Vec<(Range<usize>, String)> = Vec::new();
    let mut dropped = BTreeSet::new();
    for (i, stmt) in facts.top_level.iter().enumerate() {
        let Some(print) = &stmt.print else { continue };
        if !stmt.has_library_call {
            if owns_its_lines(&facts, i) {
                let (first, last) = facts.outline[i].lines;
                dropped.extend(first..=last);
            }
        } else if let Some(args) = &print.plain_args {
            let replacement = if args.contains('\n') { format!("({args})") } else { args.clone() };
            edits.push((facts.outline[i].span.clone(), replacement));
        }
    }
    let mut out = source.to_owned();
    for (range, text) in edits.into_iter().rev() {
        out.replace_range(range, &text);
    }
    // Replacements never add or remove newlines outside the edited
    // statements, so line numbers of dropped statements are still valid.
    Ok(checked(source, drop_lines(&out, &dropped)))
}

fn owns_its_lines(facts: &ProgramFacts, i: usize) -> bool {
    let (first, last) = facts.outline[i].lines;
    facts
        .outline
        .iter()
        .enumerate()
        .all(|(j, other)| j == i || other.lines.1 < first || other.lines.0 > last)
}

fn drop_lines(source: &str, lines: &BTreeSet<usize>) -> String {
    if lines.is_empty() {
        return source.to_owned();
    }
    source
        .split('\n')
        .enumerate()
        .filter(|(i, _)| !lines.contains(&(i + 1)))
        .map(|(_, l)| l)
        .collect::<Vec<_>>()
        .join("\n")
}

fn checked(original: &str, rewritten: String) -> String {
    if parse_check(&rewritten).is_ok() {
        rewritten
    } else {
        log::warn!("rewrite produced unparseable code; keeping original");
        original.to_owned()
    }
}
