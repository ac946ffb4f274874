use std::ops::Range;

use rand::Rng;
use rustpython_parser::ast::{Expr, Stmt};

use super::masked::{HoleRole, MaskedProgram, Segment};
use super::{MutationError, OperatorId};
use crate::corpus::TestProgram;
use crate::pyast::lexical::{canonical_code, indent_at, segments, SegmentKind};
use crate::pyast::{parse_check, parse_suite, CallSite, ProgramFacts};

/// A replacement of `range` in the parent by `replacement`.
struct Edit {
    range: Range<usize>,
    replacement: Vec<Segment>,
}

fn hole(role: HoleRole, original: &str) -> Segment {
    Segment::Hole { role, original: original.to_owned() }
}

fn assemble(program: &TestProgram, op: OperatorId, mut edits: Vec<Edit>) -> MaskedProgram {
    let src = program.source();
    edits.sort_by_key(|e| (e.range.start, e.range.end));
    let mut segments = Vec::new();
    let mut at = 0;
    for edit in edits {
        assert!(edit.range.start >= at, "mask edits overlap");
        segments.push(Segment::Text(src[at..edit.range.start].to_owned()));
        segments.extend(edit.replacement);
        at = edit.range.end;
    }
    segments.push(Segment::Text(src[at..].to_owned()));
    MaskedProgram::new(segments, op, program.norm_hash(), program.target.clone())
}

fn analyze(program: &TestProgram) -> Result<ProgramFacts, MutationError> {
    Ok(ProgramFacts::analyze(program.source(), &program.target.library_prefixes())?)
}

/// Looks `site` up in `facts`, rejecting sites taken from another program.
fn resolve<'f>(facts: &'f ProgramFacts, site: &CallSite) -> Result<&'f CallSite, MutationError> {
    facts
        .calls
        .iter()
        .find(|c| c.call_span == site.call_span && c.callee == site.callee)
        .ok_or(MutationError::NoCallSite)
}

fn resolve_target<'f>(
    program: &TestProgram,
    facts: &'f ProgramFacts,
    site: &CallSite,
) -> Result<&'f CallSite, MutationError> {
    let site = resolve(facts, site)?;
    if site.is_call_to(&program.target.qualified_name) {
        Ok(site)
    } else {
        Err(MutationError::NoTargetCall)
    }
}

fn argument_edit(site: &CallSite, src: &str) -> Edit {
    Edit { range: site.arg_span.clone(), replacement: vec![hole(HoleRole::Arguments, &src[site.arg_span.clone()])] }
}

fn method_edit(site: &CallSite, src: &str) -> Edit {
    Edit { range: site.name_span.clone(), replacement: vec![hole(HoleRole::MethodName, &src[site.name_span.clone()])] }
}

/// `f(x for x in y, k=v)` is rejected by CPython.
fn takes_bare_generator(args: &str) -> bool {
    let Ok(suite) = parse_suite(&format!("_({args}\n)")) else {
        return false;
    };
    match suite.first() {
        Some(Stmt::Expr(e)) => match e.value.as_ref() {
            Expr::Call(c) => c.keywords.is_empty() && c.args.len() == 1 && matches!(c.args[0], Expr::GeneratorExp(_)),
            _ => false,
        },
        _ => false,
    }
}

fn keyword_edit(site: &CallSite, src: &str) -> Result<Edit, MutationError> {
    let args = &src[site.arg_span.clone()];
    if takes_bare_generator(args) {
        return Err(MutationError::Inapplicable("call takes a bare generator"));
    }
    let mut code_end = 0;
    for (range, kind) in segments(args) {
        match kind {
            SegmentKind::Comment => {}
            SegmentKind::Str => code_end = range.end,
            SegmentKind::Code => {
                let text = &args[range.clone()];
                let trimmed = text.trim_end_matches(|c: char| c.is_whitespace() || c == '\\');
                if !trimmed.is_empty() {
                    code_end = range.start + trimmed.len();
                }
            }
        }
    }
    let canonical = canonical_code(args);
    let lead = if canonical.is_empty() {
        ""
    } else if canonical.ends_with(',') {
        " "
    } else {
        ", "
    };
    let at = site.arg_span.start + code_end;
    Ok(Edit {
        range: at..at,
        replacement: vec![
            Segment::Scaffold(lead.to_owned()),
            hole(HoleRole::KeywordName, ""),
            Segment::Scaffold("=".to_owned()),
            hole(HoleRole::KeywordValue, ""),
        ],
    })
}

/// Groups of whole statements before the target statement that a prefix
/// region may cover, as byte ranges running to the end of their last line.
///
/// Units come from the innermost block that has statements before the
/// target; statements sharing a line form a single unit.
fn prefix_units(facts: &ProgramFacts, site: &CallSite) -> Vec<Range<usize>> {
    let lines = facts.line_index();
    let chain = facts.enclosing_statements(site.call_span.start);
    for level in (0..chain.len()).rev() {
        let (block, i) = chain[level];
        let header_line = if level == 0 { 0 } else { chain[level - 1].0[chain[level - 1].1].lines.0 };
        // (start offset, first line, last line) per line-disjoint group
        let mut groups: Vec<(usize, usize, usize)> = Vec::new();
        for stmt in &block[..=i] {
            match groups.last_mut() {
                Some(g) if stmt.lines.0 <= g.2 => g.2 = g.2.max(stmt.lines.1),
                _ => groups.push((stmt.span.start, stmt.lines.0, stmt.lines.1)),
            }
        }
        groups.pop();
        let units: Vec<Range<usize>> = groups
            .into_iter()
            .filter(|&(_, first, _)| first > header_line)
            .map(|(start, _, last)| start..lines.line_end(last))
            .collect();
        if !units.is_empty() {
            return units;
        }
    }
    Vec::new()
}

fn prefix_edit(src: &str, units: &[Range<usize>], start: usize, len: usize) -> Edit {
    let range = units[start].start..units[start + len - 1].end;
    Edit { replacement: vec![hole(HoleRole::Region, &src[range.clone()])], range }
}

/// Inserts a new line after the statement holding the call. When the
/// innermost statement is an inline block body, the insertion moves out to
/// the first enclosing statement after which a new line is well formed.
fn suffix_edit(src: &str, facts: &ProgramFacts, site: &CallSite) -> Result<Edit, MutationError> {
    let lines = facts.line_index();
    for (block, i) in facts.enclosing_statements(site.call_span.start).into_iter().rev() {
        let stmt = &block[i];
        let at = lines.line_end(stmt.lines.1);
        let lead = format!("\n{}", indent_at(src, lines, stmt.span.start));
        let probe = format!("{}{lead}pass{}", &src[..at], &src[at..]);
        if parse_check(&probe).is_ok() {
            return Ok(Edit {
                range: at..at,
                replacement: vec![Segment::Scaffold(lead), hole(HoleRole::Insertion, "")],
            });
        }
    }
    Err(MutationError::Inapplicable("no statement boundary after the target call"))
}

pub fn mask_argument(program: &TestProgram, site: &CallSite) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve(&facts, site)?;
    Ok(assemble(program, OperatorId::Argument, vec![argument_edit(site, program.source())]))
}

pub fn mask_keyword(program: &TestProgram, site: &CallSite) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve(&facts, site)?;
    Ok(assemble(program, OperatorId::Keyword, vec![keyword_edit(site, program.source())?]))
}

/// Number of statement units available to a prefix mask before `site`.
pub fn prefix_unit_count(program: &TestProgram, site: &CallSite) -> Result<usize, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    Ok(prefix_units(&facts, site).len())
}

/// Masks `len` consecutive units starting at unit `start` (see
/// [`prefix_unit_count`]).
pub fn mask_prefix_at(
    program: &TestProgram,
    site: &CallSite,
    start: usize,
    len: usize,
) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    let units = prefix_units(&facts, site);
    if units.is_empty() {
        return Err(MutationError::NothingBeforeTarget);
    }
    if len == 0 || start + len > units.len() {
        return Err(MutationError::Inapplicable("prefix region out of range"));
    }
    Ok(assemble(program, OperatorId::Prefix, vec![prefix_edit(program.source(), &units, start, len)]))
}

fn random_region<R: Rng + ?Sized>(units: usize, rng: &mut R) -> (usize, usize) {
    let len = rng.random_range(1..=units);
    let start = rng.random_range(0..=units - len);
    (start, len)
}

pub fn mask_prefix<R: Rng + ?Sized>(
    program: &TestProgram,
    site: &CallSite,
    rng: &mut R,
) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    prefix(program, &facts, site, false, rng)
}

fn prefix<R: Rng + ?Sized>(
    program: &TestProgram,
    facts: &ProgramFacts,
    site: &CallSite,
    with_argument: bool,
    rng: &mut R,
) -> Result<MaskedProgram, MutationError> {
    let src = program.source();
    let units = prefix_units(facts, site);
    if units.is_empty() {
        return Err(MutationError::NothingBeforeTarget);
    }
    let (start, len) = random_region(units.len(), rng);
    let mut edits = vec![prefix_edit(src, &units, start, len)];
    let op = if with_argument {
        edits.push(argument_edit(site, src));
        OperatorId::PrefixArgument
    } else {
        OperatorId::Prefix
    };
    Ok(assemble(program, op, edits))
}

pub fn mask_suffix(program: &TestProgram, site: &CallSite) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    Ok(assemble(program, OperatorId::Suffix, vec![suffix_edit(program.source(), &facts, site)?]))
}

pub fn mask_prefix_argument<R: Rng + ?Sized>(
    program: &TestProgram,
    site: &CallSite,
    rng: &mut R,
) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    prefix(program, &facts, site, true, rng)
}

pub fn mask_suffix_argument(program: &TestProgram, site: &CallSite) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve_target(program, &facts, site)?;
    let src = program.source();
    let edits = vec![argument_edit(site, src), suffix_edit(src, &facts, site)?];
    Ok(assemble(program, OperatorId::SuffixArgument, edits))
}

/// Masks the API name of `site`, keeping the library root or receiver.
pub fn mask_method_at(program: &TestProgram, site: &CallSite) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    let site = resolve(&facts, site)?;
    Ok(assemble(program, OperatorId::Method, vec![method_edit(site, program.source())]))
}

/// Masks the API name of a library call chosen uniformly at random.
pub fn mask_method<R: Rng + ?Sized>(program: &TestProgram, rng: &mut R) -> Result<MaskedProgram, MutationError> {
    let facts = analyze(program)?;
    if facts.calls.is_empty() {
        return Err(MutationError::NoLibraryCall);
    }
    let site = &facts.calls[rng.random_range(0..facts.calls.len())];
    Ok(assemble(program, OperatorId::Method, vec![method_edit(site, program.source())]))
}

/// Indices into `facts.calls` where `op` can be applied.
pub(super) fn candidate_sites(op: OperatorId, program: &TestProgram, facts: &ProgramFacts) -> Vec<usize> {
    let src = program.source();
    let targets = || facts.target_sites(&program.target.qualified_name);
    match op {
        OperatorId::Argument | OperatorId::Method => (0..facts.calls.len()).collect(),
        OperatorId::Keyword => {
            (0..facts.calls.len()).filter(|&i| !takes_bare_generator(&src[facts.calls[i].arg_span.clone()])).collect()
        }
        OperatorId::Prefix | OperatorId::PrefixArgument => {
            targets().into_iter().filter(|&i| !prefix_units(facts, &facts.calls[i]).is_empty()).collect()
        }
        OperatorId::Suffix | OperatorId::SuffixArgument => {
            targets().into_iter().filter(|&i| suffix_edit(src, facts, &facts.calls[i]).is_ok()).collect()
        }
    }
}

pub(super) fn apply<R: Rng + ?Sized>(
    op: OperatorId,
    program: &TestProgram,
    facts: &ProgramFacts,
    site: &CallSite,
    rng: &mut R,
) -> Result<MaskedProgram, MutationError> {
    let src = program.source();
    let edits = match op {
        OperatorId::Argument => vec![argument_edit(site, src)],
        OperatorId::Keyword => vec![keyword_edit(site, src)?],
        OperatorId::Method => vec![method_edit(site, src)],
        OperatorId::Prefix => return prefix(program, facts, site, false, rng),
        OperatorId::PrefixArgument => return prefix(program, facts, site, true, rng),
        OperatorId::Suffix => vec![suffix_edit(src, facts, site)?],
        OperatorId::SuffixArgument => vec![argument_edit(site, src), suffix_edit(src, facts, site)?],
    };
    Ok(assemble(program, op, edits))
}
