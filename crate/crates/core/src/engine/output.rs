//! Campaign results on disk: one corpus directory per API, a JSONL report
//! and a plain-text summary.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use super::{Campaign, CampaignReport};
use crate::corpus::{write_corpus, CorpusError};

pub const REPORTS_FILE: &str = "reports.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";

pub fn write_outputs(out: &Path, campaigns: &[Campaign]) -> Result<(), CorpusError> {
    fs::create_dir_all(out)?;
    let mut lines = String::new();
    for c in campaigns {
        write_corpus(&out.join(&c.report.api), &c.bank)?;
        lines.push_str(&serde_json::to_string(&c.report).expect("reports always serialize"));
        lines.push('\n');
    }
    fs::write(out.join(REPORTS_FILE), lines)?;
    let reports: Vec<CampaignReport> = campaigns.iter().map(|c| c.report.clone()).collect();
    fs::write(out.join(SUMMARY_FILE), render_summary(&reports))?;
    Ok(())
}

pub fn load_reports(path: &Path) -> io::Result<Vec<CampaignReport>> {
    let mut out = Vec::new();
    for line in BufReader::new(fs::File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
    }
    Ok(out)
}

/// One row per API and a totals line.
pub fn render_summary(reports: &[CampaignReport]) -> String {
    let mut s = String::new();
    let width = reports.iter().map(|r| r.api.len()).max().unwrap_or(3).max(3);
    writeln!(
        s,
        "{:<width$}  {:>6} {:>6} {:>8} {:>7} {:>7} {:>6} {:>6}",
        "api", "seeds", "iters", "samples", "valid", "invalid", "dups", "bugs"
    )
    .unwrap();
    let (mut seeds, mut valid, mut covered, mut bugs) = (0, 0, 0, 0);
    for r in reports {
        let c = &r.counts;
        let b = r.reportable_findings();
        writeln!(
            s,
            "{:<width$}  {:>6} {:>6} {:>8} {:>7} {:>7} {:>6} {:>6}",
            r.api, c.seeds_kept, c.iterations, c.samples_generated, c.valid_unique, c.invalid, c.duplicates, b
        )
        .unwrap();
        for note in &r.notes {
            writeln!(s, "  note: {note}").unwrap();
        }
        seeds += c.seeds_kept;
        valid += c.seeds_kept + c.valid_unique;
        covered += usize::from(c.seeds_kept > 0);
        bugs += b;
    }
    writeln!(
        s,
        "\n{} APIs, {covered} covered, {seeds} seeds, {valid} unique valid programs, {bugs} findings",
        reports.len()
    )
    .unwrap();
    s
}
