//! Differential verdicts over paired execution reports.

mod crash;
mod wire;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use crash::{classify_crash, ProcessOutcome, ASSERT_MARKERS};
pub use wire::{parse_report, write_report, Num, ReportError, StatusTag};

/// Largest payload stored element by element.
pub const SNAPSHOT_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendId {
    Cpu,
    Accelerator,
}

impl BackendId {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendId::Cpu => "cpu",
            BackendId::Accelerator => "accelerator",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    Tensor,
    Scalar,
    Bool,
    String,
    Opaque,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: u64,
    pub nan_count: u64,
    pub inf_count: u64,
    /// Extremes and mean over the finite elements.
    pub min: Num,
    pub max: Num,
    pub mean: Num,
}

impl SummaryStats {
    pub fn of(values: &[f64]) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        let nan_count = values.iter().filter(|v| v.is_nan()).count() as u64;
        let inf_count = values.iter().filter(|v| v.is_infinite()).count() as u64;
        let (min, max, mean) = if finite.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
            let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (min, max, finite.iter().sum::<f64>() / finite.len() as f64)
        };
        Self { count: values.len() as u64, nan_count, inf_count, min: Num(min), max: Num(max), mean: Num(mean) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Values(Vec<f64>),
    Stats(SummaryStats),
    Text(String),
    None,
}

/// One variable observed after one top-level statement.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSnapshot {
    pub var: String,
    pub stmt: usize,
    pub kind: ValueKind,
    pub dtype: String,
    pub shape: Vec<usize>,
    pub payload: Payload,
}

impl ValueSnapshot {
    /// Numeric snapshot, summarized when `values` exceeds `cap`.
    pub fn numeric(
        var: impl Into<String>,
        stmt: usize,
        kind: ValueKind,
        dtype: impl Into<String>,
        shape: Vec<usize>,
        values: Vec<f64>,
        cap: usize,
    ) -> Self {
        let payload = if values.len() > cap { Payload::Stats(SummaryStats::of(&values)) } else { Payload::Values(values) };
        Self { var: var.into(), stmt, kind, dtype: dtype.into(), shape, payload }
    }

    pub fn element_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        let n = self.element_count();
        match &self.payload {
            Payload::Values(v) if v.len() != n => {
                Err(format!("{}: shape {:?} holds {n} elements, payload has {}", self.var, self.shape, v.len()))
            }
            Payload::Stats(s) if s.count != n as u64 || s.nan_count + s.inf_count > s.count => {
                Err(format!("{}: inconsistent summary counts", self.var))
            }
            _ => Ok(()),
        }
    }

    fn key(&self) -> (&str, usize) {
        (&self.var, self.stmt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrashKind {
    Segfault,
    Abort,
    IllegalInstruction,
    BusError,
    FloatingPoint,
    Assert,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ExecStatus {
    Ok,
    PythonException { exc_type: String, message: String },
    Crash { crash: CrashKind },
    Timeout,
    InfraError { message: String },
}

impl ExecStatus {
    pub fn is_crash(&self) -> bool {
        matches!(self, ExecStatus::Crash { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionReport {
    pub backend: BackendId,
    pub status: ExecStatus,
    pub snapshots: Vec<ValueSnapshot>,
    pub target_invoked: bool,
    pub duration: Duration,
}

impl ExecutionReport {
    pub fn new(backend: BackendId, status: ExecStatus) -> Self {
        Self { backend, status, snapshots: Vec::new(), target_invoked: false, duration: Duration::ZERO }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { rtol: 1e-3, atol: 1e-6 }
    }
}

impl ToleranceSpec {
    pub fn new(rtol: f64, atol: f64) -> Option<Self> {
        (rtol >= 0.0 && atol >= 0.0).then_some(Self { rtol, atol })
    }

    /// Element agreement. NaN matches only NaN, an infinity only itself.
    pub fn close(&self, x: f64, y: f64) -> bool {
        if x.is_nan() || y.is_nan() {
            x.is_nan() && y.is_nan()
        } else if x.is_infinite() || y.is_infinite() {
            x == y
        } else {
            (x - y).abs() <= self.atol + self.rtol * x.abs().max(y.abs())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiffVerdict {
    Consistent,
    WrongComputation {
        var: String,
        stmt: usize,
        max_abs_diff: Num,
        max_rel_diff: Num,
        nan_mismatch: bool,
        detail: String,
    },
    Crash {
        backend: BackendId,
        crash: CrashKind,
    },
    StatusDivergence {
        cpu: ExecStatus,
        accelerator: ExecStatus,
    },
    /// Neither side produced a usable result.
    Inconclusive {
        reason: String,
    },
}

impl DiffVerdict {
    pub fn is_bug(&self) -> bool {
        matches!(self, DiffVerdict::WrongComputation { .. } | DiffVerdict::Crash { .. } | DiffVerdict::StatusDivergence { .. })
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, DiffVerdict::Consistent)
    }

    pub fn label(&self) -> &'static str {
        match self {
            DiffVerdict::Consistent => "consistent",
            DiffVerdict::WrongComputation { .. } => "wrong-computation",
            DiffVerdict::Crash { .. } => "crash",
            DiffVerdict::StatusDivergence { .. } => "status-divergence",
            DiffVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn wrong(s: &ValueSnapshot, detail: impl Into<String>) -> DiffVerdict {
    DiffVerdict::WrongComputation {
        var: s.var.clone(),
        stmt: s.stmt,
        max_abs_diff: Num(f64::NAN),
        max_rel_diff: Num(f64::NAN),
        nan_mismatch: false,
        detail: detail.into(),
    }
}

fn compare_values(s: &ValueSnapshot, xs: &[f64], ys: &[f64], tol: ToleranceSpec) -> Option<DiffVerdict> {
    let mut failed = false;
    let mut nan_mismatch = false;
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for (&x, &y) in xs.iter().zip(ys) {
        if tol.close(x, y) {
            continue;
        }
        failed = true;
        nan_mismatch |= x.is_nan() != y.is_nan();
        let abs = (x - y).abs();
        let rel = if abs == 0.0 { 0.0 } else { abs / x.abs().max(y.abs()) };
        if !abs.is_nan() {
            max_abs = max_abs.max(abs);
            max_rel = max_rel.max(rel);
        }
    }
    failed.then(|| DiffVerdict::WrongComputation {
        var: s.var.clone(),
        stmt: s.stmt,
        max_abs_diff: Num(max_abs),
        max_rel_diff: Num(max_rel),
        nan_mismatch,
        detail: if nan_mismatch { "nan pattern differs".into() } else { "values differ beyond tolerance".into() },
    })
}

fn compare_stats(s: &ValueSnapshot, a: &SummaryStats, b: &SummaryStats, tol: ToleranceSpec) -> Option<DiffVerdict> {
    if a.count != b.count || a.nan_count != b.nan_count || a.inf_count != b.inf_count {
        let mut v = wrong(s, "summary counts differ");
        if let DiffVerdict::WrongComputation { nan_mismatch, .. } = &mut v {
            *nan_mismatch = a.nan_count != b.nan_count;
        }
        return Some(v);
    }
    let pairs = [(a.min, b.min), (a.max, b.max), (a.mean, b.mean)];
    let xs: Vec<f64> = pairs.iter().map(|p| p.0 .0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1 .0).collect();
    let mut v = compare_values(s, &xs, &ys, tol)?;
    if let DiffVerdict::WrongComputation { detail, .. } = &mut v {
        *detail = "summary statistics differ".into();
    }
    Some(v)
}

fn compare_snapshot(a: &ValueSnapshot, b: &ValueSnapshot, tol: ToleranceSpec) -> Option<DiffVerdict> {
    if a.kind != b.kind {
        return Some(wrong(a, format!("kind {:?} vs {:?}", a.kind, b.kind)));
    }
    if a.dtype != b.dtype {
        return Some(wrong(a, format!("dtype {} vs {}", a.dtype, b.dtype)));
    }
    if a.shape != b.shape {
        return Some(wrong(a, format!("shape {:?} vs {:?}", a.shape, b.shape)));
    }
    match (&a.payload, &b.payload) {
        (Payload::Values(x), Payload::Values(y)) if x.len() == y.len() => compare_values(a, x, y, tol),
        (Payload::Values(x), Payload::Stats(t)) => compare_stats(a, &SummaryStats::of(x), t, tol),
        (Payload::Stats(s), Payload::Values(y)) => compare_stats(a, s, &SummaryStats::of(y), tol),
        (Payload::Stats(s), Payload::Stats(t)) => compare_stats(a, s, t, tol),
        (Payload::Text(x), Payload::Text(y)) => (x != y).then(|| wrong(a, "text differs")),
        (Payload::None, Payload::None) => None,
        _ => Some(wrong(a, "payload forms differ")),
    }
}

/// Compares the cpu report `a` against the accelerator report `b`.
///
/// A crash on either side wins. Timeouts and infrastructure failures make the
/// pair inconclusive. An exception on exactly one side is a status divergence,
/// and exceptions on both sides are consistent. Otherwise every snapshot is
/// matched by variable name and statement index.
pub fn compare(a: &ExecutionReport, b: &ExecutionReport, tol: ToleranceSpec) -> DiffVerdict {
    for r in [a, b] {
        if let ExecStatus::Crash { crash: kind } = r.status {
            return DiffVerdict::Crash { backend: r.backend, crash: kind };
        }
    }
    for r in [a, b] {
        match &r.status {
            ExecStatus::Timeout => return DiffVerdict::Inconclusive { reason: format!("{} timed out", r.backend) },
            ExecStatus::InfraError { message: m } => {
                return DiffVerdict::Inconclusive { reason: format!("{} infrastructure error: {m}", r.backend) }
            }
            _ => {}
        }
    }
    let (cpu, accel) = if a.backend == BackendId::Accelerator && b.backend == BackendId::Cpu { (b, a) } else { (a, b) };
    match (&a.status, &b.status) {
        (ExecStatus::Ok, ExecStatus::Ok) => {}
        (ExecStatus::PythonException { .. }, ExecStatus::PythonException { .. }) => return DiffVerdict::Consistent,
        _ => return DiffVerdict::StatusDivergence { cpu: cpu.status.clone(), accelerator: accel.status.clone() },
    }

    let theirs: HashMap<(&str, usize), &ValueSnapshot> = b.snapshots.iter().map(|s| (s.key(), s)).collect();
    let ours: BTreeSet<(&str, usize)> = a.snapshots.iter().map(ValueSnapshot::key).collect();
    if ours.len() != theirs.len() || ours.iter().any(|k| !theirs.contains_key(k)) {
        let only = a
            .snapshots
            .iter()
            .find(|s| !theirs.contains_key(&s.key()))
            .or_else(|| b.snapshots.iter().find(|s| !ours.contains(&s.key())))
            .unwrap_or(&a.snapshots[0]);
        return wrong(only, "variable set divergence");
    }
    a.snapshots
        .iter()
        .find_map(|s| compare_snapshot(s, theirs[&s.key()], tol))
        .unwrap_or(DiffVerdict::Consistent)
}

/// API names whose divergences are expected and reported for information only.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allowlist(BTreeSet<String>);

impl Allowlist {
    /// One name per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or_default().trim())
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, api: &str) -> bool {
        self.0.contains(api)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub api: String,
    pub hash: String,
    pub verdict: DiffVerdict,
    pub informational: bool,
}

impl Finding {
    pub fn new(api: &str, hash: String, verdict: DiffVerdict, allow: &Allowlist) -> Self {
        Self { api: api.to_owned(), hash, informational: allow.contains(api), verdict }
    }

    /// Counts toward a failing exit status.
    pub fn is_reportable(&self) -> bool {
        self.verdict.is_bug() && !self.informational
    }
}
