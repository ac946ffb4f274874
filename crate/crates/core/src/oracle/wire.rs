//! Line-delimited JSON execution reports.
//!
//! Every line is one record. Snapshot records carry `var`, `stmt`, `dtype`,
//! `shape` and either a flat `payload` or summary `stats`; the last line is
//! the status record. Non-finite numbers are written as the strings `"nan"`,
//! `"inf"` and `"-inf"`.

use std::fmt;
use std::time::Duration;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{BackendId, CrashKind, ExecStatus, ExecutionReport, Payload, SummaryStats, ValueKind, ValueSnapshot};

/// A float that survives JSON even when it is not finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"nan\", \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_bool<E: de::Error>(self, v: bool) -> Result<Num, E> {
                Ok(Num(if v { 1.0 } else { 0.0 }))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v.to_ascii_lowercase().as_str() {
                    "nan" => Ok(Num(f64::NAN)),
                    "inf" | "+inf" | "infinity" => Ok(Num(f64::INFINITY)),
                    "-inf" | "-infinity" => Ok(Num(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub(super) enum WireRecord {
    Snapshot {
        var: String,
        stmt: usize,
        #[serde(default = "opaque")]
        kind: ValueKind,
        #[serde(default)]
        dtype: String,
        #[serde(default)]
        shape: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        payload: Option<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stats: Option<SummaryStats>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    Status {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        backend: Option<BackendId>,
        status: StatusTag,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exc_type: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        message: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        crash: Option<CrashKind>,
        #[serde(default)]
        target_invoked: bool,
        #[serde(default)]
        duration_ms: u64,
    },
}

fn opaque() -> ValueKind {
    ValueKind::Opaque
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatusTag {
    Ok,
    PythonException,
    Crash,
    Timeout,
    InfraError,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("report line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("report has no status record")]
    MissingStatus,
    #[error("records after the status record")]
    TrailingRecords,
}

/// Parses a report written for `backend`.
pub fn parse_report(text: &str, backend: BackendId) -> Result<ExecutionReport, ReportError> {
    let mut snapshots = Vec::new();
    let mut status = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if status.is_some() {
            return Err(ReportError::TrailingRecords);
        }
        let err = |message: String| ReportError::Line { line: i + 1, message };
        let record: WireRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        match record {
            WireRecord::Snapshot { var, stmt, kind, dtype, shape, payload, stats, text } => {
                let payload = match (payload, stats, text) {
                    (Some(values), None, None) => Payload::Values(values.into_iter().map(|n| n.0).collect()),
                    (None, Some(stats), None) => Payload::Stats(stats),
                    (None, None, Some(text)) => Payload::Text(text),
                    (None, None, None) => Payload::None,
                    _ => return Err(err(format!("snapshot of {var} has more than one payload form"))),
                };
                let snap = ValueSnapshot { var, stmt, kind, dtype, shape, payload };
                snap.check().map_err(err)?;
                snapshots.push(snap);
            }
            WireRecord::Status { status: tag, exc_type, message, crash, target_invoked, duration_ms, .. } => {
                let s = match tag {
                    StatusTag::Ok => ExecStatus::Ok,
                    StatusTag::PythonException => ExecStatus::PythonException {
                        exc_type: exc_type.unwrap_or_default(),
                        message: message.unwrap_or_default(),
                    },
                    StatusTag::Crash => ExecStatus::Crash { crash: crash.unwrap_or(CrashKind::Other) },
                    StatusTag::Timeout => ExecStatus::Timeout,
                    StatusTag::InfraError => ExecStatus::InfraError { message: message.unwrap_or_default() },
                };
                status = Some((s, target_invoked, Duration::from_millis(duration_ms)));
            }
        }
    }
    let (status, target_invoked, duration) = status.ok_or(ReportError::MissingStatus)?;
    Ok(ExecutionReport { backend, status, snapshots, target_invoked, duration })
}

/// Serializes `report` in the wire format.
pub fn write_report(report: &ExecutionReport) -> String {
    let mut out = String::new();
    for s in &report.snapshots {
        let (payload, stats, text) = match &s.payload {
            Payload::Values(v) => (Some(v.iter().copied().map(Num).collect()), None, None),
            Payload::Stats(st) => (None, Some(*st), None),
            Payload::Text(t) => (None, None, Some(t.clone())),
            Payload::None => (None, None, None),
        };
        let rec = WireRecord::Snapshot {
            var: s.var.clone(),
            stmt: s.stmt,
            kind: s.kind,
            dtype: s.dtype.clone(),
            shape: s.shape.clone(),
            payload,
            stats,
            text,
        };
        out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        out.push('\n');
    }
    let (tag, exc_type, message, crash) = match &report.status {
        ExecStatus::Ok => (StatusTag::Ok, None, None, None),
        ExecStatus::PythonException { exc_type, message } => {
            (StatusTag::PythonException, Some(exc_type.clone()), Some(message.clone()), None)
        }
        ExecStatus::Crash { crash } => (StatusTag::Crash, None, None, Some(*crash)),
        ExecStatus::Timeout => (StatusTag::Timeout, None, None, None),
        ExecStatus::InfraError { message: m } => (StatusTag::InfraError, None, Some(m.clone()), None),
    };
    let rec = WireRecord::Status {
        backend: Some(report.backend),
        status: tag,
        exc_type,
        message,
        crash,
        target_invoked: report.target_invoked,
        duration_ms: report.duration.as_millis() as u64,
    };
    out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_round_trip() {
        let nums = vec![Num(1.5), Num(f64::NAN), Num(f64::INFINITY), Num(f64::NEG_INFINITY), Num(-0.0)];
        let json = serde_json::to_string(&nums).unwrap();
        assert_eq!(json, r#"[1.5,"nan","inf","-inf",-0.0]"#);
        let back: Vec<Num> = serde_json::from_str(&json).unwrap();
        assert!(back[1].0.is_nan());
        assert_eq!(back[2].0, f64::INFINITY);
        assert_eq!(back[3].0, f64::NEG_INFINITY);
        let ints: Vec<Num> = serde_json::from_str("[1, true]").unwrap();
        assert_eq!(ints, [Num(1.0), Num(1.0)]);
    }

    #[test]
    fn parses_shim_report() {
        let text = r#"{"record":"snapshot","var":"x","stmt":1,"kind":"tensor","dtype":"float32","shape":[2],"payload":[0.17,"nan"]}
{"record":"snapshot","var":"n","stmt":0,"kind":"scalar","dtype":"int","shape":[],"payload":[3]}
{"record":"status","status":"python-exception","exc_type":"ValueError","message":"bad","target_invoked":true,"duration_ms":12}
"#;
        let r = parse_report(text, BackendId::Cpu).unwrap();
        assert_eq!(r.snapshots.len(), 2);
        assert_eq!(r.status, ExecStatus::PythonException { exc_type: "ValueError".into(), message: "bad".into() });
        assert!(r.target_invoked);
        assert_eq!(r.duration, Duration::from_millis(12));
        let again = parse_report(&write_report(&r), BackendId::Cpu).unwrap();
        assert_eq!(again.snapshots.len(), 2);
        assert_eq!(again.status, r.status);
    }

    #[test]
    fn malformed_reports_are_rejected() {
        assert_eq!(parse_report("", BackendId::Cpu).unwrap_err(), ReportError::MissingStatus);
        let bad_shape = r#"{"record":"snapshot","var":"x","stmt":0,"kind":"tensor","dtype":"f","shape":[3],"payload":[1,2]}"#;
        assert!(matches!(parse_report(bad_shape, BackendId::Cpu), Err(ReportError::Line { line: 1, .. })));
        let trailing = "{\"record\":\"status\",\"status\":\"ok\"}\n{\"record\":\"status\",\"status\":\"ok\"}";
        assert_eq!(parse_report(trailing, BackendId::Cpu).unwrap_err(), ReportError::TrailingRecords);
    }
}
