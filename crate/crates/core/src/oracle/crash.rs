use serde::{Deserialize, Serialize};

use super::CrashKind;

/// Markers that internal assertion failures print before aborting.
pub const ASSERT_MARKERS: [&str; 2] = ["INTERNAL_ASSERT_FAILED", "Check failed"];

/// Raw result of one child process.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessOutcome {
    pub exit_code: Option<i32>,
    /// Terminating signal, if the process did not exit normally.
    pub signal: Option<i32>,
    pub stdout: String,
    pub stderr: String,
}

impl ProcessOutcome {
    #[cfg(unix)]
    pub fn from_status(status: std::process::ExitStatus, stdout: String, stderr: String) -> Self {
        use std::os::unix::process::ExitStatusExt;
        Self { exit_code: status.code(), signal: status.signal(), stdout, stderr }
    }

    #[cfg(not(unix))]
    pub fn from_status(status: std::process::ExitStatus, stdout: String, stderr: String) -> Self {
        Self { exit_code: status.code(), signal: None, stdout, stderr }
    }
}

fn signal_kind(signal: i32) -> Option<CrashKind> {
    Some(match signal {
        4 => CrashKind::IllegalInstruction,
        6 => CrashKind::Abort,
        7 => CrashKind::BusError,
        8 => CrashKind::FloatingPoint,
        11 => CrashKind::Segfault,
        _ => return None,
    })
}

/// Decides whether a process outcome is a crash. Fatal signals count, whether
/// delivered directly or reported by a wrapper as `128 + n` or `-n`; so does
/// an assertion marker anywhere in the output. A plain traceback does not.
pub fn classify_crash(outcome: &ProcessOutcome) -> Option<CrashKind> {
    if let Some(kind) = outcome.signal.and_then(signal_kind) {
        return Some(kind);
    }
    if let Some(code) = outcome.exit_code {
        let wrapped = match code {
            129..=159 => signal_kind(code - 128),
            -31..=-1 => signal_kind(-code),
            _ => None,
        };
        if wrapped.is_some() {
            return wrapped;
        }
    }
    let marked = ASSERT_MARKERS.iter().any(|m| outcome.stderr.contains(m) || outcome.stdout.contains(m));
    marked.then_some(CrashKind::Assert)
}
