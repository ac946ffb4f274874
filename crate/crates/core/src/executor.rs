//! Out-of-process execution of candidate programs.
//!
//! The shim is an external executable invoked as
//!
//! ```text
//! <shim> --program <file> --backend cpu|accelerator --rng-seed <n>
//!        --target <api> --report <file> --snapshot-cap <n>
//! ```
//!
//! It writes the line-delimited report described in [`crate::oracle`] and
//! exits with 0 when the program ran, 1 when the program raised and 2 on an
//! infrastructure failure. Fatal signals are passed through.

use std::fs;
use std::io::Read;
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::corpus::{TestProgram, Validity};
use crate::oracle::{classify_crash, parse_report, BackendId, ExecStatus, ExecutionReport, ProcessOutcome, SNAPSHOT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROGRAM_EXCEPTION: i32 = 1;
pub const EXIT_INFRA: i32 = 2;

/// Runs one program on one backend. Failures of any kind end up in the
/// report status, never in a panic or error return.
pub trait Executor: Send + Sync {
    fn execute(&self, program: &TestProgram, backend: BackendId) -> ExecutionReport;

    /// Runs the program on both backends with the same seed.
    fn run_pair(&self, program: &TestProgram) -> (ExecutionReport, ExecutionReport) {
        (self.execute(program, BackendId::Cpu), self.execute(program, BackendId::Accelerator))
    }
}

/// Validity implied by a cpu run.
pub fn validity_of(report: &ExecutionReport) -> Validity {
    match report.status {
        ExecStatus::Ok if report.target_invoked => Validity::Valid,
        ExecStatus::Ok => Validity::ValidNoTargetCall,
        ExecStatus::InfraError { .. } => Validity::Unknown,
        _ => Validity::RuntimeError,
    }
}

#[derive(Debug, Clone)]
pub struct ShimConfig {
    /// Executable followed by any leading arguments, e.g. `python3 shim.py`.
    pub command: Vec<String>,
    pub timeout: Duration,
    pub rng_seed: u64,
    pub snapshot_cap: usize,
}

impl ShimConfig {
    pub fn new(command: Vec<String>) -> Self {
        Self { command, timeout: Duration::from_secs(10), rng_seed: 0, snapshot_cap: SNAPSHOT_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct ShimExecutor {
    config: ShimConfig,
}

impl ShimExecutor {
    pub fn new(config: ShimConfig) -> Self {
        assert!(!config.command.is_empty(), "shim command must not be empty");
        Self { config }
    }

    pub fn config(&self) -> &ShimConfig {
        &self.config
    }

    fn run(&self, program: &TestProgram, backend: BackendId) -> Result<ExecutionReport, String> {
        let dir = tempfile::tempdir().map_err(|e| format!("temp dir: {e}"))?;
        let program_path = dir.path().join("program.py");
        let report_path = dir.path().join("report.jsonl");
        fs::write(&program_path, program.source()).map_err(|e| format!("writing program: {e}"))?;

        let c = &self.config;
        let mut cmd = Command::new(&c.command[0]);
        cmd.args(&c.command[1..])
            .arg("--program")
            .arg(&program_path)
            .args(["--backend", backend.as_str()])
            .args(["--rng-seed", &c.rng_seed.to_string()])
            .args(["--target", &program.target.qualified_name])
            .arg("--report")
            .arg(&report_path)
            .args(["--snapshot-cap", &c.snapshot_cap.to_string()])
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        let start = Instant::now();
        let mut child = cmd.spawn().map_err(|e| format!("spawning {}: {e}", c.command[0]))?;
        let stdout = drain(child.stdout.take());
        let stderr = drain(child.stderr.take());
        let status = wait_with_timeout(&mut child, c.timeout).map_err(|e| format!("waiting for shim: {e}"))?;
        let duration = start.elapsed();
        // After a kill, grandchildren may still hold the pipes open, so the
        // readers are left to finish on their own.
        let Some(status) = status else {
            let mut r = ExecutionReport::new(backend, ExecStatus::Timeout);
            r.duration = duration;
            return Ok(r);
        };
        let stdout = stdout.join().unwrap_or_default();
        let stderr = stderr.join().unwrap_or_default();
        let outcome = ProcessOutcome::from_status(status, stdout, stderr);
        let parsed = fs::read_to_string(&report_path).ok().map(|text| parse_report(&text, backend));

        if let Some(crash) = classify_crash(&outcome) {
            let mut r = match parsed {
                Some(Ok(r)) => r,
                _ => ExecutionReport::new(backend, ExecStatus::Ok),
            };
            r.status = ExecStatus::Crash { crash };
            r.duration = duration;
            return Ok(r);
        }
        match (outcome.exit_code, parsed) {
            (Some(EXIT_INFRA), _) => Err(last_line(&outcome.stderr).unwrap_or("shim infrastructure error").to_owned()),
            (_, Some(Ok(mut r))) => {
                r.duration = duration;
                Ok(r)
            }
            (_, Some(Err(e))) => Err(format!("malformed report: {e}")),
            (Some(EXIT_PROGRAM_EXCEPTION), None) => {
                let line = last_line(&outcome.stderr).unwrap_or_default();
                let (exc_type, message) = line.split_once(": ").unwrap_or((line, ""));
                let status = ExecStatus::PythonException { exc_type: exc_type.to_owned(), message: message.to_owned() };
                let mut r = ExecutionReport::new(backend, status);
                r.duration = duration;
                Ok(r)
            }
            (code, None) => Err(format!("shim exited with {code:?} and wrote no report")),
        }
    }
}

impl Executor for ShimExecutor {
    fn execute(&self, program: &TestProgram, backend: BackendId) -> ExecutionReport {
        self.run(program, backend).unwrap_or_else(|message| {
            log::warn!("{} on {backend}: {message}", program.norm_hash());
            ExecutionReport::new(backend, ExecStatus::InfraError { message })
        })
    }
}

fn last_line(text: &str) -> Option<&str> {
    text.lines().rev().map(str::trim).find(|l| !l.is_empty())
}

fn drain<R: Read + Send + 'static>(pipe: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut p) = pipe {
            let _ = p.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Waits for `child`, killing it once `timeout` has passed. `None` means it
/// was killed.
fn wait_with_timeout(child: &mut Child, timeout: Duration) -> std::io::Result<Option<std::process::ExitStatus>> {
    let deadline = Instant::now() + timeout;
    let mut pause = Duration::from_millis(1);
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if Instant::now() >= deadline {
            child.kill()?;
            child.wait()?;
            return Ok(None);
        }
        thread::sleep(pause);
        pause = (pause * 2).min(Duration::from_millis(20));
    }
}
