//! Offline backend answering from a directory of recorded responses.
//!
//! A fixture is a file `<digest>.json` holding `{"samples": [...]}`, where the
//! digest is the SHA-256 of the canonical JSON request body. Infill requests
//! without a fixture are answered from a pool of default fills; completion
//! requests without one get no samples.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{
    check_completion, check_infill, CompletionRequest, GenError, Generation, GenerationBackend, InfillRequest,
    WireRequest,
};

pub const DEFAULTS_FILE: &str = "defaults.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Defaults {
    fills: Vec<String>,
    latency_ms: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self { fills: vec!["None".into()], latency_ms: 100 }
    }
}

#[derive(Serialize, Deserialize)]
struct Fixture {
    samples: Value,
}

fn digest_of(body: &WireRequest<'_>) -> [u8; 32] {
    let json = serde_json::to_vec(body).expect("requests always serialize");
    Sha256::digest(&json).into()
}

pub fn completion_digest(req: &CompletionRequest) -> String {
    hex::encode(digest_of(&WireRequest::complete(req, None)))
}

pub fn infill_digest(req: &InfillRequest) -> String {
    hex::encode(digest_of(&WireRequest::infill(req, None)))
}

/// Deterministic stand-in for a model server. Immutable once built, so it
/// can be shared by concurrent campaigns.
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    fixtures: HashMap<String, Value>,
    defaults: Defaults,
}

impl MockBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `*.json` fixture in `dir`, plus the optional defaults file.
    pub fn load(dir: &Path) -> io::Result<Self> {
        let mut backend = Self::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            if path.file_name().is_some_and(|n| n == DEFAULTS_FILE) {
                backend.defaults = serde_json::from_str(&text).map_err(invalid_data)?;
            } else {
                let fixture: Fixture = serde_json::from_str(&text).map_err(invalid_data)?;
                backend.fixtures.insert(stem, fixture.samples);
            }
        }
        if backend.defaults.fills.is_empty() {
            return Err(invalid_data("default fill pool is empty"));
        }
        Ok(backend)
    }

    /// Writes the fixtures and defaults into `dir`.
    pub fn save(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (digest, samples) in &self.fixtures {
            let body = serde_json::to_string_pretty(&Fixture { samples: samples.clone() })?;
            fs::write(dir.join(format!("{digest}.json")), body)?;
        }
        fs::write(dir.join(DEFAULTS_FILE), serde_json::to_string_pretty(&self.defaults)?)
    }

    pub fn with_completion(mut self, req: &CompletionRequest, samples: Vec<String>) -> Self {
        self.fixtures.insert(completion_digest(req), Value::from(samples));
        self
    }

    pub fn with_infill(mut self, req: &InfillRequest, samples: Vec<Vec<String>>) -> Self {
        self.fixtures.insert(infill_digest(req), serde_json::to_value(samples).expect("strings serialize"));
        self
    }

    pub fn with_default_fills(mut self, fills: Vec<String>) -> Self {
        assert!(!fills.is_empty(), "default fill pool must not be empty");
        self.defaults.fills = fills;
        self
    }

    /// Latency reported for every call. Nothing actually sleeps.
    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.defaults.latency_ms = latency.as_millis() as u64;
        self
    }

    pub fn latency(&self) -> Duration {
        Duration::from_millis(self.defaults.latency_ms)
    }

    fn recorded<T: for<'de> Deserialize<'de>>(&self, digest: &str, limit: u32) -> Result<Option<Vec<T>>, GenError> {
        let Some(value) = self.fixtures.get(digest) else {
            return Ok(None);
        };
        let mut samples: Vec<T> =
            serde_json::from_value(value.clone()).map_err(|e| GenError::Malformed(format!("fixture {digest}: {e}")))?;
        samples.truncate(limit as usize);
        Ok(Some(samples))
    }
}

fn invalid_data(e: impl ToString) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

impl GenerationBackend for MockBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<Generation<String>, GenError> {
        check_completion(req)?;
        let digest = completion_digest(req);
        let samples = self.recorded(&digest, req.params.num_samples)?.unwrap_or_else(|| {
            log::debug!("no completion fixture {digest}");
            Vec::new()
        });
        Ok(Generation { samples, latency: self.latency() })
    }

    fn infill(&self, req: &InfillRequest) -> Result<Generation<Vec<String>>, GenError> {
        check_infill(req)?;
        let body = WireRequest::infill(req, None);
        let digest = digest_of(&body);
        if let Some(samples) = self.recorded(&hex::encode(digest), req.params.num_samples)? {
            return Ok(Generation { samples, latency: self.latency() });
        }
        let pool = &self.defaults.fills;
        let holes = req.placeholder_count();
        let base = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")) as usize;
        let samples = (0..req.params.num_samples as usize)
            .map(|j| (0..holes).map(|h| pool[base.wrapping_add(j * holes + h) % pool.len()].clone()).collect())
            .collect();
        Ok(Generation { samples, latency: self.latency() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genbackend::{InfillSegment, SamplingParams};

    fn completion(prompt: &str, n: u32) -> CompletionRequest {
        CompletionRequest { prompt: prompt.into(), params: SamplingParams { num_samples: n, ..SamplingParams::seed_default() } }
    }

    fn infill(text: &str) -> InfillRequest {
        InfillRequest {
            segments: vec![
                InfillSegment::Text { text: text.into() },
                InfillSegment::Placeholder,
                InfillSegment::Text { text: ")".into() },
            ],
            params: SamplingParams::infill_default(),
        }
    }

    #[test]
    fn fixtures_are_returned_verbatim() {
        let req = completion("import torch\n", 25);
        let backend = MockBackend::new().with_completion(&req, vec!["a".into(), "b".into()]);
        assert_eq!(backend.complete(&req).unwrap().samples, ["a", "b"]);
        assert!(backend.complete(&completion("other", 25)).unwrap().samples.is_empty());
    }

    #[test]
    fn sample_count_is_capped() {
        let req = completion("p", 3);
        let five: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let backend = MockBackend::new().with_completion(&req, five);
        assert_eq!(backend.complete(&req).unwrap().samples.len(), 3);
    }

    #[test]
    fn default_fills_are_deterministic() {
        let backend = MockBackend::new().with_default_fills(vec!["a".into(), "b".into(), "c".into()]);
        let req = infill("torch.mm(");
        let first = backend.infill(&req).unwrap();
        assert_eq!(first, backend.infill(&req).unwrap());
        assert_eq!(first.samples.len(), 5);
        assert!(first.samples.iter().all(|s| s.len() == 1));
        assert_eq!(first.latency, Duration::from_millis(100));
    }

    #[test]
    fn save_and_load_round_trip() {
        let c = completion("import torch\n", 25);
        let i = infill("torch.abs(");
        let backend = MockBackend::new()
            .with_completion(&c, vec!["x = 1".into()])
            .with_infill(&i, vec![vec!["y".into()]])
            .with_default_fills(vec!["z".into()])
            .with_latency(Duration::from_millis(7));
        let dir = tempfile::tempdir().unwrap();
        backend.save(dir.path()).unwrap();
        let loaded = MockBackend::load(dir.path()).unwrap();
        assert_eq!(loaded.complete(&c).unwrap().samples, ["x = 1"]);
        assert_eq!(loaded.infill(&i).unwrap().samples, vec![vec!["y".to_owned()]]);
        assert_eq!(loaded.infill(&infill("f(")).unwrap().samples[0], ["z"]);
        assert_eq!(loaded.latency(), Duration::from_millis(7));
    }
}
