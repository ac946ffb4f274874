//! Generation backends: left-to-right completion for seeds and masked
//! infilling for mutants.

mod http;
mod mock;
mod postprocess;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mutator::MaskedProgram;

pub use http::{HttpBackend, HttpConfig};
pub use mock::{completion_digest, infill_digest, MockBackend, DEFAULTS_FILE};
pub use postprocess::{postprocess, Mode, Reject};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub num_samples: u32,
}

impl SamplingParams {
    /// Seed completion: nucleus sampling at low temperature, 25 programs.
    pub fn seed_default() -> Self {
        Self { temperature: 0.4, top_p: 0.95, max_tokens: 256, num_samples: 25 }
    }

    pub fn infill_default() -> Self {
        Self { temperature: 1.0, top_p: 0.95, max_tokens: 256, num_samples: 5 }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let ok = self.temperature >= 0.0
            && self.temperature.is_finite()
            && self.top_p > 0.0
            && self.top_p <= 1.0
            && self.max_tokens > 0
            && self.num_samples > 0;
        if ok {
            Ok(())
        } else {
            Err(GenError::InvalidRequest(format!("bad sampling parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub params: SamplingParams,
}

/// Literal text and holes of an infilling request, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InfillSegment {
    Text { text: String },
    Placeholder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfillRequest {
    pub segments: Vec<InfillSegment>,
    pub params: SamplingParams,
}

impl InfillRequest {
    pub fn from_masked(masked: &MaskedProgram, params: SamplingParams) -> Self {
        let mut segments = Vec::new();
        for (i, lit) in masked.literals().into_iter().enumerate() {
            if i > 0 {
                segments.push(InfillSegment::Placeholder);
            }
            if !lit.is_empty() {
                segments.push(InfillSegment::Text { text: lit });
            }
        }
        Self { segments, params }
    }

    pub fn placeholder_count(&self) -> usize {
        self.segments.iter().filter(|s| matches!(s, InfillSegment::Placeholder)).count()
    }

    /// Fills the placeholders with `fills`, in order.
    pub fn splice<S: AsRef<str>>(&self, fills: &[S]) -> Option<String> {
        if fills.len() != self.placeholder_count() {
            return None;
        }
        let mut fills = fills.iter();
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                InfillSegment::Text { text } => out.push_str(text),
                InfillSegment::Placeholder => out.push_str(fills.next().expect("counted").as_ref()),
            }
        }
        Some(out)
    }
}

/// Samples returned by a backend and the time the call took.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation<T> {
    pub samples: Vec<T>,
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("backend rejected request ({status}): {message}")]
    Rejected { status: u16, message: String },
    #[error("request timed out")]
    Timeout,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

/// A model server, shared by every campaign worker.
pub trait GenerationBackend: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<Generation<String>, GenError>;

    /// One fill per placeholder for each sample.
    fn infill(&self, req: &InfillRequest) -> Result<Generation<Vec<String>>, GenError>;
}

/// JSON body sent to model servers.
#[derive(Debug, Serialize)]
pub(crate) struct WireRequest<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    prompt: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segments: Option<&'a [InfillSegment]>,
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
}

impl<'a> WireRequest<'a> {
    pub(crate) fn complete(req: &'a CompletionRequest, model: Option<&'a str>) -> Self {
        Self::new("complete", Some(&req.prompt), None, &req.params, model)
    }

    pub(crate) fn infill(req: &'a InfillRequest, model: Option<&'a str>) -> Self {
        Self::new("infill", None, Some(&req.segments), &req.params, model)
    }

    fn new(
        kind: &'static str,
        prompt: Option<&'a str>,
        segments: Option<&'a [InfillSegment]>,
        p: &SamplingParams,
        model: Option<&'a str>,
    ) -> Self {
        Self {
            kind,
            prompt,
            segments,
            temperature: p.temperature,
            top_p: p.top_p,
            max_tokens: p.max_tokens,
            n: p.num_samples,
            model,
        }
    }
}

#[derive(Debug, Deserialize)]
pub(crate) struct WireResponse<T> {
    pub samples: Vec<T>,
}

pub(crate) fn check_completion(req: &CompletionRequest) -> Result<(), GenError> {
    req.params.validate()?;
    if req.prompt.is_empty() {
        return Err(GenError::InvalidRequest("empty prompt".into()));
    }
    Ok(())
}

pub(crate) fn check_infill(req: &InfillRequest) -> Result<(), GenError> {
    req.params.validate()?;
    if req.placeholder_count() == 0 {
        return Err(GenError::InvalidRequest("no placeholder".into()));
    }
    Ok(())
}

/// Splices every sample into `masked`, dropping samples whose fill count
/// does not match the number of holes.
pub fn splice_samples(masked: &MaskedProgram, samples: &[Vec<String>]) -> Vec<String> {
    samples
        .iter()
        .filter_map(|fills| match masked.splice(fills) {
            Ok(src) => Some(src),
            Err(e) => {
                log::warn!("dropping infill sample: {e}");
                None
            }
        })
        .collect()
}
