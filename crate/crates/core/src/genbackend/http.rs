use std::thread;
use std::time::{Duration, Instant};

use serde::de::DeserializeOwned;

use super::{
    check_completion, check_infill, CompletionRequest, GenError, Generation, GenerationBackend, InfillRequest,
    WireRequest, WireResponse,
};

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub endpoint: String,
    pub token: Option<String>,
    pub completion_model: Option<String>,
    pub infill_model: Option<String>,
    pub timeout: Duration,
    pub attempts: u32,
    /// Delay before the first retry; doubled for every further one.
    pub backoff: Duration,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            token: None,
            completion_model: None,
            infill_model: None,
            timeout: Duration::from_secs(60),
            attempts: 3,
            backoff: Duration::from_secs(1),
        }
    }
}

/// JSON-over-HTTP model server client.
#[derive(Debug)]
pub struct HttpBackend {
    config: HttpConfig,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, GenError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| GenError::Transport(e.to_string()))?;
        Ok(Self { config, client })
    }

    fn post<T: DeserializeOwned>(&self, body: &WireRequest<'_>, limit: u32) -> Result<Generation<T>, GenError> {
        let start = Instant::now();
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.send_once::<T>(body) {
                Ok(mut samples) => {
                    samples.truncate(limit as usize);
                    return Ok(Generation { samples, latency: start.elapsed() });
                }
                Err(GenError::Transport(msg)) if attempt < self.config.attempts => {
                    let delay = self.config.backoff * 2u32.pow(attempt - 1);
                    log::warn!("generation request failed ({msg}); retrying in {delay:?}");
                    thread::sleep(delay);
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn send_once<T: DeserializeOwned>(&self, body: &WireRequest<'_>) -> Result<Vec<T>, GenError> {
        let mut req = self.client.post(&self.config.endpoint).json(body);
        if let Some(token) = &self.config.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(classify)?;
        let status = resp.status();
        let text = resp.text().map_err(classify)?;
        if !status.is_success() {
            return Err(GenError::Rejected { status: status.as_u16(), message: text });
        }
        let parsed: WireResponse<T> = serde_json::from_str(&text).map_err(|e| GenError::Malformed(e.to_string()))?;
        Ok(parsed.samples)
    }
}

fn classify(e: reqwest::Error) -> GenError {
    if e.is_timeout() {
        GenError::Timeout
    } else {
        GenError::Transport(e.to_string())
    }
}

impl GenerationBackend for HttpBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<Generation<String>, GenError> {
        check_completion(req)?;
        self.post(&WireRequest::complete(req, self.config.completion_model.as_deref()), req.params.num_samples)
    }

    fn infill(&self, req: &InfillRequest) -> Result<Generation<Vec<String>>, GenError> {
        check_infill(req)?;
        self.post(&WireRequest::infill(req, self.config.infill_model.as_deref()), req.params.num_samples)
    }
}
