//! Signature catalog: one JSON object per line, `{name, signature, library}`.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::{ApiTarget, CorpusError, Library};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog line {line}: {message}")]
    Line { line: usize, message: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct CatalogRecord {
    pub name: String,
    #[serde(default)]
    pub signature: String,
    #[serde(default)]
    pub library: Option<Library>,
}

/// Library family implied by an API's root module.
pub fn infer_library(qualified_name: &str) -> Library {
    match qualified_name.split('.').next() {
        Some("torch") => Library::TorchLike,
        Some("tf" | "tensorflow") => Library::TensorflowLike,
        _ => Library::Generic,
    }
}

pub fn parse_catalog(text: &str) -> Result<Vec<ApiTarget>, CatalogError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| CatalogError::Line { line: i + 1, message };
        let record: CatalogRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let library = record.library.unwrap_or_else(|| infer_library(&record.name));
        let target =
            ApiTarget::new(library, record.name, record.signature).map_err(|e: CorpusError| err(e.to_string()))?;
        out.push(target);
    }
    Ok(out)
}

pub fn load_catalog(path: &Path) -> Result<Vec<ApiTarget>, CatalogError> {
    parse_catalog(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_records() {
        let text = r#"{"name": "torch.abs", "signature": "torch.abs(input, *, out=None)", "library": "torch-like"}

{"name": "tf.nn.conv2d", "signature": "tf.nn.conv2d(input, filters, strides, padding)"}
{"name": "fakelib.add"}"#;
        let targets = parse_catalog(text).unwrap();
        assert_eq!(targets.len(), 3);
        assert_eq!(targets[0].library, Library::TorchLike);
        assert_eq!(targets[1].library, Library::TensorflowLike);
        assert_eq!(targets[2].library, Library::Generic);
        assert_eq!(targets[2].signature, "");
    }

    #[test]
    fn reports_bad_lines() {
        let err = parse_catalog("{\"name\": \"torch.abs\"}\n{\"name\": \"torch abs\"}").unwrap_err();
        assert!(matches!(err, CatalogError::Line { line: 2, .. }), "{err}");
    }
}
