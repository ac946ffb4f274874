//! Step-by-step seed prompts and seed synthesis.

mod catalog;

use std::collections::BTreeMap;
use std::time::Duration;

use crate::corpus::{ApiTarget, Library, Provenance, TestProgram};
use crate::genbackend::{postprocess, CompletionRequest, GenError, GenerationBackend, Mode, SamplingParams};

pub use catalog::{infer_library, load_catalog, parse_catalog, CatalogError, CatalogRecord};

/// Name of the library as written in the prompt.
pub fn display_name(target: &ApiTarget) -> &str {
    match target.library {
        Library::TorchLike => "PyTorch",
        Library::TensorflowLike => "TensorFlow",
        Library::Generic => target.root(),
    }
}

/// Import statement that starts the generation.
pub fn import_line(target: &ApiTarget) -> String {
    match target.root() {
        "tf" => "import tensorflow as tf".to_owned(),
        "np" => "import numpy as np".to_owned(),
        root => format!("import {root}"),
    }
}

/// Prompt asking for a program that imports the library, builds inputs and
/// calls the target API. Falls back to the bare name without a signature.
pub fn build_prompt(target: &ApiTarget) -> String {
    let api = if target.signature.is_empty() { &target.qualified_name } else { &target.signature };
    format!(
        "\"\"\"\nTask 1: import {}\nTask 2: generate input data\nTask 3: call the API {api}\n\"\"\"\n{}\n",
        display_name(target),
        import_line(target),
    )
}

/// Outcome of seed synthesis for one API.
#[derive(Debug, Clone, Default)]
pub struct SeedGeneration {
    /// Unique surviving programs, in sample order.
    pub seeds: Vec<TestProgram>,
    pub samples: usize,
    pub duplicates: usize,
    /// Count per rejection reason.
    pub rejections: BTreeMap<&'static str, usize>,
    pub latency: Duration,
    pub error: Option<GenError>,
}

/// Samples completions of the prompt and keeps the ones that survive
/// post-processing, once each.
pub fn generate_seeds(target: &ApiTarget, backend: &dyn GenerationBackend, params: SamplingParams) -> SeedGeneration {
    let prompt = build_prompt(target);
    let mut out = SeedGeneration::default();
    let generation = match backend.complete(&CompletionRequest { prompt: prompt.clone(), params }) {
        Ok(g) => g,
        Err(e) => {
            log::warn!("{target}: seed generation failed: {e}");
            out.error = Some(e);
            return out;
        }
    };
    out.samples = generation.samples.len();
    out.latency = generation.latency;
    let mut seen = std::collections::HashSet::new();
    for completion in generation.samples {
        let raw = if completion.starts_with(&prompt) { completion } else { format!("{prompt}{completion}") };
        match postprocess(&raw, Mode::Seed, target) {
            Ok(source) => {
                let program = TestProgram::new(source, target.clone(), Provenance::Seed);
                if seen.insert(program.norm_hash()) {
                    out.seeds.push(program);
                } else {
                    out.duplicates += 1;
                }
            }
            Err(reason) => *out.rejections.entry(reason.as_str()).or_default() += 1,
        }
    }
    out
}
