use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CampaignConfig, RunMode};
use crate::bandit::OperatorSnapshot;
use crate::corpus::{ApiTarget, Library};
use crate::oracle::{Finding, ToleranceSpec};

/// Key of the only report field that varies between identical runs.
pub const TIMING_KEY: &str = "timing";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignCounts {
    /// Raw seed completions returned by the backend.
    pub seed_samples: usize,
    pub seeds_kept: u64,
    pub iterations: u64,
    /// Infill samples returned by the backend.
    pub samples_generated: u64,
    /// New valid mutants added to the bank.
    pub valid_unique: u64,
    pub invalid: u64,
    pub duplicates: u64,
    pub backend_errors: u64,
    pub mutation_failures: u64,
    pub bank_size: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub backend_ms: u64,
    pub exec_ms: u64,
    pub analysis_ms: u64,
    pub simulated_ms: u64,
    pub wall_ms: u64,
}

/// Everything a campaign reports, one JSON line per API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub api: String,
    pub library: Library,
    pub mode: RunMode,
    pub rng_seed: u64,
    pub budget_ms: u64,
    pub tolerance: ToleranceSpec,
    pub counts: CampaignCounts,
    #[serde(default)]
    pub seed_rejections: BTreeMap<String, usize>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub operators: Vec<OperatorSnapshot>,
    #[serde(default)]
    pub verdicts: BTreeMap<String, usize>,
    #[serde(default)]
    pub findings: Vec<Finding>,
    pub timing: Timing,
}

impl CampaignReport {
    pub fn new(target: &ApiTarget, config: &CampaignConfig) -> Self {
        Self {
            api: target.qualified_name.clone(),
            library: target.library,
            mode: config.mode,
            rng_seed: config.rng_seed,
            budget_ms: config.budget_per_api.as_millis() as u64,
            tolerance: config.tolerance,
            counts: CampaignCounts::default(),
            seed_rejections: BTreeMap::new(),
            notes: Vec::new(),
            operators: Vec::new(),
            verdicts: BTreeMap::new(),
            findings: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn reportable_findings(&self) -> usize {
        self.findings.iter().filter(|f| f.is_reportable()).count()
    }
}
