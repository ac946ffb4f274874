//! The evolutionary loop and campaign orchestration.

mod output;
mod report;
mod suite;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bandit::OperatorStats;
use crate::corpus::{ApiTarget, Provenance, SeedBank, TestProgram, Validity};
use crate::executor::{validity_of, Executor};
use crate::fitness;
use crate::genbackend::{postprocess, splice_samples, GenerationBackend, InfillRequest, Mode as PostMode, SamplingParams};
use crate::mutator::{applicable_operators, mutate};
use crate::oracle::{compare, Allowlist, BackendId, Finding, ToleranceSpec};
use crate::pyast::ProgramFacts;
use crate::seedgen::generate_seeds;

pub use output::{load_reports, render_summary, write_outputs, REPORTS_FILE, SUMMARY_FILE};
pub use report::{CampaignCounts, CampaignReport, Timing, TIMING_KEY};
pub use suite::{dedup_targets, run_suite};

/// Consecutive iterations without a backend call after which a campaign
/// gives up; without them the simulated clock would never advance.
const MAX_STALLS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Execution-based validity plus the differential oracle.
    #[default]
    Full,
    /// Seeds only, no mutation.
    SeedOnly,
    /// Validity from parsing and a static target call; nothing is executed.
    StaticOnly,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Full => "full",
            RunMode::SeedOnly => "seed-only",
            RunMode::StaticOnly => "static-only",
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(RunMode::Full),
            "seed-only" => Ok(RunMode::SeedOnly),
            "static-only" => Ok(RunMode::StaticOnly),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// How elapsed time is measured against the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockKind {
    /// Sum of reported backend latencies and execution times. Reproducible
    /// with a mock backend. Real time is still capped at the budget.
    #[default]
    Simulated,
    Wall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub budget_per_api: Duration,
    pub top_n: usize,
    pub seed_params: SamplingParams,
    pub mutant_params: SamplingParams,
    pub exec_timeout: Duration,
    pub tolerance: ToleranceSpec,
    pub rng_seed: u64,
    pub mode: RunMode,
    pub clock: ClockKind,
    /// Count regenerated duplicates as failures of the operator.
    pub dedup_reward: bool,
    pub allowlist: Allowlist,
    pub max_iterations: Option<u64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            budget_per_api: Duration::from_secs(60),
            top_n: 10,
            seed_params: SamplingParams::seed_default(),
            mutant_params: SamplingParams::infill_default(),
            exec_timeout: Duration::from_secs(10),
            tolerance: ToleranceSpec::default(),
            rng_seed: 0,
            mode: RunMode::Full,
            clock: ClockKind::Simulated,
            dedup_reward: true,
            allowlist: Allowlist::default(),
            max_iterations: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("top-n must be at least 1")]
    ZeroTopN,
    #[error("invalid tolerance (rtol {rtol}, atol {atol})")]
    Tolerance { rtol: f64, atol: f64 },
    #[error("{which} sampling parameters: {message}")]
    Sampling { which: &'static str, message: String },
    #[error("{0} mode needs an executor")]
    MissingExecutor(RunMode),
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.budget_per_api.is_zero() {
            return Err(ConfigError::NonPositive("budget"));
        }
        if self.exec_timeout.is_zero() {
            return Err(ConfigError::NonPositive("exec timeout"));
        }
        if self.top_n == 0 {
            return Err(ConfigError::ZeroTopN);
        }
        let ToleranceSpec { rtol, atol } = self.tolerance;
        if ToleranceSpec::new(rtol, atol).is_none() {
            return Err(ConfigError::Tolerance { rtol, atol });
        }
        for (which, p) in [("seed", &self.seed_params), ("mutant", &self.mutant_params)] {
            p.validate().map_err(|e| ConfigError::Sampling { which, message: e.to_string() })?;
        }
        Ok(())
    }

    /// Per-API generator, independent of scheduling order.
    pub fn rng_for(&self, target: &ApiTarget) -> ChaCha8Rng {
        let digest = Sha256::digest(target.qualified_name.as_bytes());
        let salt = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        ChaCha8Rng::seed_from_u64(self.rng_seed ^ salt)
    }
}

/// Final state of one campaign.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub report: CampaignReport,
    pub bank: SeedBank,
}

struct Clock {
    kind: ClockKind,
    start: Instant,
    simulated: Duration,
}

impl Clock {
    fn new(kind: ClockKind) -> Self {
        Self { kind, start: Instant::now(), simulated: Duration::ZERO }
    }

    fn charge(&mut self, d: Duration) {
        self.simulated += d;
    }

    fn within(&self, budget: Duration) -> bool {
        let real = self.start.elapsed();
        match self.kind {
            ClockKind::Simulated => self.simulated <= budget && real <= budget,
            ClockKind::Wall => real <= budget,
        }
    }
}

struct Campaigner<'a> {
    target: &'a ApiTarget,
    config: &'a CampaignConfig,
    executor: Option<&'a dyn Executor>,
    prefixes: Vec<String>,
    report: CampaignReport,
    clock: Clock,
}

impl Campaigner<'_> {
    /// Validity and fitness of a post-processed candidate.
    fn evaluate(&mut self, program: &mut TestProgram) {
        program.validity = match (self.config.mode, self.executor) {
            (RunMode::StaticOnly, _) | (RunMode::SeedOnly, None) => Validity::Valid,
            (_, Some(exec)) => {
                let r = exec.execute(program, BackendId::Cpu);
                self.report.timing.exec_ms += r.duration.as_millis() as u64;
                self.clock.charge(r.duration);
                validity_of(&r)
            }
            (RunMode::Full, None) => unreachable!("checked before the campaign starts"),
        };
        if program.validity.is_valid() {
            let t = Instant::now();
            match fitness::score(program.source(), &self.prefixes) {
                Ok(score) => program.fitness = score,
                Err(_) => program.validity = Validity::ParseError,
            }
            self.report.timing.analysis_ms += t.elapsed().as_millis() as u64;
        }
    }

    fn seed(&mut self, backend: &dyn GenerationBackend, bank: &mut SeedBank) {
        let t = Instant::now();
        let generation = generate_seeds(self.target, backend, self.config.seed_params);
        self.report.timing.backend_ms += t.elapsed().as_millis() as u64;
        if let Some(e) = &generation.error {
            self.report.counts.backend_errors += 1;
            self.report.notes.push(format!("seed generation failed: {e}"));
        }
        self.report.counts.seed_samples = generation.samples;
        self.report.counts.duplicates += generation.duplicates as u64;
        self.report.seed_rejections =
            generation.rejections.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect::<BTreeMap<_, _>>();
        for mut seed in generation.seeds {
            self.evaluate(&mut seed);
            if seed.validity.is_valid() {
                bank.insert(seed);
                self.report.counts.seeds_kept += 1;
            }
        }
    }

    /// One pass of the loop. Returns false when nothing reached the backend.
    fn iterate(
        &mut self,
        backend: &dyn GenerationBackend,
        bank: &mut SeedBank,
        stats: &mut OperatorStats,
        rejected: &mut HashSet<crate::corpus::NormHash>,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        let t = Instant::now();
        let parent = match bank.select_seed(self.config.top_n, rng) {
            Ok(p) => p.clone(),
            Err(_) => return false,
        };
        let Ok(facts) = ProgramFacts::analyze(parent.source(), &self.prefixes) else {
            return false;
        };
        let ops = applicable_operators(&parent, &facts);
        let Some(op) = stats.select_among(&ops, rng) else {
            self.report.counts.mutation_failures += 1;
            return false;
        };
        let masked = match mutate(op, &parent, &facts, rng) {
            Ok(m) => m,
            Err(e) => {
                log::debug!("{}: {op} failed on {}: {e}", self.target, parent.norm_hash());
                self.report.counts.mutation_failures += 1;
                return false;
            }
        };
        self.report.timing.analysis_ms += t.elapsed().as_millis() as u64;

        let request = InfillRequest::from_masked(&masked, self.config.mutant_params);
        let t = Instant::now();
        let result = backend.infill(&request);
        let real = t.elapsed();
        self.report.timing.backend_ms += real.as_millis() as u64;
        let generation = match result {
            Ok(g) => g,
            Err(e) => {
                log::warn!("{}: infill failed: {e}", self.target);
                self.report.counts.backend_errors += 1;
                self.clock.charge(real);
                return true;
            }
        };
        self.clock.charge(generation.latency);
        self.report.counts.samples_generated += generation.samples.len() as u64;

        let spliced = splice_samples(&masked, &generation.samples);
        let (mut valid, mut invalid, mut duplicates) = (0u64, (generation.samples.len() - spliced.len()) as u64, 0u64);
        for raw in spliced {
            let t = Instant::now();
            let cleaned = postprocess(&raw, PostMode::Mutant, self.target);
            self.report.timing.analysis_ms += t.elapsed().as_millis() as u64;
            let Ok(source) = cleaned else {
                invalid += 1;
                continue;
            };
            let mut program =
                TestProgram::new(source, self.target.clone(), Provenance::Mutant { operator: op, parent: parent.norm_hash() });
            let hash = program.norm_hash();
            if bank.contains(&hash) || rejected.contains(&hash) {
                duplicates += 1;
                continue;
            }
            self.evaluate(&mut program);
            if program.validity.is_valid() {
                bank.insert(program);
                valid += 1;
            } else {
                rejected.insert(hash);
                invalid += 1;
            }
        }
        self.report.counts.valid_unique += valid;
        self.report.counts.invalid += invalid;
        self.report.counts.duplicates += duplicates;
        let failures = if self.config.dedup_reward { invalid + duplicates } else { invalid };
        stats.update_posterior(op, valid, failures);
        true
    }

    fn differential(&mut self, bank: &SeedBank, executor: &dyn Executor) {
        let t = Instant::now();
        let (verdicts, findings) = differential(bank.iter(), executor, self.config.tolerance, &self.config.allowlist);
        self.report.timing.exec_ms += t.elapsed().as_millis() as u64;
        self.report.verdicts = verdicts;
        self.report.findings = findings;
    }
}

/// Runs both backends on each valid program and keeps the bug verdicts.
pub fn differential<'p>(
    programs: impl IntoIterator<Item = &'p TestProgram>,
    executor: &dyn Executor,
    tolerance: ToleranceSpec,
    allowlist: &Allowlist,
) -> (BTreeMap<String, usize>, Vec<Finding>) {
    let mut verdicts = BTreeMap::new();
    let mut findings = Vec::new();
    for program in programs.into_iter().filter(|p| p.validity.is_valid()) {
        let (cpu, accel) = executor.run_pair(program);
        let verdict = compare(&cpu, &accel, tolerance);
        *verdicts.entry(verdict.label().to_owned()).or_default() += 1;
        if verdict.is_bug() {
            let api = &program.target.qualified_name;
            findings.push(Finding::new(api, program.norm_hash().to_string(), verdict, allowlist));
        }
    }
    (verdicts, findings)
}

/// Generates seeds for `target`, then evolves them until the budget runs out.
pub fn run_campaign(
    target: &ApiTarget,
    config: &CampaignConfig,
    backend: &dyn GenerationBackend,
    executor: Option<&dyn Executor>,
) -> Result<Campaign, ConfigError> {
    config.validate()?;
    if config.mode == RunMode::Full && executor.is_none() {
        return Err(ConfigError::MissingExecutor(config.mode));
    }
    let wall = Instant::now();
    let mut rng = config.rng_for(target);
    let mut bank = SeedBank::new();
    let mut stats = OperatorStats::init_prior();
    let mut rejected = HashSet::new();
    let mut c = Campaigner {
        target,
        config,
        executor,
        prefixes: target.library_prefixes(),
        report: CampaignReport::new(target, config),
        clock: Clock::new(config.clock),
    };

    c.seed(backend, &mut bank);
    if bank.valid_len() == 0 {
        c.report.notes.push("no seeds".into());
    }

    c.clock = Clock::new(config.clock);
    let mut stalls = 0;
    if config.mode != RunMode::SeedOnly && bank.valid_len() > 0 {
        while c.clock.within(config.budget_per_api) {
            if config.max_iterations.is_some_and(|m| c.report.counts.iterations >= m) {
                break;
            }
            c.report.counts.iterations += 1;
            let before = bank.len();
            if c.iterate(backend, &mut bank, &mut stats, &mut rejected, &mut rng) {
                stalls = 0;
            } else {
                stalls += 1;
                if stalls >= MAX_STALLS {
                    c.report.notes.push(format!("stopped after {MAX_STALLS} iterations without a mutation"));
                    break;
                }
            }
            debug_assert!(bank.len() >= before);
        }
    }
    c.report.timing.simulated_ms = c.clock.simulated.as_millis() as u64;

    if let (RunMode::Full, Some(exec)) = (config.mode, executor) {
        c.differential(&bank, exec);
    }
    c.report.counts.bank_size = bank.len() as u64;
    c.report.operators = stats.snapshot();
    c.report.timing.wall_ms = wall.elapsed().as_millis() as u64;
    Ok(Campaign { report: c.report, bank })
}
