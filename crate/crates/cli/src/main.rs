//! Command-line driver: seed generation, fuzzing campaigns, differential
//! re-checks of stored corpora and report summaries.
//!
//! Exit status is 0 when the run completed, 1 on configuration errors and 2
//! when reportable findings were produced.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use evofuzz_core::corpus::{load_corpus, ApiTarget, MANIFEST_FILE};
use evofuzz_core::engine::{
    self, load_reports, render_summary, run_suite, write_outputs, CampaignConfig, ClockKind, RunMode, REPORTS_FILE,
};
use evofuzz_core::executor::{Executor, ShimConfig, ShimExecutor};
use evofuzz_core::genbackend::{GenerationBackend, HttpBackend, HttpConfig, MockBackend};
use evofuzz_core::oracle::{Allowlist, Finding, ToleranceSpec};
use evofuzz_core::seedgen::{infer_library, load_catalog};

const EXIT_CONFIG: u8 = 1;
const EXIT_FINDINGS: u8 = 2;
const ORACLE_FILE: &str = "oracle.jsonl";

#[derive(Parser)]
#[command(name = "evofuzz", version, about = "Evolutionary LLM-guided fuzzing of Python library APIs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seed programs only.
    Seed(CampaignArgs),
    /// Generate seeds, then evolve them.
    Fuzz(CampaignArgs),
    /// Re-run differential checks on a stored corpus.
    Oracle(OracleArgs),
    /// Summarize the reports in an output directory.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Mock,
    Http,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    SeedOnly,
    StaticOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Simulated,
    Wall,
}

#[derive(Args)]
struct ShimArgs {
    /// Executor command, split on whitespace (e.g. "python3 shim.py").
    #[arg(long)]
    shim: Option<String>,
    /// Seconds before a program run is killed.
    #[arg(long, default_value_t = 10.0)]
    exec_timeout: f64,
    #[arg(long, default_value_t = 1e-3)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-6)]
    atol: f64,
    /// API names whose findings are informational, one per line.
    #[arg(long)]
    allowlist: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Args)]
struct CampaignArgs {
    /// JSONL catalog of {name, signature, library} records.
    #[arg(long)]
    api_catalog: Option<PathBuf>,
    /// File with one API per line, or a comma-separated list of names.
    #[arg(long)]
    apis: Option<String>,
    /// Seconds of fuzzing per API.
    #[arg(long, default_value_t = 60.0)]
    budget_per_api: f64,
    #[arg(long, default_value_t = 25)]
    seeds_per_api: u32,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    #[arg(long, default_value_t = 5)]
    infill_samples: u32,
    #[arg(long, value_enum, default_value = "mock")]
    backend: BackendKind,
    #[arg(long)]
    endpoint: Option<String>,
    /// Bearer token for the HTTP backend.
    #[arg(long, env = "EVOFUZZ_TOKEN", hide_env_values = true)]
    token: Option<String>,
    /// Directory of recorded responses for the mock backend.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "simulated")]
    clock: ClockArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    #[command(flatten)]
    shim: ShimArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// A corpus directory, or an output directory holding one per API.
    #[arg(long)]
    corpus: PathBuf,
    /// Where to write the verdicts; defaults to the corpus directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shim: ShimArgs,
}

fn seconds(name: &str, s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).ok().filter(|d| !d.is_zero()).with_context(|| format!("{name} must be positive, got {s}"))
}

impl ShimArgs {
    fn tolerance(&self) -> Result<ToleranceSpec> {
        ToleranceSpec::new(self.rtol, self.atol).context("rtol and atol must be non-negative")
    }

    fn allowlist(&self) -> Result<Allowlist> {
        match &self.allowlist {
            Some(p) => Allowlist::load(p).with_context(|| format!("reading allowlist {}", p.display())),
            None => Ok(Allowlist::default()),
        }
    }

    fn executor(&self) -> Result<Option<ShimExecutor>> {
        let Some(cmd) = &self.shim else { return Ok(None) };
        let command: Vec<String> = cmd.split_whitespace().map(str::to_owned).collect();
        if command.is_empty() {
            bail!("--shim is empty");
        }
        let mut config = ShimConfig::new(command);
        config.timeout = seconds("--exec-timeout", self.exec_timeout)?;
        config.rng_seed = self.rng_seed;
        Ok(Some(ShimExecutor::new(config)))
    }
}

fn resolve_targets(args: &CampaignArgs) -> Result<Vec<ApiTarget>> {
    let catalog = match &args.api_catalog {
        Some(p) => load_catalog(p).with_context(|| format!("loading catalog {}", p.display()))?,
        None => Vec::new(),
    };
    let Some(apis) = &args.apis else {
        if catalog.is_empty() {
            bail!("no APIs given: pass --apis or a non-empty --api-catalog");
        }
        return Ok(catalog);
    };
    let names: Vec<String> = if Path::new(apis).is_file() {
        std::fs::read_to_string(apis)
            .with_context(|| format!("reading {apis}"))?
            .lines()
            .map(|l| l.split('#').next().unwrap_or_default().trim().to_owned())
            .filter(|l| !l.is_empty())
            .collect()
    } else {
        apis.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect()
    };
    names
        .into_iter()
        .map(|name| match catalog.iter().find(|t| t.qualified_name == name) {
            Some(t) => Ok(t.clone()),
            None => ApiTarget::new(infer_library(&name), name.clone(), "").with_context(|| format!("API {name:?}")),
        })
        .collect()
}

fn backend(args: &CampaignArgs) -> Result<Box<dyn GenerationBackend>> {
    match args.backend {
        BackendKind::Mock => {
            let mock = match &args.fixtures {
                Some(dir) => MockBackend::load(dir).with_context(|| format!("loading fixtures from {}", dir.display()))?,
                None => {
                    log::warn!("mock backend without --fixtures returns no seeds");
                    MockBackend::new()
                }
            };
            Ok(Box::new(mock))
        }
        BackendKind::Http => {
            let endpoint = args.endpoint.as_deref().context("--backend http needs --endpoint")?;
            let mut config = HttpConfig::new(endpoint);
            config.token = args.token.clone();
            Ok(Box::new(HttpBackend::new(config).context("building HTTP client")?))
        }
    }
}

fn campaign_config(args: &CampaignArgs, mode: RunMode) -> Result<CampaignConfig> {
    let mut config = CampaignConfig {
        budget_per_api: seconds("--budget-per-api", args.budget_per_api)?,
        top_n: args.top_n,
        exec_timeout: seconds("--exec-timeout", args.shim.exec_timeout)?,
        tolerance: args.shim.tolerance()?,
        rng_seed: args.shim.rng_seed,
        mode,
        clock: match args.clock {
            ClockArg::Simulated => ClockKind::Simulated,
            ClockArg::Wall => ClockKind::Wall,
        },
        allowlist: args.shim.allowlist()?,
        ..CampaignConfig::default()
    };
    config.seed_params.num_samples = args.seeds_per_api;
    config.mutant_params.num_samples = args.infill_samples;
    config.validate()?;
    Ok(config)
}

fn run_campaigns(args: &CampaignArgs, seed_only: bool) -> Result<u8> {
    let mode = match (seed_only, args.mode) {
        (true, _) => RunMode::SeedOnly,
        (false, None | Some(ModeArg::Full)) => RunMode::Full,
        (false, Some(ModeArg::SeedOnly)) => RunMode::SeedOnly,
        (false, Some(ModeArg::StaticOnly)) => RunMode::StaticOnly,
    };
    let config = campaign_config(args, mode)?;
    let targets = resolve_targets(args)?;
    let backend = backend(args)?;
    let executor = args.shim.executor()?;
    if mode == RunMode::Full && executor.is_none() {
        bail!("full mode needs --shim; use --mode static-only to fuzz without executing");
    }
    let exec = executor.as_ref().map(|e| e as &dyn Executor);
    let campaigns = run_suite(&targets, &config, args.parallelism, backend.as_ref(), exec)?;
    write_outputs(&args.out, &campaigns).with_context(|| format!("writing {}", args.out.display()))?;
    let reports: Vec<_> = campaigns.iter().map(|c| c.report.clone()).collect();
    print!("{}", render_summary(&reports));
    let findings: usize = reports.iter().map(|r| r.reportable_findings()).sum();
    Ok(if findings > 0 { EXIT_FINDINGS } else { 0 })
}

fn corpus_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    if root.join(MANIFEST_FILE).is_file() {
        return Ok(vec![root.to_owned()]);
    }
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .with_context(|| format!("reading {}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(MANIFEST_FILE).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        bail!("no corpus under {}", root.display());
    }
    Ok(dirs)
}

fn run_oracle(args: &OracleArgs) -> Result<u8> {
    let executor = args.shim.executor()?.context("oracle needs --shim")?;
    let tolerance = args.shim.tolerance()?;
    let allowlist = args.shim.allowlist()?;
    let mut findings: Vec<Finding> = Vec::new();
    for dir in corpus_dirs(&args.corpus)? {
        let programs = load_corpus(&dir)
            .with_context(|| format!("loading {}", dir.display()))?
            .iter()
            .map(|s| s.to_program())
            .collect::<Result<Vec<_>, _>>()?;
        let (verdicts, found) = engine::differential(&programs, &executor, tolerance, &allowlist);
        println!("{}: {verdicts:?}", dir.display());
        findings.extend(found);
    }
    let out = args.out.as_deref().unwrap_or(&args.corpus);
    std::fs::create_dir_all(out)?;
    let lines: String = findings.iter().map(|f| serde_json::to_string(f).expect("findings serialize") + "\n").collect();
    std::fs::write(out.join(ORACLE_FILE), lines)?;
    let reportable = findings.iter().filter(|f| f.is_reportable()).count();
    println!("{} findings, {reportable} reportable", findings.len());
    Ok(if reportable > 0 { EXIT_FINDINGS } else { 0 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Seed(args) => run_campaigns(&args, true),
        Command::Fuzz(args) => run_campaigns(&args, false),
        Command::Oracle(args) => run_oracle(&args),
        Command::Report { out } => {
            let path = out.join(REPORTS_FILE);
            let reports = load_reports(&path).with_context(|| format!("reading {}", path.display()))?;
            print!("{}", render_summary(&reports));
            Ok(if reports.iter().any(|r| r.reportable_findings() > 0) { EXIT_FINDINGS } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
