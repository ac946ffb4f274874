use std::any::Any;
use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::{run_campaign, Campaign, CampaignConfig, CampaignReport, ConfigError};
use crate::corpus::{ApiTarget, SeedBank};
use crate::executor::Executor;
use crate::genbackend::GenerationBackend;

/// Drops repeated API names, keeping the first occurrence, and sorts by name.
pub fn dedup_targets(targets: &[ApiTarget]) -> Vec<ApiTarget> {
    let mut seen = HashSet::new();
    let mut out: Vec<ApiTarget> = targets
        .iter()
        .filter(|t| {
            let fresh = seen.insert(t.qualified_name.as_str());
            if !fresh {
                log::warn!("duplicate API {} ignored", t.qualified_name);
            }
            fresh
        })
        .cloned()
        .collect();
    out.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
    out
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| (*s).to_owned())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Runs one campaign per distinct target on at most `parallelism` workers.
/// Campaigns come back ordered by API name; a panicking campaign yields an
/// empty report with a note instead of taking the suite down.
pub fn run_suite(
    targets: &[ApiTarget],
    config: &CampaignConfig,
    parallelism: usize,
    backend: &dyn GenerationBackend,
    executor: Option<&dyn Executor>,
) -> Result<Vec<Campaign>, ConfigError> {
    if parallelism == 0 {
        return Err(ConfigError::NonPositive("parallelism"));
    }
    config.validate()?;
    let targets = dedup_targets(targets);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Campaign, ConfigError>>>> = Mutex::new((0..targets.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..parallelism.min(targets.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(target) = targets.get(i) else { break };
                let outcome = panic::catch_unwind(AssertUnwindSafe(|| run_campaign(target, config, backend, executor)))
                    .unwrap_or_else(|payload| {
                        let message = panic_message(payload.as_ref());
                        log::error!("{target}: campaign panicked: {message}");
                        let mut report = CampaignReport::new(target, config);
                        report.notes.push(format!("campaign panicked: {message}"));
                        Ok(Campaign { report, bank: SeedBank::new() })
                    });
                results.lock().expect("no worker panics while holding the lock")[i] = Some(outcome);
            });
        }
    });
    results.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every target ran")).collect()
}
