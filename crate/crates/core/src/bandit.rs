//! Beta-Bernoulli Thompson sampling over mutation operators.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::mutator::OperatorId;

/// Posterior of one arm: `Beta(s, f)` with `s = 1 + successes` and
/// `f = 1 + failures`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaArm {
    pub s: u64,
    pub f: u64,
    pub pulls: u64,
}

impl Default for BetaArm {
    fn default() -> Self {
        Self { s: 1, f: 1, pulls: 0 }
    }
}

impl BetaArm {
    pub fn mean(&self) -> f64 {
        self.s as f64 / (self.s + self.f) as f64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Beta::new(self.s as f64, self.f as f64).expect("s, f >= 1").sample(rng)
    }
}

/// Thompson sampler over a fixed number of arms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThompsonSampler {
    arms: Vec<BetaArm>,
}

impl ThompsonSampler {
    /// Every arm starts at the uniform `Beta(1, 1)` prior.
    pub fn new(arms: usize) -> Self {
        Self { arms: vec![BetaArm::default(); arms] }
    }

    pub fn arms(&self) -> &[BetaArm] {
        &self.arms
    }

    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let all: Vec<usize> = (0..self.arms.len()).collect();
        self.select_among(&all, rng).expect("sampler has at least one arm")
    }

    /// Draws one `theta` per candidate arm and plays the largest.
    pub fn select_among<R: Rng + ?Sized>(&self, candidates: &[usize], rng: &mut R) -> Option<usize> {
        self.select_with(candidates, |arm| arm.sample(rng))
    }

    /// Argmax of `draw` over `candidates`; ties go to the earliest candidate.
    pub fn select_with(&self, candidates: &[usize], mut draw: impl FnMut(&BetaArm) -> f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &i in candidates {
            let theta = draw(&self.arms[i]);
            if best.is_none_or(|(_, b)| theta > b) {
                best = Some((i, theta));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn update(&mut self, arm: usize, successes: u64, failures: u64) {
        let a = &mut self.arms[arm];
        a.s += successes;
        a.f += failures;
        a.pulls += 1;
    }
}

/// One row of the bandit snapshot in campaign reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSnapshot {
    pub operator: OperatorId,
    pub operator_id: u8,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "F")]
    pub f: u64,
    pub pulls: u64,
}

/// Posterior state of every mutation operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorStats {
    sampler: ThompsonSampler,
}

impl Default for OperatorStats {
    fn default() -> Self {
        Self::init_prior()
    }
}

impl OperatorStats {
    pub fn init_prior() -> Self {
        Self { sampler: ThompsonSampler::new(OperatorId::ALL.len()) }
    }

    pub fn get(&self, op: OperatorId) -> BetaArm {
        self.sampler.arms()[usize::from(op.code())]
    }

    pub fn select_operator<R: Rng + ?Sized>(&self, rng: &mut R) -> OperatorId {
        self.select_among(&OperatorId::ALL, rng).expect("non-empty operator set")
    }

    /// Thompson selection restricted to `ops`.
    pub fn select_among<R: Rng + ?Sized>(&self, ops: &[OperatorId], rng: &mut R) -> Option<OperatorId> {
        let idx: Vec<usize> = ops.iter().map(|o| usize::from(o.code())).collect();
        self.sampler.select_among(&idx, rng).map(OperatorId::from_index)
    }

    pub fn select_with(&self, ops: &[OperatorId], draw: impl FnMut(&BetaArm) -> f64) -> Option<OperatorId> {
        let idx: Vec<usize> = ops.iter().map(|o| usize::from(o.code())).collect();
        self.sampler.select_with(&idx, draw).map(OperatorId::from_index)
    }

    pub fn update_posterior(&mut self, op: OperatorId, num_valid: u64, num_invalid: u64) {
        self.sampler.update(usize::from(op.code()), num_valid, num_invalid);
    }

    pub fn snapshot(&self) -> Vec<OperatorSnapshot> {
        OperatorId::ALL
            .iter()
            .map(|&op| {
                let a = self.get(op);
                OperatorSnapshot { operator: op, operator_id: op.code(), s: a.s, f: a.f, pulls: a.pulls }
            })
            .collect()
    }
}
