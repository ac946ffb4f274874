use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{CorpusError, NormHash, TestProgram};

type IndexKey = (Reverse<i64>, Reverse<u64>);

/// Deduplicated store of every program seen by one campaign.
///
/// Only valid programs are eligible as mutation parents; the rest are kept
/// so that re-generated duplicates of them are still recognized.
#[derive(Debug, Default, Clone)]
pub struct SeedBank {
    entries: HashMap<NormHash, TestProgram>,
    order: Vec<NormHash>,
    index: BTreeMap<IndexKey, NormHash>,
}

impl SeedBank {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `program` unless a program with the same normalized hash is
    /// already present. Returns whether it was added.
    pub fn insert(&mut self, program: TestProgram) -> bool {
        let hash = program.norm_hash();
        if self.entries.contains_key(&hash) {
            return false;
        }
        let seq = self.order.len() as u64;
        if program.validity.is_valid() {
            self.index.insert((Reverse(program.fitness.total()), Reverse(seq)), hash);
        }
        self.order.push(hash);
        self.entries.insert(hash, program);
        true
    }

    pub fn contains(&self, hash: &NormHash) -> bool {
        self.entries.contains_key(hash)
    }

    pub fn get(&self, hash: &NormHash) -> Option<&TestProgram> {
        self.entries.get(hash)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn valid_len(&self) -> usize {
        self.index.len()
    }

    /// All programs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &TestProgram> + '_ {
        self.order.iter().map(|h| &self.entries[h])
    }

    /// Valid programs, best fitness first, newest first among equals.
    pub fn by_fitness(&self) -> impl Iterator<Item = &TestProgram> + '_ {
        self.index.values().map(|h| &self.entries[h])
    }

    /// Samples a parent from the `top_n` fittest valid programs with
    /// probability proportional to `exp(total)`.
    pub fn select_seed<R: Rng + ?Sized>(&self, top_n: usize, rng: &mut R) -> Result<&TestProgram, CorpusError> {
        if top_n == 0 {
            return Err(CorpusError::ZeroTopN);
        }
        let candidates: Vec<&TestProgram> = self.by_fitness().take(top_n).collect();
        let Some(best) = candidates.first() else {
            return Err(CorpusError::EmptyBank);
        };
        let max = best.fitness.total() as f64;
        let weights = candidates.iter().map(|p| (p.fitness.total() as f64 - max).exp());
        let dist = WeightedIndex::new(weights).expect("the best candidate has weight 1");
        Ok(candidates[dist.sample(rng)])
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::corpus::{ApiTarget, FitnessScore, Library, Provenance, Validity};

    fn program(src: &str, total: u32, validity: Validity) -> TestProgram {
        let target = ApiTarget::new(Library::TorchLike, "torch.abs", "").unwrap();
        let mut p = TestProgram::new(src, target, Provenance::Seed);
        p.fitness = FitnessScore::new(0, total, 0);
        p.validity = validity;
        p
    }

    #[test]
    fn insert_deduplicates_by_normalized_hash() {
        let mut bank = SeedBank::new();
        assert!(bank.insert(program("x = torch.abs(a)", 1, Validity::Valid)));
        assert_eq!(bank.len(), 1);
        assert!(!bank.insert(program("x = torch.abs(a)", 1, Validity::Valid)));
        assert!(!bank.insert(program("x = torch.abs(a)   # again\n\n", 1, Validity::Valid)));
        assert_eq!(bank.len(), 1);
    }

    #[test]
    fn invalid_programs_are_kept_but_not_indexed() {
        let mut bank = SeedBank::new();
        bank.insert(program("a", 9, Validity::RuntimeError));
        assert_eq!(bank.len(), 1);
        assert_eq!(bank.valid_len(), 0);
        assert!(matches!(bank.select_seed(10, &mut ChaCha8Rng::seed_from_u64(0)), Err(CorpusError::EmptyBank)));
    }

    #[test]
    fn index_prefers_fitness_then_recency() {
        let mut bank = SeedBank::new();
        bank.insert(program("a", 2, Validity::Valid));
        bank.insert(program("b", 5, Validity::Valid));
        bank.insert(program("c", 2, Validity::Valid));
        let order: Vec<_> = bank.by_fitness().map(|p| p.source()).collect();
        assert_eq!(order, ["b", "c", "a"]);
        let order: Vec<_> = bank.iter().map(|p| p.source()).collect();
        assert_eq!(order, ["a", "b", "c"]);
    }

    #[test]
    fn top_one_is_always_the_best() {
        let mut bank = SeedBank::new();
        for (i, s) in ["a", "b", "c", "d"].into_iter().enumerate() {
            bank.insert(program(s, i as u32, Validity::Valid));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            assert_eq!(bank.select_seed(1, &mut rng).unwrap().source(), "d");
        }
        assert!(matches!(bank.select_seed(0, &mut rng), Err(CorpusError::ZeroTopN)));
    }
}
