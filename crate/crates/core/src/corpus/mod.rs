//! Program records, deduplication and the fitness-indexed seed bank.

mod bank;
mod normalize;
mod store;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mutator::OperatorId;

pub use bank::SeedBank;
pub use normalize::normalize;
pub use store::{load_corpus, write_corpus, ManifestRecord, ProvenanceKind, StoredProgram, MANIFEST_FILE};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid API name {0:?}")]
    InvalidApiName(String),
    #[error("signature {signature:?} does not start with {name:?}")]
    SignatureMismatch { name: String, signature: String },
    #[error("seed bank has no valid entries")]
    EmptyBank,
    #[error("top_n must be at least 1")]
    ZeroTopN,
    #[error("invalid hash {0:?}")]
    InvalidHash(String),
    #[error("corpus I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest line {line}: {source}")]
    Manifest { line: usize, source: serde_json::Error },
}

/// Library family an API belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Library {
    #[serde(alias = "torch", alias = "pytorch")]
    TorchLike,
    #[serde(alias = "tf", alias = "tensorflow")]
    TensorflowLike,
    Generic,
}

/// The API a campaign centers on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApiTarget {
    pub library: Library,
    pub qualified_name: String,
    /// Signature as published in the library docs; may be empty.
    #[serde(default)]
    pub signature: String,
}

impl ApiTarget {
    pub fn new(library: Library, qualified_name: impl Into<String>, signature: impl Into<String>) -> Result<Self, CorpusError> {
        let qualified_name = qualified_name.into();
        let signature = signature.into().trim().to_owned();
        if qualified_name.is_empty()
            || qualified_name.chars().any(char::is_whitespace)
            || qualified_name.split('.').any(str::is_empty)
        {
            return Err(CorpusError::InvalidApiName(qualified_name));
        }
        let last = qualified_name.rsplit('.').next().unwrap_or_default();
        if !signature.is_empty() && !signature.starts_with(&qualified_name) && !signature.starts_with(last) {
            return Err(CorpusError::SignatureMismatch { name: qualified_name, signature });
        }
        Ok(Self { library, qualified_name, signature })
    }

    /// First dotted component, e.g. `tf` for `tf.nn.conv2d`.
    pub fn root(&self) -> &str {
        self.qualified_name.split('.').next().unwrap_or_default()
    }

    /// Names that mark a call as a library call.
    pub fn library_prefixes(&self) -> Vec<String> {
        vec![self.root().to_owned()]
    }
}

impl fmt::Display for ApiTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified_name)
    }
}

/// SHA-256 of the normalized program text.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormHash(pub [u8; 32]);

impl NormHash {
    pub fn of_source(source: &str) -> Self {
        let digest = Sha256::digest(normalize(source).as_bytes());
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        Self(out)
    }
}

impl fmt::Display for NormHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for NormHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormHash({})", &hex::encode(self.0)[..12])
    }
}

impl FromStr for NormHash {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = hex::decode(s).map_err(|_| CorpusError::InvalidHash(s.to_owned()))?;
        let arr: [u8; 32] = bytes.try_into().map_err(|_| CorpusError::InvalidHash(s.to_owned()))?;
        Ok(Self(arr))
    }
}

impl Serialize for NormHash {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormHash {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `D + U - R` and its components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFitness")]
pub struct FitnessScore {
    /// Longest dataflow path, in edges.
    depth: u32,
    /// Distinct library APIs called.
    unique_calls: u32,
    /// Library calls repeating an earlier (API, arguments) pair.
    repeats: u32,
    total: i64,
}

#[derive(Deserialize)]
struct RawFitness {
    depth: u32,
    unique_calls: u32,
    repeats: u32,
    total: i64,
}

impl TryFrom<RawFitness> for FitnessScore {
    type Error = String;

    fn try_from(raw: RawFitness) -> Result<Self, String> {
        let score = FitnessScore::new(raw.depth, raw.unique_calls, raw.repeats);
        if score.total != raw.total {
            return Err(format!("total {} != D + U - R = {}", raw.total, score.total));
        }
        Ok(score)
    }
}

impl FitnessScore {
    pub fn new(depth: u32, unique_calls: u32, repeats: u32) -> Self {
        Self { depth, unique_calls, repeats, total: i64::from(depth) + i64::from(unique_calls) - i64::from(repeats) }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn unique_calls(&self) -> u32 {
        self.unique_calls
    }

    pub fn repeats(&self) -> u32 {
        self.repeats
    }

    pub fn total(&self) -> i64 {
        self.total
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    #[default]
    Unknown,
    ParseError,
    RuntimeError,
    ValidNoTargetCall,
    Valid,
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Seed,
    Mutant { operator: OperatorId, parent: NormHash },
}

impl Provenance {
    pub fn parent(&self) -> Option<NormHash> {
        match self {
            Provenance::Seed => None,
            Provenance::Mutant { parent, .. } => Some(*parent),
        }
    }
}

/// A candidate program and everything known about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestProgram {
    source: String,
    norm_hash: NormHash,
    pub target: ApiTarget,
    pub fitness: FitnessScore,
    pub validity: Validity,
    pub provenance: Provenance,
}

impl TestProgram {
    pub fn new(source: impl Into<String>, target: ApiTarget, provenance: Provenance) -> Self {
        let source = source.into();
        let norm_hash = NormHash::of_source(&source);
        Self { source, norm_hash, target, fitness: FitnessScore::default(), validity: Validity::Unknown, provenance }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn norm_hash(&self) -> NormHash {
        self.norm_hash
    }
}

/// Orders by total fitness, best first.
pub fn compare_fitness(a: &FitnessScore, b: &FitnessScore) -> Ordering {
    b.total.cmp(&a.total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn api_target_invariants() {
        assert!(ApiTarget::new(Library::TensorflowLike, "tf.nn.conv2d", "tf.nn.conv2d(input, filters, ...)").is_ok());
        assert!(ApiTarget::new(Library::TensorflowLike, "tf.nn.conv2d", "conv2d(input, filters)").is_ok());
        assert!(ApiTarget::new(Library::TorchLike, "torch.mm", "").is_ok());
        assert!(matches!(ApiTarget::new(Library::TorchLike, "", ""), Err(CorpusError::InvalidApiName(_))));
        assert!(matches!(ApiTarget::new(Library::TorchLike, "torch mm", ""), Err(CorpusError::InvalidApiName(_))));
        assert!(matches!(ApiTarget::new(Library::TorchLike, "torch.mm", "add(x)"), Err(CorpusError::SignatureMismatch { .. })));
    }

    #[test]
    fn library_parses_aliases() {
        let t: ApiTarget = serde_json::from_str(r#"{"library":"torch","qualified_name":"torch.mm"}"#).unwrap();
        assert_eq!(t.library, Library::TorchLike);
        assert_eq!(t.root(), "torch");
    }

    #[test]
    fn fitness_total_is_consistent() {
        let f = FitnessScore::new(2, 3, 1);
        assert_eq!(f.total(), 4);
        assert_eq!(FitnessScore::default().total(), 0);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FitnessScore>(&json).unwrap(), f);
        assert!(serde_json::from_str::<FitnessScore>(r#"{"depth":1,"unique_calls":1,"repeats":0,"total":5}"#).is_err());
    }

    #[test]
    fn hash_is_normalization_invariant() {
        let a = NormHash::of_source("x = 1  # c\n\n");
        let b = NormHash::of_source("x = 1");
        assert_eq!(a, b);
        assert_ne!(a, NormHash::of_source("x = 2"));
        assert_eq!(a.to_string().parse::<NormHash>().unwrap(), a);
    }

    #[test]
    fn compare_orders_best_first() {
        let hi = FitnessScore::new(3, 2, 0);
        let lo = FitnessScore::new(1, 1, 0);
        assert_eq!(compare_fitness(&hi, &lo), Ordering::Less);
        assert_eq!(compare_fitness(&lo, &hi), Ordering::Greater);
        assert_eq!(compare_fitness(&FitnessScore::new(2, 0, 0), &FitnessScore::new(1, 2, 1)), Ordering::Equal);
    }
}
