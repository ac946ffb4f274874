//! On-disk corpus: `<hash>.py` per program plus a JSONL manifest.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ApiTarget, CorpusError, FitnessScore, Library, NormHash, Provenance, SeedBank, TestProgram, Validity};
use crate::mutator::OperatorId;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceKind {
    Seed,
    Mutant,
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub hash: NormHash,
    pub api: String,
    pub library: Library,
    pub validity: Validity,
    #[serde(rename = "D")]
    pub depth: u32,
    #[serde(rename = "U")]
    pub unique_calls: u32,
    #[serde(rename = "R")]
    pub repeats: u32,
    pub total: i64,
    pub provenance: ProvenanceKind,
    pub parent_hash: Option<NormHash>,
    pub operator_id: Option<u8>,
    pub operator: Option<OperatorId>,
}

impl ManifestRecord {
    pub fn of(program: &TestProgram) -> Self {
        let (provenance, parent_hash, operator) = match program.provenance {
            Provenance::Seed => (ProvenanceKind::Seed, None, None),
            Provenance::Mutant { operator, parent } => (ProvenanceKind::Mutant, Some(parent), Some(operator)),
        };
        let f = program.fitness;
        Self {
            hash: program.norm_hash(),
            api: program.target.qualified_name.clone(),
            library: program.target.library,
            validity: program.validity,
            depth: f.depth(),
            unique_calls: f.unique_calls(),
            repeats: f.repeats(),
            total: f.total(),
            provenance,
            parent_hash,
            operator_id: operator.map(OperatorId::code),
            operator,
        }
    }

    pub fn fitness(&self) -> FitnessScore {
        FitnessScore::new(self.depth, self.unique_calls, self.repeats)
    }
}

/// A program read back from disk.
#[derive(Debug, Clone)]
pub struct StoredProgram {
    pub record: ManifestRecord,
    pub source: String,
}

impl StoredProgram {
    pub fn to_program(&self) -> Result<TestProgram, CorpusError> {
        let target = ApiTarget::new(self.record.library, self.record.api.clone(), "")?;
        let provenance = match (self.record.operator, self.record.parent_hash) {
            (Some(operator), Some(parent)) => Provenance::Mutant { operator, parent },
            _ => Provenance::Seed,
        };
        let mut p = TestProgram::new(self.source.clone(), target, provenance);
        p.fitness = self.record.fitness();
        p.validity = self.record.validity;
        Ok(p)
    }
}

/// Writes every program of `bank` into `dir`, in insertion order.
pub fn write_corpus(dir: &Path, bank: &SeedBank) -> Result<(), CorpusError> {
    fs::create_dir_all(dir)?;
    let mut manifest = BufWriter::new(fs::File::create(dir.join(MANIFEST_FILE))?);
    for program in bank.iter() {
        let record = ManifestRecord::of(program);
        fs::write(dir.join(format!("{}.py", record.hash)), program.source())?;
        let line = serde_json::to_string(&record).expect("manifest records always serialize");
        writeln!(manifest, "{line}")?;
    }
    manifest.flush()?;
    Ok(())
}

pub fn load_corpus(dir: &Path) -> Result<Vec<StoredProgram>, CorpusError> {
    let file = fs::File::open(dir.join(MANIFEST_FILE))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ManifestRecord =
            serde_json::from_str(&line).map_err(|source| CorpusError::Manifest { line: i + 1, source })?;
        let source = fs::read_to_string(dir.join(format!("{}.py", record.hash)))?;
        out.push(StoredProgram { record, source });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_roundtrips_through_disk() {
        let target = ApiTarget::new(Library::TorchLike, "torch.abs", "").unwrap();
        let mut seed = TestProgram::new("y = torch.abs(x)", target.clone(), Provenance::Seed);
        seed.validity = Validity::Valid;
        seed.fitness = FitnessScore::new(0, 1, 0);
        let parent = seed.norm_hash();
        let mut mutant = TestProgram::new(
            "y = torch.abs(x)\nz = torch.log(y)",
            target,
            Provenance::Mutant { operator: OperatorId::Suffix, parent },
        );
        mutant.validity = Validity::Valid;
        mutant.fitness = FitnessScore::new(1, 2, 0);
        let mut bank = SeedBank::new();
        bank.insert(seed);
        bank.insert(mutant.clone());

        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path(), &bank).unwrap();
        let loaded = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].record.provenance, ProvenanceKind::Seed);
        assert_eq!(loaded[1].record.parent_hash, Some(parent));
        assert_eq!(loaded[1].record.operator_id, Some(OperatorId::Suffix.code()));
        assert_eq!(loaded[1].to_program().unwrap(), mutant);

        let manifest = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        let first: serde_json::Value = serde_json::from_str(manifest.lines().next().unwrap()).unwrap();
        for key in ["hash", "validity", "D", "U", "R", "total", "provenance", "parent_hash", "operator_id"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
