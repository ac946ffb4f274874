//! Evolutionary, LLM-guided fuzzing of Python library APIs.
//!
//! A campaign targets one library API. Seed programs are synthesized by a
//! generative completion backend from a step-by-step prompt, then evolved by
//! masking parts of high-fitness seeds and asking an infilling backend to fill
//! the holes. Mutation operators are scheduled with Beta-Bernoulli Thompson
//! sampling and parents are chosen by a softmax over a dataflow-based fitness
//! score. Unique valid programs are finally executed on two numeric backends
//! and compared variable by variable.
//!
//! Module map:
//!
//! - [`pyast`]: parsing, call-site discovery, def-use dataflow, trimming and
//!   dead-code elimination of Python snippets.
//! - [`corpus`]: program records, normalization and the fitness-indexed seed bank.
//! - [`fitness`]: the `D + U - R` score.
//! - [`mutator`]: the seven masking operators.
//! - [`bandit`]: Thompson sampling over operators.
//! - [`genbackend`]: completion/infill backends (HTTP and mock) and
//!   post-processing of raw generations.
//! - [`seedgen`]: prompt construction and seed synthesis.
//! - [`oracle`]: differential verdicts and crash classification.
//! - [`executor`]: the out-of-process execution interface.
//! - [`engine`]: the evolutionary loop, suites of campaigns and reports.

pub mod bandit;
pub mod corpus;
pub mod engine;
pub mod executor;
pub mod fitness;
pub mod genbackend;
pub mod mutator;
pub mod oracle;
pub mod pyast;
pub mod seedgen;

pub use corpus::{ApiTarget, FitnessScore, Library, NormHash, SeedBank, TestProgram, Validity};
pub use mutator::{MaskedProgram, OperatorId};
