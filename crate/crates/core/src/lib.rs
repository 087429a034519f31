//! QUBO formulations of RNA secondary-structure prediction.
//!
//! The crate covers the whole folding pipeline:
//!
//! - [`seq`]: sequences, base-pair rules and nearest-neighbor tables
//! - [`stems`]: candidate stem / stacked-quartet enumeration and pairwise
//!   overlap / pseudoknot classification
//! - [`complexity`]: worst-case candidate counts and their closed forms
//! - [`qubo`] and [`models`]: the QUBO container and the three
//!   parameterized Hamiltonians built from a candidate set
//! - [`solvers`]: exhaustive, simulated-annealing and tabu QUBO solvers,
//!   plus decoding of a bit vector back into base pairs
//! - [`scoring`]: base-pair MCC and the two-sample KS statistic
//! - [`dataset`]: CT / FASTA parsing, known-stem extraction, manifests
//! - [`pipeline`] and [`trainer`]: predict a structure end to end, and tune
//!   model parameters with SPSA against known structures

pub mod complexity;
pub mod dataset;
pub mod models;
pub mod pipeline;
pub mod qubo;
pub mod scoring;
pub mod seq;
pub mod solvers;
pub mod stems;
pub mod trainer;

pub use complexity::{pair_count_closed_form, stem_count_closed_form, worst_case_sequence};
pub use dataset::{CtRecord, DatasetManifest, ManifestEntry, Split};
pub use models::{Model1Params, Model2Params, Model3Params, ModelKind, ModelParams};
pub use pipeline::{predict, Prediction, PredictConfig};
pub use qubo::Qubo;
pub use scoring::{Confusion, SecondaryStructure};
pub use seq::{Base, LoopPenaltyTable, NnTable, PairRule, RnaSequence};
pub use solvers::{SolveMethod, SolveRequest, SolveResult};
pub use stems::{CandidateKind, CandidateSet, PairRelation, RelationKind, StemCandidate, WeightMode};
pub use trainer::{LossKind, SpsaConfig, TrainRecord};
