//! enumerate → build → solve → decode for one sequence.

use thiserror::Error;

use crate::models::{build, ModelError, ModelKind, ModelParams};
use crate::qubo::Qubo;
use crate::scoring::SecondaryStructure;
use crate::seq::{LoopPenaltyTable, NnTable, PairRule, RnaSequence};
use crate::solvers::{decode, solve, SolveError, SolveRequest, SolveResult};
use crate::stems::{enumerate_quartets, enumerate_stems, CandidateKind, CandidateSet, StemError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Stems(#[from] StemError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone)]
pub struct PredictConfig {
    pub rule: PairRule,
    pub min_loop: usize,
    pub min_stem: usize,
    pub nn: NnTable,
    pub loops: LoopPenaltyTable,
    pub solver: SolveRequest,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            rule: PairRule::default(),
            min_loop: 3,
            min_stem: 2,
            nn: NnTable::default(),
            loops: LoopPenaltyTable::default(),
            solver: SolveRequest::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub candidates: CandidateSet,
    pub qubo: Qubo,
    pub result: SolveResult,
    pub structure: SecondaryStructure,
}

impl Prediction {
    /// One line per candidate: `first last length weight selected`.
    pub fn selection_report(&self) -> String {
        let mut out = String::from("#first\tlast\tlength\tweight\tselected\n");
        for (c, &on) in self.candidates.candidates.iter().zip(&self.result.best_q) {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                c.first, c.last, c.length, c.weight, on as u8
            ));
        }
        out
    }
}

/// Candidates of the kind `model` works on.
pub fn candidates_for(
    model: ModelKind,
    seq: &RnaSequence,
    cfg: &PredictConfig,
) -> Result<CandidateSet, StemError> {
    match model.candidate_kind() {
        CandidateKind::Stem(mode) => {
            enumerate_stems(seq, &cfg.rule, cfg.min_stem, cfg.min_loop, mode, &cfg.nn)
        }
        CandidateKind::Quartet => enumerate_quartets(seq, &cfg.rule, cfg.min_loop, &cfg.nn),
    }
}

/// Solve an already built problem and decode the best state.
pub fn predict_from(
    candidates: CandidateSet,
    params: &ModelParams,
    cfg: &PredictConfig,
) -> Result<Prediction, PipelineError> {
    let qubo = build(&candidates, params, &cfg.loops)?;
    let result = solve(&qubo, &cfg.solver)?;
    let structure = decode(&candidates, &result.best_q)?;
    Ok(Prediction {
        candidates,
        qubo,
        result,
        structure,
    })
}

pub fn predict(
    seq: &RnaSequence,
    params: &ModelParams,
    cfg: &PredictConfig,
) -> Result<Prediction, PipelineError> {
    let candidates = candidates_for(params.kind(), seq, cfg)?;
    predict_from(candidates, params, cfg)
}
