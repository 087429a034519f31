//! QUBO solvers behind one request type, and decoding of solutions.
//!
//! Randomized solvers draw from ChaCha8 streams: restart `r` of a request
//! with seed `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to stream `r`.
//! Restarts therefore do not depend on how many restarts were requested,
//! and may run in parallel without changing the result.

mod anneal;
mod exhaustive;
mod tabu;

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::Qubo;
use crate::scoring::{SecondaryStructure, StructureError};
use crate::stems::CandidateSet;

pub use anneal::{auto_schedule, solve_sa};
pub use exhaustive::solve_exhaustive;
pub use tabu::solve_tabu;

/// Largest instance the exhaustive solver accepts by default.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 128;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("{num_vars} variables exceed the exhaustive-search cap of {cap}")]
    TooLarge { num_vars: usize, cap: usize },
    #[error("bit vector has {got} entries for {expected} candidates")]
    LengthMismatch { expected: usize, got: usize },
    #[error("base {0} is assigned two different partners")]
    ConflictingPairs(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Exhaustive,
    SimAnneal,
    Tabu,
}

impl FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SolveMethod::Exhaustive),
            "sa" | "anneal" => Ok(SolveMethod::SimAnneal),
            "tabu" => Ok(SolveMethod::Tabu),
            _ => Err(format!("unknown solver {s:?} (exhaustive, sa, tabu)")),
        }
    }
}

/// Solver settings; the QUBO is passed alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRequest {
    pub method: SolveMethod,
    pub seed: u64,
    /// Independent restarts for the randomized solvers.
    pub reads: usize,
    /// Annealing sweeps per read.
    pub sweeps: usize,
    /// Initial and final temperature; derived from the QUBO when `None`.
    pub schedule: Option<(f64, f64)>,
    /// Tabu tenure; `min(20, n/4)` (at least 1) when `None`.
    pub tenure: Option<usize>,
    /// Tabu iterations per read; `200 + 50 n` when `None`.
    pub tabu_iterations: Option<usize>,
    pub exhaustive_cap: usize,
}

impl Default for SolveRequest {
    fn default() -> Self {
        SolveRequest {
            method: SolveMethod::SimAnneal,
            seed: 0,
            reads: 8,
            sweeps: 1000,
            schedule: None,
            tenure: None,
            tabu_iterations: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

impl SolveRequest {
    pub fn new(method: SolveMethod, seed: u64) -> Self {
        SolveRequest {
            method,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub q: Vec<bool>,
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_q: Vec<bool>,
    pub best_energy: f64,
    /// Distinct final states, lowest energy first.
    pub samples: Vec<Sample>,
    pub wall_time: Duration,
}

impl SolveResult {
    /// Aggregate per-read states into samples; the best sample comes
    /// first. Energies are recomputed exactly from the QUBO.
    pub(crate) fn from_reads(qubo: &Qubo, reads: Vec<Vec<bool>>, started: Instant) -> Self {
        let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for q in reads {
            *counts.entry(q).or_default() += 1;
        }
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(q, occurrences)| Sample {
                energy: qubo.energy(&q).expect("solver states match the QUBO"),
                q,
                occurrences,
            })
            .collect();
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| bits_value_cmp(&a.q, &b.q))
        });
        let best = samples
            .first()
            .cloned()
            .unwrap_or_else(|| Sample {
                q: vec![false; qubo.num_vars()],
                energy: 0.0,
                occurrences: 0,
            });
        SolveResult {
            best_q: best.q,
            best_energy: best.energy,
            samples,
            wall_time: started.elapsed(),
        }
    }

    pub fn bit_string(&self) -> String {
        self.best_q.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Result document: best bit string, energy, and a per-sample table.
    pub fn to_report(&self) -> String {
        let mut out = format!(
            "best\t{}\nenergy\t{}\nwall_time_s\t{:.6}\n#bits\tenergy\toccurrences\n",
            self.bit_string(),
            self.best_energy,
            self.wall_time.as_secs_f64()
        );
        for s in &self.samples {
            let bits: String = s.q.iter().map(|&b| if b { '1' } else { '0' }).collect();
            out.push_str(&format!("{bits}\t{}\t{}\n", s.energy, s.occurrences));
        }
        out
    }
}

/// Compare bit vectors as integers `Σ q_i 2^i`.
pub(crate) fn bits_value_cmp(a: &[bool], b: &[bool]) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

pub(crate) fn read_rng(seed: u64, read: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    rng
}

/// Local fields `h_k + Σ_l J_kl q_l`.
pub(crate) fn local_fields(qubo: &Qubo, adj: &[Vec<(usize, f64)>], q: &[bool]) -> Vec<f64> {
    (0..qubo.num_vars())
        .map(|k| {
            qubo.linear(k)
                + adj[k]
                    .iter()
                    .filter(|(l, _)| q[*l])
                    .map(|(_, v)| v)
                    .sum::<f64>()
        })
        .collect()
}

pub fn solve(qubo: &Qubo, req: &SolveRequest) -> Result<SolveResult, SolveError> {
    match req.method {
        SolveMethod::Exhaustive => solve_exhaustive(qubo, req.exhaustive_cap),
        SolveMethod::SimAnneal => Ok(solve_sa(qubo, req)),
        SolveMethod::Tabu => Ok(solve_tabu(qubo, req)),
    }
}

/// Union of the base pairs of every selected candidate. Two candidates may
/// share a pair (stacked quartets do), but no base may get two partners.
pub fn decode(set: &CandidateSet, q: &[bool]) -> Result<SecondaryStructure, SolveError> {
    if q.len() != set.len() {
        return Err(SolveError::LengthMismatch {
            expected: set.len(),
            got: q.len(),
        });
    }
    let mut partner = vec![0usize; set.seq_len + 1];
    let mut pairs = Vec::new();
    for (c, _) in set.candidates.iter().zip(q).filter(|(_, &on)| on) {
        for (i, j) in c.pairs() {
            match (partner[i], partner[j]) {
                (0, 0) => {
                    partner[i] = j;
                    partner[j] = i;
                    pairs.push((i, j));
                }
                (pi, pj) if pi == j && pj == i => {}
                (pi, _) if pi != 0 && pi != j => return Err(SolveError::ConflictingPairs(i)),
                _ => return Err(SolveError::ConflictingPairs(j)),
            }
        }
    }
    Ok(SecondaryStructure::new(set.seq_len, pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{NnTable, PairRule, RnaSequence};
    use crate::stems::{enumerate_quartets, enumerate_stems, WeightMode};

    fn fig1_stems() -> CandidateSet {
        enumerate_stems(
            &RnaSequence::parse("GGAAGCAAACAUCCCUGU", "fig1").unwrap(),
            &PairRule::default(),
            2,
            3,
            WeightMode::BpLength,
            &NnTable::default(),
        )
        .unwrap()
    }

    #[test]
    fn decode_empty_selection() {
        let set = fig1_stems();
        let s = decode(&set, &vec![false; set.len()]).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.n(), 18);
    }

    #[test]
    fn decode_three_stem() {
        let set = fig1_stems();
        let idx = set.candidates.iter().position(|c| c.length == 3).unwrap();
        let mut q = vec![false; set.len()];
        q[idx] = true;
        let s = decode(&set, &q).unwrap();
        assert_eq!(s.len(), 3);
        let c = set.candidates[idx];
        assert!(s.pairs().contains(&(c.first, c.last)));
    }

    #[test]
    fn decode_rejects_overlaps() {
        let set = fig1_stems();
        let r = set
            .relations
            .iter()
            .find(|r| r.kind == crate::stems::RelationKind::Overlap)
            .unwrap();
        let mut q = vec![false; set.len()];
        q[r.i] = true;
        q[r.j] = true;
        assert!(matches!(decode(&set, &q), Err(SolveError::ConflictingPairs(_))));
        assert!(matches!(
            decode(&set, &[true]),
            Err(SolveError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn decode_stacked_quartets_share_a_pair() {
        let s = RnaSequence::parse("GGAAGCAAACAUCCCUGU", "fig1").unwrap();
        let set = enumerate_quartets(&s, &PairRule::default(), 3, &NnTable::default()).unwrap();
        let a = set.candidates.iter().position(|c| (c.first, c.last) == (1, 14)).unwrap();
        let b = set.candidates.iter().position(|c| (c.first, c.last) == (2, 13)).unwrap();
        let mut q = vec![false; set.len()];
        q[a] = true;
        q[b] = true;
        let st = decode(&set, &q).unwrap();
        assert_eq!(
            st.pairs().iter().copied().collect::<Vec<_>>(),
            vec![(1, 14), (2, 13), (3, 12)]
        );
    }

    #[test]
    fn integer_order_of_bit_vectors() {
        use std::cmp::Ordering::*;
        assert_eq!(bits_value_cmp(&[true, false], &[false, true]), Less);
        assert_eq!(bits_value_cmp(&[false, true], &[true, true]), Less);
        assert_eq!(bits_value_cmp(&[true, true], &[true, true]), Equal);
    }
}
