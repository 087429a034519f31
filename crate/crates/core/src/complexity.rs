//! Worst-case candidate counts.
//!
//! An alternating `GCGC…` sequence makes every other anti-diagonal of the
//! pair matrix solid, which maximizes the number of candidate stems. For
//! odd `N` and minimum stem length `m` the count has a closed cubic form;
//! the pair count is its binomial coefficient.

use thiserror::Error;

use crate::seq::{Base, NnTable, PairRule, RnaSequence};
use crate::stems::{classify, enumerate_stems, RelationKind, WeightMode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("closed forms hold for odd sequence lengths only, got N = {0}")]
    EvenLength(usize),
    #[error("need N >= 2m + 1 and m >= 1, got N = {n}, m = {m}")]
    TooShort { n: usize, m: usize },
}

/// Alternating G/C sequence of length `n` (`n >= 1`).
pub fn worst_case_sequence(n: usize) -> RnaSequence {
    let bases = (0..n)
        .map(|i| if i % 2 == 0 { Base::G } else { Base::C })
        .collect();
    RnaSequence::from_bases(bases, format!("worst-case-{n}")).expect("n >= 1")
}

fn check_domain(n: usize, m: usize) -> Result<(), DomainError> {
    if n % 2 == 0 {
        return Err(DomainError::EvenLength(n));
    }
    if m == 0 || n < 2 * m + 1 {
        return Err(DomainError::TooShort { n, m });
    }
    Ok(())
}

/// Number of candidate stems on the worst-case sequence:
///
/// `S(N, m) = (N³ + N²(9 − 6m) + N(12m² − 36m + 23) − 8m³ + 36m² − 46m + 15) / 24`
pub fn stem_count_closed_form(n: usize, m: usize) -> Result<u64, DomainError> {
    check_domain(n, m)?;
    let (n, m) = (n as i128, m as i128);
    let numerator = n * n * n + n * n * (9 - 6 * m) + n * (12 * m * m - 36 * m + 23)
        + (-8 * m * m * m + 36 * m * m - 46 * m)
        + 15;
    debug_assert_eq!(numerator % 24, 0);
    Ok((numerator / 24) as u64)
}

/// Unordered candidate pairs, `S(N, m)·(S(N, m) − 1)/2`.
pub fn pair_count_closed_form(n: usize, m: usize) -> Result<u64, DomainError> {
    let s = stem_count_closed_form(n, m)?;
    Ok(s * s.saturating_sub(1) / 2)
}

/// Brute-force counts on the worst-case sequence with no loop constraint:
/// candidates from the enumerator, and pairs by classifying every
/// unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstCaseCounts {
    pub stems: u64,
    pub pairs: u64,
    pub overlaps: u64,
    pub pseudoknots: u64,
    pub independent: u64,
}

pub fn worst_case_counts(n: usize, m: usize) -> WorstCaseCounts {
    let set = enumerate_stems(
        &worst_case_sequence(n),
        &PairRule::default(),
        m,
        0,
        WeightMode::BpLength,
        &NnTable::default(),
    )
    .expect("m >= 2");
    let c = &set.candidates;
    let mut counts = WorstCaseCounts {
        stems: c.len() as u64,
        pairs: 0,
        overlaps: 0,
        pseudoknots: 0,
        independent: 0,
    };
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            counts.pairs += 1;
            match classify((i, &c[i]), (j, &c[j]), false) {
                RelationKind::Overlap => counts.overlaps += 1,
                RelationKind::Pseudoknot { .. } => counts.pseudoknots += 1,
                RelationKind::Independent => counts.independent += 1,
                RelationKind::Stacked { .. } => unreachable!("stem mode"),
            }
        }
    }
    counts
}
