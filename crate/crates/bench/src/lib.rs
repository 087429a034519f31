//! Shared inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnaqubo::RnaSequence;

/// A reproducible random sequence of length `n`.
pub fn random_sequence(n: usize, seed: u64) -> RnaSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: String = (0..n).map(|_| ['A', 'C', 'G', 'U'][rng.gen_range(0..4)]).collect();
    RnaSequence::parse(&s, format!("bench-{n}-{seed}")).expect("valid alphabet")
}

/// Two hairpins whose loops pair with each other, `copies` times over.
pub fn kissing_hairpins(copies: usize) -> RnaSequence {
    let unit = "GGCGAAGCCAUCGGAAACCGAUGG";
    RnaSequence::parse(&unit.repeat(copies), format!("kissing-{copies}")).expect("valid alphabet")
}
