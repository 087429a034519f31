//! Tabu search: steepest single flips, with recently flipped variables
//! barred for `tenure` iterations unless the move sets a new best.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::anneal::{delta, flip, polish};
use super::{local_fields, read_rng, SolveRequest, SolveResult};
use crate::qubo::Qubo;

pub fn default_tenure(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (n / 4).clamp(1, 20)
    }
}

fn tabu_read(
    qubo: &Qubo,
    adj: &[Vec<(usize, f64)>],
    tenure: usize,
    iterations: usize,
    seed: u64,
    read: usize,
) -> Vec<bool> {
    let n = qubo.num_vars();
    let mut rng = read_rng(seed, read);
    let mut q: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut field = local_fields(qubo, adj, &q);
    let mut energy = qubo.energy(&q).expect("state length matches");
    let mut best = (q.clone(), energy);
    let mut tabu_until = vec![0usize; n];

    for it in 1..=iterations {
        let mut chosen: Option<(usize, f64)> = None;
        let mut ties = 0u32;
        for k in 0..n {
            let d = delta(&q, &field, k);
            let aspirates = energy + d < best.1 - 1e-12;
            if tabu_until[k] >= it && !aspirates {
                continue;
            }
            match chosen {
                Some((_, c)) if d > c + 1e-12 => {}
                Some((_, c)) if d >= c - 1e-12 => {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        chosen = Some((k, d));
                    }
                }
                _ => {
                    chosen = Some((k, d));
                    ties = 1;
                }
            }
        }
        let Some((k, d)) = chosen else { continue };
        flip(&mut q, &mut field, adj, k);
        energy += d;
        tabu_until[k] = it + tenure;
        if energy < best.1 - 1e-12 {
            best = (q.clone(), energy);
        }
    }

    let (mut q, _) = best;
    let mut field = local_fields(qubo, adj, &q);
    polish(&mut q, &mut field, adj);
    q
}

/// `req.reads` independent tabu walks from random starts.
pub fn solve_tabu(qubo: &Qubo, req: &SolveRequest) -> SolveResult {
    let started = Instant::now();
    let n = qubo.num_vars();
    let adj = qubo.adjacency();
    let tenure = req.tenure.unwrap_or_else(|| default_tenure(n));
    let iterations = req.tabu_iterations.unwrap_or(200 + 50 * n);
    let reads: Vec<Vec<bool>> = (0..req.reads.max(1))
        .into_par_iter()
        .map(|r| tabu_read(qubo, &adj, tenure, iterations, req.seed, r))
        .collect();
    SolveResult::from_reads(qubo, reads, started)
}
