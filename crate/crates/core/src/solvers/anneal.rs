//! Simulated annealing with a geometric temperature schedule.
//!
//! Each sweep tries every single flip once, then offers every selected
//! variable an exchange with one randomly chosen variable it conflicts with
//! (a positive coupling). Exchanges let a read move between mutually
//! exclusive choices without passing through the empty state.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{local_fields, read_rng, SolveRequest, SolveResult};
use crate::qubo::Qubo;

/// Default `(T_initial, T_final)` from the coefficient scale. The hottest
/// temperature accepts, with probability 1/2, the largest energy change a
/// single variable can see from its linear term and its negative
/// couplings. Positive couplings act as constraints and are left out, so
/// large conflict penalties do not stretch the hot end. The coldest
/// temperature accepts the smallest nonzero coefficient with probability
/// 1/100.
pub fn auto_schedule(qubo: &Qubo) -> (f64, f64) {
    let mut reach: Vec<f64> = qubo.linear_terms().iter().map(|h| h.abs()).collect();
    let mut smallest = f64::INFINITY;
    for h in qubo.linear_terms() {
        if *h != 0.0 {
            smallest = smallest.min(h.abs());
        }
    }
    for ((i, j), v) in qubo.quadratic_terms() {
        if v < 0.0 {
            reach[i] -= v;
            reach[j] -= v;
        }
        smallest = smallest.min(v.abs());
    }
    let largest = reach.into_iter().fold(0.0, f64::max);
    if largest == 0.0 {
        return (1.0, smallest.min(1.0));
    }
    let hot = largest / std::f64::consts::LN_2;
    let cold = (smallest / 100f64.ln()).min(hot);
    (hot, cold)
}

pub(crate) fn flip(q: &mut [bool], field: &mut [f64], adj: &[Vec<(usize, f64)>], k: usize) {
    q[k] = !q[k];
    let sign = if q[k] { 1.0 } else { -1.0 };
    for &(l, v) in &adj[k] {
        field[l] += sign * v;
    }
}

/// Energy change of flipping `k`.
#[inline]
pub(crate) fn delta(q: &[bool], field: &[f64], k: usize) -> f64 {
    if q[k] {
        -field[k]
    } else {
        field[k]
    }
}

/// Steepest descent until no single flip lowers the energy.
pub(crate) fn polish(q: &mut [bool], field: &mut [f64], adj: &[Vec<(usize, f64)>]) {
    loop {
        let step = (0..q.len())
            .map(|k| (k, delta(q, field, k)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match step {
            Some((k, d)) if d < -1e-12 => flip(q, field, adj, k),
            _ => return,
        }
    }
}

fn anneal_read(
    qubo: &Qubo,
    adj: &[Vec<(usize, f64)>],
    schedule: (f64, f64),
    sweeps: usize,
    seed: u64,
    read: usize,
) -> Vec<bool> {
    let n = qubo.num_vars();
    let mut rng = read_rng(seed, read);
    let mut q: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut field = local_fields(qubo, adj, &q);
    let (hot, cold) = schedule;
    let ratio = if sweeps > 1 {
        (cold / hot).powf(1.0 / (sweeps - 1) as f64)
    } else {
        1.0
    };
    let conflicts: Vec<Vec<(usize, f64)>> = adj
        .iter()
        .map(|list| list.iter().copied().filter(|&(_, v)| v > 0.0).collect())
        .collect();
    let accept = |d: f64, t: f64, rng: &mut ChaCha8Rng| d <= 0.0 || rng.gen::<f64>() < (-d / t).exp();
    let mut t = hot;
    for _ in 0..sweeps {
        for k in 0..n {
            let d = delta(&q, &field, k);
            if accept(d, t, &mut rng) {
                flip(&mut q, &mut field, adj, k);
            }
        }
        // exchange moves: swap a selected variable for one it conflicts with
        for k in 0..n {
            if !q[k] || conflicts[k].is_empty() {
                continue;
            }
            let (l, v) = conflicts[k][rng.gen_range(0..conflicts[k].len())];
            if q[l] {
                continue;
            }
            let d = -field[k] + field[l] - v;
            if accept(d, t, &mut rng) {
                flip(&mut q, &mut field, adj, k);
                flip(&mut q, &mut field, adj, l);
            }
        }
        t *= ratio;
    }
    polish(&mut q, &mut field, adj);
    q
}

/// `req.reads` independent anneals of `req.sweeps` sweeps each, followed by
/// a greedy polish. Reads run in parallel; the result depends only on the
/// seed and the number of reads.
pub fn solve_sa(qubo: &Qubo, req: &SolveRequest) -> SolveResult {
    let started = Instant::now();
    let adj = qubo.adjacency();
    let schedule = req.schedule.unwrap_or_else(|| auto_schedule(qubo));
    let reads: Vec<Vec<bool>> = (0..req.reads.max(1))
        .into_par_iter()
        .map(|r| anneal_read(qubo, &adj, schedule, req.sweeps, req.seed, r))
        .collect();
    SolveResult::from_reads(qubo, reads, started)
}
