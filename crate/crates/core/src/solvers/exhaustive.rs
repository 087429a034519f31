//! Exact minimization by depth-first branch and bound.
//!
//! Variables are fixed from the highest index down, 0 before 1, so leaves
//! are visited in increasing integer order `Σ q_i 2^i`. Among exactly equal
//! minima the lowest integer wins.

use std::time::Instant;

use super::{local_fields, SolveError, SolveResult};
use crate::qubo::Qubo;

struct Search<'a> {
    qubo: &'a Qubo,
    /// Couplings to lower-indexed neighbors only.
    lower: Vec<Vec<(usize, f64)>>,
    /// `Σ_{l<k} min(0, J_kl)`: the most the free pairs below `k` can add.
    neg: Vec<f64>,
    field: Vec<f64>,
    q: Vec<bool>,
    best_q: Vec<bool>,
    best: f64,
}

impl Search<'_> {
    /// Lower bound on any completion once variables `depth..n` are fixed.
    fn bound(&self, fixed: f64, depth: usize) -> f64 {
        fixed
            + (0..depth)
                .map(|k| (self.field[k] + self.neg[k]).min(0.0))
                .sum::<f64>()
    }

    fn leaf(&mut self) {
        let e = self.qubo.energy(&self.q).expect("state length matches");
        if e < self.best
            || (e == self.best && super::bits_value_cmp(&self.q, &self.best_q).is_lt())
        {
            self.best = e;
            self.best_q.copy_from_slice(&self.q);
        }
    }

    fn visit(&mut self, depth: usize, fixed: f64) {
        if depth == 0 {
            self.leaf();
            return;
        }
        let tol = 1e-9 * self.best.abs().max(1.0);
        if self.bound(fixed, depth) > self.best + tol {
            return;
        }
        let k = depth - 1;
        self.visit(k, fixed);

        let gain = self.field[k];
        self.q[k] = true;
        for &(l, v) in &self.lower[k] {
            self.field[l] += v;
        }
        self.visit(k, fixed + gain);
        for &(l, v) in &self.lower[k] {
            self.field[l] -= v;
        }
        self.q[k] = false;
    }
}

/// Steepest single-flip descent from all zeros; seeds the incumbent.
fn descent(qubo: &Qubo, adj: &[Vec<(usize, f64)>]) -> Vec<bool> {
    let n = qubo.num_vars();
    let mut q = vec![false; n];
    let mut field = local_fields(qubo, adj, &q);
    loop {
        let step = (0..n)
            .map(|k| (k, if q[k] { -field[k] } else { field[k] }))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match step {
            Some((k, delta)) if delta < -1e-12 => {
                q[k] = !q[k];
                let sign = if q[k] { 1.0 } else { -1.0 };
                for &(l, v) in &adj[k] {
                    field[l] += sign * v;
                }
            }
            _ => return q,
        }
    }
}

/// Exact ground state. Fails with [`SolveError::TooLarge`] above `cap`
/// variables.
pub fn solve_exhaustive(qubo: &Qubo, cap: usize) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let n = qubo.num_vars();
    if n > cap {
        return Err(SolveError::TooLarge { num_vars: n, cap });
    }
    let adj = qubo.adjacency();
    let lower: Vec<Vec<(usize, f64)>> = adj
        .iter()
        .enumerate()
        .map(|(k, list)| list.iter().copied().filter(|&(l, _)| l < k).collect())
        .collect();
    let neg = lower
        .iter()
        .map(|list| list.iter().map(|&(_, v)| v.min(0.0)).sum())
        .collect();
    let incumbent = descent(qubo, &adj);
    let mut search = Search {
        qubo,
        neg,
        field: qubo.linear_terms().to_vec(),
        q: vec![false; n],
        best: qubo.energy(&incumbent).expect("state length matches"),
        best_q: incumbent,
        lower,
    };
    search.visit(n, 0.0);
    log::debug!("exhaustive: {n} variables, ground energy {}", search.best);
    Ok(SolveResult::from_reads(qubo, vec![search.best_q], started))
}
