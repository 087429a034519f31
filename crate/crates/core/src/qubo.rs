//! Sparse QUBO container: `H(q) = Σ h_i q_i + Σ_{i<j} J_ij q_i q_j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("bit vector has {got} entries, QUBO has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable {index} out of range for {num_vars} variables")]
    OutOfRange { index: usize, num_vars: usize },
    #[error("malformed QUBO document: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Qubo {
    num_vars: usize,
    linear: Vec<f64>,
    /// Canonical keys `(i, j)` with `i < j`.
    quadratic: BTreeMap<(usize, usize), f64>,
    labels: Vec<String>,
}

impl Qubo {
    pub fn new(num_vars: usize) -> Self {
        Qubo {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            labels: vec![String::new(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.linear[i]
    }

    pub fn linear_terms(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.quadratic
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.quadratic.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_quadratic(&self) -> usize {
        self.quadratic.len()
    }

    pub fn set_linear(&mut self, i: usize, value: f64) {
        self.linear[i] = value;
    }

    /// Store `J_ij`; the key is canonicalized so `(j, i)` addresses the same
    /// coupling. A zero value removes the entry.
    pub fn set_quadratic(&mut self, i: usize, j: usize, value: f64) {
        assert!(i != j, "self-coupling ({i}, {i}) belongs in the linear term");
        assert!(i < self.num_vars && j < self.num_vars);
        let key = (i.min(j), i.max(j));
        if value == 0.0 {
            self.quadratic.remove(&key);
        } else {
            self.quadratic.insert(key, value);
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_label(&mut self, i: usize, label: impl Into<String>) {
        self.labels[i] = label.into();
    }

    /// Exact evaluation: linear terms in index order, then couplings in key
    /// order. Every solver reports energies through this function.
    pub fn energy(&self, q: &[bool]) -> Result<f64, QuboError> {
        if q.len() != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                got: q.len(),
            });
        }
        let mut e = 0.0;
        for (h, &bit) in self.linear.iter().zip(q) {
            if bit {
                e += h;
            }
        }
        for (&(i, j), &v) in &self.quadratic {
            if q[i] && q[j] {
                e += v;
            }
        }
        Ok(e)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Per-variable coupling lists, each sorted by neighbor index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for (&(i, j), &v) in &self.quadratic {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        for list in &mut adj {
            list.sort_by_key(|&(k, _)| k);
        }
        adj
    }

    /// JSON interchange document with `num_vars`, `linear` (`"i"` → h),
    /// `quadratic` (`"i,j"` → J) and `labels` (`"i"` → label). Values are
    /// written in shortest round-trip form, so reading back is exact.
    pub fn to_json(&self) -> String {
        let doc = QuboDoc {
            num_vars: self.num_vars,
            linear: self
                .linear
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i.to_string(), v))
                .collect(),
            quadratic: self
                .quadratic
                .iter()
                .map(|(&(i, j), &v)| (format!("{i},{j}"), v))
                .collect(),
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(i, l)| (i.to_string(), l.clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("finite coefficients serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, QuboError> {
        let doc: QuboDoc =
            serde_json::from_str(text).map_err(|e| QuboError::Format(e.to_string()))?;
        let mut q = Qubo::new(doc.num_vars);
        let index = |s: &str| -> Result<usize, QuboError> {
            let i: usize = s
                .trim()
                .parse()
                .map_err(|_| QuboError::Format(format!("bad variable index {s:?}")))?;
            if i >= doc.num_vars {
                return Err(QuboError::OutOfRange {
                    index: i,
                    num_vars: doc.num_vars,
                });
            }
            Ok(i)
        };
        for (k, v) in &doc.linear {
            q.set_linear(index(k)?, *v);
        }
        for (k, v) in &doc.quadratic {
            let (a, b) = k
                .split_once(',')
                .ok_or_else(|| QuboError::Format(format!("bad coupling key {k:?}")))?;
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(QuboError::Format(format!("self-coupling {k:?}")));
            }
            q.set_quadratic(i, j, *v);
        }
        for (k, l) in &doc.labels {
            q.set_label(index(k)?, l.clone());
        }
        Ok(q)
    }
}

#[derive(Serialize, Deserialize)]
struct QuboDoc {
    num_vars: usize,
    #[serde(default)]
    linear: BTreeMap<String, f64>,
    #[serde(default)]
    quadratic: BTreeMap<String, f64>,
    #[serde(default)]
    labels: BTreeMap<String, String>,
}
