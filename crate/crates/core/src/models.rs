//! The three parameterized folding Hamiltonians.
//!
//! - Model 1 works on stems weighted by base-pair count. It rewards stems
//!   close to the longest candidate and the square of the total number of
//!   paired bases; pseudoknotted pairs get their coupling reward scaled by
//!   `pk_discount`.
//! - Model 2 works on stacked quartets weighted by stacking stability, with
//!   a flat reward for consecutive quartets and a flat pseudoknot penalty.
//! - Model 3 works on stems weighted by summed stacking stability, with a
//!   hairpin-loop term and a pseudoknot penalty that grows with the
//!   number of unpaired bases between the crossing stems.
//!
//! Overlapping candidates always receive a large positive coupling.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::Qubo;
use crate::seq::{key_values, HairpinPenalty, LoopPenaltyTable, TableError};
use crate::stems::{CandidateKind, CandidateSet, RelationKind, WeightMode};

/// Base overlap penalty, the "−∞" of the overlap delta.
pub const DEFAULT_OVERLAP_PENALTY: f64 = 1000.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model {model} needs {expected} candidates, got {got:?}")]
    WrongCandidateKind {
        model: ModelKind,
        expected: &'static str,
        got: CandidateKind,
    },
    #[error("candidate {index} encloses a forbidden hairpin loop of {loop_size} bases")]
    ForbiddenLoop { index: usize, loop_size: usize },
    #[error("unknown parameter {key:?} for model {model}")]
    UnknownParam { model: ModelKind, key: String },
    #[error("unknown parameter preset {0:?}")]
    UnknownPreset(String),
    #[error("parameter file: {0}")]
    File(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    One,
    Two,
    Three,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::One, ModelKind::Two, ModelKind::Three];

    pub fn number(self) -> u8 {
        match self {
            ModelKind::One => 1,
            ModelKind::Two => 2,
            ModelKind::Three => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(ModelKind::One),
            2 => Some(ModelKind::Two),
            3 => Some(ModelKind::Three),
            _ => None,
        }
    }

    /// Candidate representation the model's builder consumes.
    pub fn candidate_kind(self) -> CandidateKind {
        match self {
            ModelKind::One => CandidateKind::Stem(WeightMode::BpLength),
            ModelKind::Two => CandidateKind::Quartet,
            ModelKind::Three => CandidateKind::Stem(WeightMode::NnEnergy),
        }
    }

    /// Names of the parameters SPSA tunes, in vector order.
    pub fn trainable(self) -> &'static [&'static str] {
        match self {
            ModelKind::One => &["c_l", "c_b", "pk_discount"],
            ModelKind::Two => &["m_plus", "m_minus"],
            ModelKind::Three => &["alpha", "beta", "p1", "p2"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u8>()
            .ok()
            .and_then(ModelKind::from_number)
            .ok_or_else(|| format!("model must be 1, 2 or 3, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model1Params {
    pub c_l: f64,
    pub c_b: f64,
    /// Scale applied to the coupling reward of pseudoknotted stems, in (0, 1].
    pub pk_discount: f64,
    pub overlap_penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model2Params {
    /// Reward for consecutive stacked quartets.
    pub m_plus: f64,
    /// Penalty for pseudoknotted quartets.
    pub m_minus: f64,
    pub overlap_penalty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model3Params {
    pub alpha: f64,
    pub beta: f64,
    pub p1: f64,
    pub p2: f64,
    /// Linear dimension of one unpaired nucleotide in the pseudoknot term.
    pub e_dim: f64,
    pub overlap_penalty: f64,
}

impl Default for Model1Params {
    fn default() -> Self {
        Model1Params {
            c_l: 0.639,
            c_b: 0.223,
            pk_discount: 0.681,
            overlap_penalty: DEFAULT_OVERLAP_PENALTY,
        }
    }
}

impl Default for Model2Params {
    fn default() -> Self {
        Model2Params {
            m_plus: 1.748,
            m_minus: 0.386,
            overlap_penalty: DEFAULT_OVERLAP_PENALTY,
        }
    }
}

impl Default for Model3Params {
    fn default() -> Self {
        Model3Params {
            alpha: 1.604,
            beta: 2.212,
            p1: 1.495,
            p2: 1.338,
            e_dim: 1.0,
            overlap_penalty: DEFAULT_OVERLAP_PENALTY,
        }
    }
}

/// Parameters for one of the three models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    One(Model1Params),
    Two(Model2Params),
    Three(Model3Params),
}

impl ModelParams {
    /// Named presets: `paper-2022` (the trained values shipped as defaults)
    /// and `ones` (every tunable parameter set to 1).
    pub fn preset(kind: ModelKind, name: &str) -> Result<Self, ModelError> {
        match name {
            "paper-2022" | "default" => Ok(Self::defaults(kind)),
            "ones" => Ok(Self::ones(kind)),
            other => Err(ModelError::UnknownPreset(other.to_string())),
        }
    }

    pub fn defaults(kind: ModelKind) -> Self {
        match kind {
            ModelKind::One => ModelParams::One(Model1Params::default()),
            ModelKind::Two => ModelParams::Two(Model2Params::default()),
            ModelKind::Three => ModelParams::Three(Model3Params::default()),
        }
    }

    pub fn ones(kind: ModelKind) -> Self {
        let mut p = Self::defaults(kind);
        p.set_vector(&vec![1.0; kind.trainable().len()]);
        p
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::One(_) => ModelKind::One,
            ModelParams::Two(_) => ModelKind::Two,
            ModelParams::Three(_) => ModelKind::Three,
        }
    }

    /// Every parameter as `(name, value)`, trainable ones first.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        match self {
            ModelParams::One(p) => vec![
                ("c_l", p.c_l),
                ("c_b", p.c_b),
                ("pk_discount", p.pk_discount),
                ("overlap_penalty", p.overlap_penalty),
            ],
            ModelParams::Two(p) => vec![
                ("m_plus", p.m_plus),
                ("m_minus", p.m_minus),
                ("overlap_penalty", p.overlap_penalty),
            ],
            ModelParams::Three(p) => vec![
                ("alpha", p.alpha),
                ("beta", p.beta),
                ("p1", p.p1),
                ("p2", p.p2),
                ("e_dim", p.e_dim),
                ("overlap_penalty", p.overlap_penalty),
            ],
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ModelError> {
        let kind = self.kind();
        let slot = match (self, key) {
            (ModelParams::One(p), "c_l") => &mut p.c_l,
            (ModelParams::One(p), "c_b") => &mut p.c_b,
            (ModelParams::One(p), "pk_discount") => &mut p.pk_discount,
            (ModelParams::One(p), "overlap_penalty") => &mut p.overlap_penalty,
            (ModelParams::Two(p), "m_plus") => &mut p.m_plus,
            (ModelParams::Two(p), "m_minus") => &mut p.m_minus,
            (ModelParams::Two(p), "overlap_penalty") => &mut p.overlap_penalty,
            (ModelParams::Three(p), "alpha") => &mut p.alpha,
            (ModelParams::Three(p), "beta") => &mut p.beta,
            (ModelParams::Three(p), "p1") => &mut p.p1,
            (ModelParams::Three(p), "p2") => &mut p.p2,
            (ModelParams::Three(p), "e_dim") => &mut p.e_dim,
            (ModelParams::Three(p), "overlap_penalty") => &mut p.overlap_penalty,
            _ => {
                return Err(ModelError::UnknownParam {
                    model: kind,
                    key: key.to_string(),
                })
            }
        };
        *slot = value;
        Ok(())
    }

    /// Trainable parameters in [`ModelKind::trainable`] order.
    pub fn vector(&self) -> Vec<f64> {
        self.kind()
            .trainable()
            .iter()
            .map(|k| self.get(k).expect("trainable names are valid"))
            .collect()
    }

    pub fn set_vector(&mut self, values: &[f64]) {
        let names = self.kind().trainable();
        assert_eq!(values.len(), names.len());
        for (k, &v) in names.iter().zip(values) {
            self.set(k, v).expect("trainable names are valid");
        }
    }

    /// Project a trainable vector onto the parameter domains: every
    /// parameter non-negative, and the pseudoknot discount in (0, 1].
    pub fn clamp_vector(kind: ModelKind, values: &mut [f64]) {
        for (name, v) in kind.trainable().iter().zip(values.iter_mut()) {
            *v = match *name {
                "pk_discount" => v.clamp(1e-6, 1.0),
                _ => v.max(0.0),
            };
        }
    }

    /// `KEY<TAB>VALUE` lines, led by `model<TAB>N`.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("model\t{}\n", self.kind());
        for (k, v) in self.entries() {
            out.push_str(&format!("{k}\t{v}\n"));
        }
        out
    }

    /// Parse a parameter file. Missing keys keep the values of `base`; a
    /// `model` line, when present, must agree with `base`.
    pub fn merge_tsv(base: ModelParams, text: &str) -> Result<Self, ModelError> {
        let mut p = base;
        let entries = key_values(text)?;
        for (line, key, value) in entries {
            if key == "model" {
                if ModelKind::from_number(value as u8) != Some(p.kind()) || value.fract() != 0.0 {
                    return Err(ModelError::File(format!(
                        "line {line}: file is for model {value}, expected {}",
                        p.kind()
                    )));
                }
                continue;
            }
            p.set(key, value)?;
        }
        Ok(p)
    }

    /// Parse a standalone parameter file; the `model` line is required.
    pub fn from_tsv(text: &str) -> Result<Self, ModelError> {
        let model = key_values(text)?
            .into_iter()
            .find(|(_, k, _)| *k == "model")
            .and_then(|(_, _, v)| ModelKind::from_number(v as u8))
            .ok_or_else(|| ModelError::File("missing or invalid `model` line".into()))?;
        Self::merge_tsv(Self::defaults(model), text)
    }
}

fn check_kind(set: &CandidateSet, model: ModelKind) -> Result<(), ModelError> {
    let expected = model.candidate_kind();
    if set.kind != expected {
        return Err(ModelError::WrongCandidateKind {
            model,
            expected: match expected {
                CandidateKind::Stem(WeightMode::BpLength) => "bp-length stem",
                CandidateKind::Stem(WeightMode::NnEnergy) => "nn-energy stem",
                CandidateKind::Quartet => "stacked-quartet",
            },
            got: set.kind,
        });
    }
    Ok(())
}

fn labelled(set: &CandidateSet) -> Qubo {
    let mut q = Qubo::new(set.len());
    for (i, c) in set.candidates.iter().enumerate() {
        q.set_label(i, format!("{} {} {}", c.first, c.last, c.length));
    }
    q
}

/// Overlap coupling that keeps the no-overlap constraint hard: at least
/// `base`, and at least ten times the largest reward any single variable
/// can collect from its linear term and its non-overlap couplings.
fn effective_overlap_penalty(q: &Qubo, set: &CandidateSet, base: f64) -> f64 {
    let mut reach: Vec<f64> = q.linear_terms().iter().map(|h| h.abs()).collect();
    for ((i, j), v) in q.quadratic_terms() {
        if set.relation(i, j) != RelationKind::Overlap {
            reach[i] += v.abs();
            reach[j] += v.abs();
        }
    }
    let max_reach = reach.into_iter().fold(0.0, f64::max);
    base.max(10.0 * max_reach)
}

fn apply_overlaps(q: &mut Qubo, set: &CandidateSet, base: f64) {
    let penalty = effective_overlap_penalty(q, set, base);
    for r in &set.relations {
        if r.kind == RelationKind::Overlap {
            q.set_quadratic(r.i, r.j, penalty);
        }
    }
}

/// Model 1 over bp-length stems:
///
/// `h_i = c_L (k_i − μ)² − c_B k_i²`,
/// `J_ij = −(2 c_B k_i k_j δ_ij + 1)` for non-overlapping pairs with
/// `δ_ij = pk_discount` when the pair is pseudoknotted and 1 otherwise.
pub fn build_model1(set: &CandidateSet, p: &Model1Params) -> Result<Qubo, ModelError> {
    check_kind(set, ModelKind::One)?;
    let mut q = labelled(set);
    let c = &set.candidates;
    for (i, stem) in c.iter().enumerate() {
        let k = stem.weight;
        q.set_linear(i, p.c_l * (k - set.mu).powi(2) - p.c_b * k * k);
    }
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            let delta = match set.relation(i, j) {
                RelationKind::Overlap => continue,
                RelationKind::Pseudoknot { .. } => p.pk_discount,
                _ => 1.0,
            };
            q.set_quadratic(i, j, -(2.0 * p.c_b * c[i].weight * c[j].weight * delta + 1.0));
        }
    }
    apply_overlaps(&mut q, set, p.overlap_penalty);
    Ok(q)
}

/// Model 2 over stacked quartets: `h_i = −N_i`; `J_ij = −M⁺` for stacked
/// quartets, `+M⁻` for pseudoknotted ones.
pub fn build_model2(set: &CandidateSet, p: &Model2Params) -> Result<Qubo, ModelError> {
    check_kind(set, ModelKind::Two)?;
    let mut q = labelled(set);
    for (i, c) in set.candidates.iter().enumerate() {
        q.set_linear(i, -c.weight);
    }
    for r in &set.relations {
        match r.kind {
            RelationKind::Stacked { .. } => q.set_quadratic(r.i, r.j, -p.m_plus),
            RelationKind::Pseudoknot { .. } => q.set_quadratic(r.i, r.j, p.m_minus),
            _ => {}
        }
    }
    apply_overlaps(&mut q, set, p.overlap_penalty);
    Ok(q)
}

/// Pseudoknot penalty between two crossing stems of `len_a` and `len_b`
/// pairs with `n_ss` unpaired bases between them:
///
/// `P₁ ln(e² · max(n_ss, 1)) + P₂ ln(λ(len_a) + λ(len_b))`
pub fn pk_penalty(
    n_ss: usize,
    len_a: usize,
    len_b: usize,
    table: &LoopPenaltyTable,
    p: &Model3Params,
) -> f64 {
    let single_stranded = (p.e_dim * p.e_dim * n_ss.max(1) as f64).ln();
    let inline = (table.inline_stem(len_a) + table.inline_stem(len_b)).ln();
    p.p1 * single_stranded + p.p2 * inline
}

/// Model 3 over nn-energy stems:
///
/// `h_i = α (k_i − μ)² − β (k_i − l_i)` with `l_i` the hairpin penalty of
/// the stem's loop; pseudoknotted pairs couple through [`pk_penalty`].
pub fn build_model3(
    set: &CandidateSet,
    table: &LoopPenaltyTable,
    p: &Model3Params,
) -> Result<Qubo, ModelError> {
    check_kind(set, ModelKind::Three)?;
    let mut q = labelled(set);
    for (i, c) in set.candidates.iter().enumerate() {
        let loop_penalty = match table.hairpin_penalty(c.loop_size) {
            HairpinPenalty::Penalty(v) => v,
            HairpinPenalty::Forbidden => {
                return Err(ModelError::ForbiddenLoop {
                    index: i,
                    loop_size: c.loop_size,
                })
            }
        };
        let k = c.weight;
        q.set_linear(i, p.alpha * (k - set.mu).powi(2) - p.beta * (k - loop_penalty));
    }
    for r in &set.relations {
        if let RelationKind::Pseudoknot { n_ss } = r.kind {
            let (a, b) = (&set.candidates[r.i], &set.candidates[r.j]);
            q.set_quadratic(r.i, r.j, pk_penalty(n_ss, a.length, b.length, table, p));
        }
    }
    apply_overlaps(&mut q, set, p.overlap_penalty);
    Ok(q)
}

/// Dispatch to the builder matching `params`.
pub fn build(
    set: &CandidateSet,
    params: &ModelParams,
    table: &LoopPenaltyTable,
) -> Result<Qubo, ModelError> {
    match params {
        ModelParams::One(p) => build_model1(set, p),
        ModelParams::Two(p) => build_model2(set, p),
        ModelParams::Three(p) => build_model3(set, table, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stems::StemCandidate;

    fn bp_set(stems: &[(usize, usize, usize)]) -> CandidateSet {
        let c = stems
            .iter()
            .map(|&(f, l, k)| StemCandidate::new(f, l, k, k as f64))
            .collect();
        CandidateSet::new("t", 40, CandidateKind::Stem(WeightMode::BpLength), c)
    }

    fn m1(c_l: f64, c_b: f64, x: f64) -> Model1Params {
        Model1Params {
            c_l,
            c_b,
            pk_discount: x,
            overlap_penalty: DEFAULT_OVERLAP_PENALTY,
        }
    }

    #[test]
    fn model1_single_longest_stem() {
        let set = bp_set(&[(1, 14, 3)]);
        let q = build_model1(&set, &m1(0.7, 0.4, 0.5)).unwrap();
        assert!((q.linear(0) - (-0.4 * 9.0)).abs() < 1e-12);
    }

    #[test]
    fn model1_non_crossing_coupling() {
        // two nested-free, disjoint stems
        let set = bp_set(&[(1, 8, 2), (10, 17, 2)]);
        assert_eq!(set.relation(0, 1), RelationKind::Independent);
        let q = build_model1(&set, &m1(1.0, 1.0, 0.3)).unwrap();
        assert_eq!(q.quadratic(0, 1), -9.0);
    }

    #[test]
    fn model1_crossing_coupling() {
        let set = bp_set(&[(1, 10, 2), (5, 16, 2)]);
        assert!(matches!(set.relation(0, 1), RelationKind::Pseudoknot { .. }));
        let q = build_model1(&set, &m1(1.0, 1.0, 0.5)).unwrap();
        assert_eq!(q.quadratic(0, 1), -5.0);
    }

    #[test]
    fn model1_overlap_is_penalized() {
        let set = bp_set(&[(1, 14, 3), (2, 13, 2)]);
        assert_eq!(set.relation(0, 1), RelationKind::Overlap);
        let q = build_model1(&set, &Model1Params::default()).unwrap();
        assert!(q.quadratic(0, 1) >= DEFAULT_OVERLAP_PENALTY);
    }

    #[test]
    fn wrong_candidate_kind_is_rejected() {
        let set = bp_set(&[(1, 14, 3)]);
        assert!(matches!(
            build_model2(&set, &Model2Params::default()),
            Err(ModelError::WrongCandidateKind { .. })
        ));
        assert!(matches!(
            build_model3(&set, &LoopPenaltyTable::default(), &Model3Params::default()),
            Err(ModelError::WrongCandidateKind { .. })
        ));
    }

    fn quartet_set(q: &[(usize, usize, f64)]) -> CandidateSet {
        let c = q
            .iter()
            .map(|&(f, l, w)| StemCandidate::new(f, l, 2, w))
            .collect();
        CandidateSet::new("t", 40, CandidateKind::Quartet, c)
    }

    #[test]
    fn model2_terms() {
        let p = Model2Params::default();
        let set = quartet_set(&[(1, 14, 3.4), (2, 13, 2.1), (3, 12, 1.0), (6, 20, 2.0)]);
        let q = build_model2(&set, &p).unwrap();
        assert_eq!(q.linear(0), -3.4);
        assert_eq!(q.quadratic(0, 1), -p.m_plus);
        assert_eq!(q.quadratic(1, 2), -p.m_plus);
        // (1,14) and (3,12) share no base and nest: independent
        assert_eq!(q.quadratic(0, 2), 0.0);
        assert_eq!(set.relation(0, 3), RelationKind::Pseudoknot { n_ss: 12 });
        assert_eq!(q.quadratic(0, 3), p.m_minus);
        let overlapping = quartet_set(&[(1, 14, 3.4), (1, 10, 2.0)]);
        let q = build_model2(&overlapping, &p).unwrap();
        assert_eq!(q.quadratic(0, 1), 1000.0);
    }

    #[test]
    fn pk_penalty_values() {
        let table = LoopPenaltyTable::default();
        let p = |p1, p2| Model3Params {
            p1,
            p2,
            ..Model3Params::default()
        };
        // n_ss = 0 is clamped to 1; with e = 1 the first term vanishes
        assert_eq!(pk_penalty(0, 2, 2, &table, &p(1.0, 0.0)), 0.0);
        assert!((pk_penalty(7, 2, 2, &table, &p(1.0, 0.0)) - 1.945_910_149_055_313).abs() < 1e-12);
        assert!((pk_penalty(7, 2, 3, &table, &p(0.0, 1.338)) - 0.927_430_927_589_206_9).abs() < 1e-12);
        let wide = Model3Params {
            e_dim: 2.0,
            ..p(1.0, 0.0)
        };
        assert!((pk_penalty(1, 2, 2, &table, &wide) - 4f64.ln()).abs() < 1e-12);
    }

    fn nn_set(c: &[(usize, usize, usize, f64)]) -> CandidateSet {
        let c = c
            .iter()
            .map(|&(f, l, k, w)| StemCandidate::new(f, l, k, w))
            .collect();
        CandidateSet::new("t", 40, CandidateKind::Stem(WeightMode::NnEnergy), c)
    }

    #[test]
    fn model3_linear_terms() {
        let zero_loop = LoopPenaltyTable::parse("hairpin.3\t0\n").unwrap();
        let set = nn_set(&[(1, 10, 2, 4.0)]);
        let p = Model3Params::default();
        let q = build_model3(&set, &zero_loop, &p).unwrap();
        assert!((q.linear(0) - (-p.beta * 4.0)).abs() < 1e-12);

        let half = LoopPenaltyTable::parse("hairpin.3\t0.5\n").unwrap();
        let set = nn_set(&[(1, 10, 2, 3.0), (12, 30, 3, 5.0)]);
        let q = build_model3(&set, &half, &p).unwrap();
        assert!((q.linear(0) - 0.886).abs() < 1e-12);
        assert_eq!(q.num_quadratic(), 0);
    }

    #[test]
    fn model3_couplings() {
        let table = LoopPenaltyTable::default();
        let p = Model3Params::default();
        let set = nn_set(&[(1, 12, 2, 3.0), (6, 20, 3, 5.0), (6, 19, 2, 3.0)]);
        let q = build_model3(&set, &table, &p).unwrap();
        // sorted order: (1,12,2), (6,19,2), (6,20,3)
        let RelationKind::Pseudoknot { n_ss } = set.relation(0, 2) else {
            panic!("expected a pseudoknot")
        };
        assert_eq!(n_ss, 10);
        assert!((q.quadratic(0, 2) - pk_penalty(10, 2, 3, &table, &p)).abs() < 1e-12);
        assert_eq!(set.relation(0, 1), RelationKind::Pseudoknot { n_ss: 11 });
        assert!(q.quadratic(1, 2) >= DEFAULT_OVERLAP_PENALTY);
    }

    #[test]
    fn model3_forbidden_loop() {
        let set = nn_set(&[(1, 6, 2, 3.0)]);
        assert!(matches!(
            build_model3(&set, &LoopPenaltyTable::default(), &Model3Params::default()),
            Err(ModelError::ForbiddenLoop { index: 0, loop_size: 2 })
        ));
    }

    #[test]
    fn params_file_round_trip() {
        for kind in ModelKind::ALL {
            let p = ModelParams::defaults(kind);
            assert_eq!(ModelParams::from_tsv(&p.to_tsv()).unwrap(), p);
            let ones = ModelParams::preset(kind, "ones").unwrap();
            assert!(ones.vector().iter().all(|&v| v == 1.0));
        }
        let merged =
            ModelParams::merge_tsv(ModelParams::defaults(ModelKind::Three), "beta\t3.5\n").unwrap();
        assert_eq!(merged.get("beta"), Some(3.5));
        assert_eq!(merged.get("alpha"), Some(1.604));
        assert!(ModelParams::merge_tsv(ModelParams::defaults(ModelKind::One), "model\t2\n").is_err());
        assert!(ModelParams::merge_tsv(ModelParams::defaults(ModelKind::One), "alpha\t2\n").is_err());
        assert!(ModelParams::preset(ModelKind::One, "nope").is_err());
    }

    #[test]
    fn clamping_domains() {
        let mut v = vec![-1.0, -0.5, 3.0];
        ModelParams::clamp_vector(ModelKind::One, &mut v);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 0.0);
        assert_eq!(v[2], 1.0);
        let mut v = vec![-2.0, 0.5, -0.1, 4.0];
        ModelParams::clamp_vector(ModelKind::Three, &mut v);
        assert_eq!(v, vec![0.0, 0.5, 0.0, 4.0]);
    }
}
