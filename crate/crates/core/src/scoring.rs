//! Base-pair MCC scoring and the two-sample Kolmogorov-Smirnov statistic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("structures cover {pred} and {truth} bases")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("KS test needs two non-empty samples")]
    EmptySample,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("pair ({0}, {1}) is not 1 <= i < j <= n")]
    InvalidPair(usize, usize),
    #[error("base {0} appears in more than one pair")]
    BaseReused(usize),
}

/// A set of base pairs over a sequence of length `n`; each base pairs at
/// most once.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SecondaryStructure {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl SecondaryStructure {
    pub fn empty(n: usize) -> Self {
        SecondaryStructure {
            n,
            pairs: BTreeSet::new(),
        }
    }

    /// Pairs may be given in either orientation.
    pub fn new(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, StructureError> {
        let mut s = Self::empty(n);
        let mut used = vec![false; n + 1];
        for (a, b) in pairs {
            let (i, j) = (a.min(b), a.max(b));
            if i == 0 || i == j || j > n {
                return Err(StructureError::InvalidPair(a, b));
            }
            if s.pairs.contains(&(i, j)) {
                continue;
            }
            for x in [i, j] {
                if used[x] {
                    return Err(StructureError::BaseReused(x));
                }
                used[x] = true;
            }
            s.pairs.insert((i, j));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Partner of each base, index 0 unused; 0 means unpaired.
    pub fn partners(&self) -> Vec<usize> {
        let mut p = vec![0; self.n + 1];
        for &(i, j) in &self.pairs {
            p[i] = j;
            p[j] = i;
        }
        p
    }

    /// True iff two pairs cross (`i < k < j < l`). Runs a bracket-matching
    /// pass: a pseudoknot-free structure closes pairs in LIFO order.
    pub fn is_pseudoknotted(&self) -> bool {
        let partners = self.partners();
        let mut open = Vec::new();
        for (pos, &partner) in partners.iter().enumerate().skip(1) {
            if partner == 0 {
                continue;
            }
            if partner > pos {
                open.push(pos);
            } else if open.pop() != Some(partner) {
                return true;
            }
        }
        false
    }
}

/// Confusion counts over all `n(n−1)/2` unordered base pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Confusion { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn swapped(&self) -> Self {
        Confusion::new(self.tp, self.fn_, self.fp, self.tn)
    }
}

/// Exact-pair confusion: a predicted pair counts only if the identical
/// `(i, j)` is in the truth.
pub fn confusion(
    pred: &SecondaryStructure,
    truth: &SecondaryStructure,
) -> Result<Confusion, ScoreError> {
    if pred.n != truth.n {
        return Err(ScoreError::LengthMismatch {
            pred: pred.n,
            truth: truth.n,
        });
    }
    let tp = pred.pairs.intersection(&truth.pairs).count() as u64;
    let fp = pred.pairs.len() as u64 - tp;
    let fn_ = truth.pairs.len() as u64 - tp;
    let n = pred.n as u64;
    let universe = n * n.saturating_sub(1) / 2;
    Ok(Confusion::new(tp, fp, fn_, universe - tp - fp - fn_))
}

/// Matthews correlation coefficient; 0 when any marginal is empty.
pub fn mcc(c: &Confusion) -> f64 {
    let (tp, fp, fn_, tn) = (c.tp as f64, c.fp as f64, c.fn_ as f64, c.tn as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fn_) / denom.sqrt()
}

/// Convenience: MCC of `pred` against `truth`.
pub fn structure_mcc(
    pred: &SecondaryStructure,
    truth: &SecondaryStructure,
) -> Result<f64, ScoreError> {
    confusion(pred, truth).map(|c| mcc(&c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup_x |F_a(x) − F_b(x)|`.
    pub d: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test. The p-value uses the asymptotic
/// Kolmogorov distribution at `λ = (√nₑ + 0.12 + 0.11/√nₑ)·D` with
/// `nₑ = n_a n_b / (n_a + n_b)`.
pub fn ks_2sample(a: &[f64], b: &[f64]) -> Result<KsResult, ScoreError> {
    if a.is_empty() || b.is_empty() {
        return Err(ScoreError::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsResult {
        d,
        p_value: kolmogorov_survival(lambda),
    })
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = sign * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Large-sample critical value of D at significance `alpha`:
/// `sqrt(−ln(α/2)/2) · sqrt((n_a + n_b)/(n_a n_b))`.
pub fn ks_critical_value(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (na, nb) = (na as f64, nb as f64);
    c * ((na + nb) / (na * nb)).sqrt()
}

/// One row of a score report.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub id: String,
    pub model: String,
    pub pseudoknotted: bool,
    pub confusion: Confusion,
    pub mcc: f64,
}

impl ScoreRow {
    pub const HEADER: &'static str = "id\tmodel\tpseudoknotted\ttp\tfp\tfn\ttn\tmcc";

    pub fn to_tsv(&self) -> String {
        let c = &self.confusion;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}",
            self.id, self.model, self.pseudoknotted, c.tp, c.fp, c.fn_, c.tn, self.mcc
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(n: usize, pairs: &[(usize, usize)]) -> SecondaryStructure {
        SecondaryStructure::new(n, pairs.iter().copied()).unwrap()
    }

    /// Reference crossing check over all pairs of pairs.
    fn crosses_brute(s: &SecondaryStructure) -> bool {
        let p: Vec<_> = s.pairs().iter().copied().collect();
        p.iter().any(|&(i, j)| p.iter().any(|&(k, l)| i < k && k < j && j < l))
    }

    #[test]
    fn structure_validation() {
        assert_eq!(
            SecondaryStructure::new(5, [(1, 6)]),
            Err(StructureError::InvalidPair(1, 6))
        );
        assert_eq!(
            SecondaryStructure::new(5, [(2, 2)]),
            Err(StructureError::InvalidPair(2, 2))
        );
        assert_eq!(
            SecondaryStructure::new(8, [(1, 5), (5, 8)]),
            Err(StructureError::BaseReused(5))
        );
        let s = st(8, &[(5, 1), (1, 5)]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn confusion_examples() {
        let truth = st(10, &[(1, 10), (2, 9), (3, 8)]);
        assert_eq!(confusion(&truth, &truth).unwrap(), Confusion::new(3, 0, 0, 42));
        let empty = SecondaryStructure::empty(10);
        assert_eq!(confusion(&empty, &truth).unwrap(), Confusion::new(0, 0, 3, 42));
        assert!(matches!(
            confusion(&SecondaryStructure::empty(9), &truth),
            Err(ScoreError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn shifted_stem_shares_no_pairs() {
        // known stem (4, 13, 3) against predicted (5, 14, 3)
        let known = st(20, &[(4, 13), (5, 12), (6, 11)]);
        let pred = st(20, &[(5, 14), (6, 13), (7, 12)]);
        let c = confusion(&pred, &known).unwrap();
        assert_eq!((c.tp, c.fp, c.fn_), (0, 3, 3));
        assert!(mcc(&c) < 0.0);
    }

    #[test]
    fn mcc_examples() {
        assert_eq!(mcc(&Confusion::new(3, 0, 0, 42)), 1.0);
        assert_eq!(mcc(&Confusion::new(0, 0, 3, 42)), 0.0);
        assert!((mcc(&Confusion::new(3, 1, 1, 10)) - 29.0 / 44.0).abs() < 1e-12);
        assert_eq!(mcc(&Confusion::new(0, 0, 0, 0)), 0.0);
    }

    #[test]
    fn ks_examples() {
        let a = [0.3, 0.1, 0.7];
        let r = ks_2sample(&a, &a).unwrap();
        assert_eq!(r.d, 0.0);
        assert_eq!(r.p_value, 1.0);
        let r = ks_2sample(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.d, 1.0);
        assert!(r.p_value < 0.1);
        assert_eq!(ks_2sample(&[], &[1.0]), Err(ScoreError::EmptySample));
    }

    /// Evaluate both empirical CDFs at every sample point.
    fn ks_brute(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_interleaved_samples() {
        let a = [0.1, 0.4, 0.7];
        let b = [0.2, 0.5, 0.8, 0.9];
        let d = ks_2sample(&a, &b).unwrap().d;
        // at x = 0.7: F_a = 1, F_b = 2/4
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(d, ks_brute(&a, &b));
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 5e-4);
        assert!((ks_critical_value(0.05, 20, 20) - 1.3581 * (0.1f64).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn score_row_format() {
        let row = ScoreRow {
            id: "x".into(),
            model: "3".into(),
            pseudoknotted: true,
            confusion: Confusion::new(3, 1, 1, 10),
            mcc: 29.0 / 44.0,
        };
        assert_eq!(row.to_tsv(), "x\t3\ttrue\t3\t1\t1\t10\t0.659091");
    }

    fn arb_structure(n: usize) -> impl Strategy<Value = SecondaryStructure> {
        proptest::collection::vec((1..=n, 1..=n), 0..n).prop_map(move |raw| {
            let mut used = vec![false; n + 1];
            let mut pairs = Vec::new();
            for (a, b) in raw {
                if a != b && !used[a] && !used[b] {
                    used[a] = true;
                    used[b] = true;
                    pairs.push((a, b));
                }
            }
            SecondaryStructure::new(n, pairs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mcc_is_symmetric(a in arb_structure(30), b in arb_structure(30)) {
            let ab = confusion(&a, &b).unwrap();
            let ba = confusion(&b, &a).unwrap();
            prop_assert_eq!(ab.swapped(), ba);
            prop_assert_eq!(ab.total(), 30 * 29 / 2);
            prop_assert_eq!(mcc(&ab), mcc(&ba));
            let m = mcc(&ab);
            prop_assert!((-1.0..=1.0).contains(&m));
        }

        #[test]
        fn pseudoknot_check_matches_brute_force(s in arb_structure(24)) {
            prop_assert_eq!(s.is_pseudoknotted(), crosses_brute(&s));
        }

        #[test]
        fn ks_is_symmetric(
            a in proptest::collection::vec(-5.0f64..5.0, 1..30),
            b in proptest::collection::vec(-5.0f64..5.0, 1..30),
        ) {
            let ab = ks_2sample(&a, &b).unwrap();
            let ba = ks_2sample(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab.d));
            prop_assert_eq!(ab.d, ks_brute(&a, &b));
        }
    }
}
