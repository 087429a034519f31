//! Candidate stems and stacked quartets, and how pairs of them interact.
//!
//! Every candidate becomes one binary variable of a QUBO. A candidate is
//! described by its outermost pair `(first, last)` and its length in base
//! pairs; its pairs are `(first + t, last - t)` for `t < length`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::{NnTable, PairRule, RnaSequence, TableError};

#[derive(Debug, Error)]
pub enum StemError {
    #[error("minimum stem length must be at least 2, got {0}")]
    MinStemTooSmall(usize),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("candidate line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// What a stem's weight measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    /// Number of base pairs.
    BpLength,
    /// Summed nearest-neighbor stability score (−ΔG) of the stem's stacks.
    NnEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateKind {
    Stem(WeightMode),
    /// Stems of exactly two pairs weighted by the stability of their stack.
    Quartet,
}

impl CandidateKind {
    fn tag(self) -> &'static str {
        match self {
            CandidateKind::Stem(WeightMode::BpLength) => "stem-bp",
            CandidateKind::Stem(WeightMode::NnEnergy) => "stem-nn",
            CandidateKind::Quartet => "quartet",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "stem-bp" => Some(CandidateKind::Stem(WeightMode::BpLength)),
            "stem-nn" => Some(CandidateKind::Stem(WeightMode::NnEnergy)),
            "quartet" => Some(CandidateKind::Quartet),
            _ => None,
        }
    }
}

/// A potential stem (or stacked quartet when `length == 2` in quartet mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StemCandidate {
    /// 1-based index of the outermost 5' base.
    pub first: usize,
    /// 1-based index of the outermost 3' base.
    pub last: usize,
    /// Number of base pairs.
    pub length: usize,
    pub weight: f64,
    /// Unpaired bases enclosed by the innermost pair.
    pub loop_size: usize,
}

impl StemCandidate {
    pub fn new(first: usize, last: usize, length: usize, weight: f64) -> Self {
        debug_assert!(last + 1 >= first + 2 * length);
        StemCandidate {
            first,
            last,
            length,
            weight,
            loop_size: last + 1 - first - 2 * length,
        }
    }

    /// Base pairs, outermost first.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.length).map(move |t| (self.first + t, self.last - t))
    }

    /// The 5' arm `first..=first+length-1` and 3' arm `last-length+1..=last`.
    pub fn arms(&self) -> [(usize, usize); 2] {
        [
            (self.first, self.first + self.length - 1),
            (self.last + 1 - self.length, self.last),
        ]
    }

    pub fn contains_base(&self, b: usize) -> bool {
        self.arms().iter().any(|&(lo, hi)| lo <= b && b <= hi)
    }
}

/// Relation between two candidates. Exactly one kind holds for any pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationKind {
    /// The candidates share at least one base (and are not a stacked
    /// quartet pair).
    Overlap,
    /// Crossing spans without shared bases. `n_ss` counts bases in the
    /// union span that belong to neither stem.
    Pseudoknot { n_ss: usize },
    /// Quartet mode only: the inner quartet continues the outer one by one
    /// pair, sharing the pair between them. `inner` is its candidate index.
    Stacked { inner: usize },
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRelation {
    pub i: usize,
    pub j: usize,
    pub kind: RelationKind,
}

/// Upper-triangle matrix of admissible base pairs.
#[derive(Debug, Clone)]
pub struct PairMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl PairMatrix {
    /// Entry `(i, j)`, 1-based. Always false unless `i < j`.
    pub fn get(&self, i: usize, j: usize) -> bool {
        i >= 1 && i < j && j <= self.n && self.cells[(i - 1) * self.n + (j - 1)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// `(i, j)` is admissible when the bases can pair and `j - i > min_loop`.
pub fn pair_matrix(seq: &RnaSequence, rule: &PairRule, min_loop: usize) -> PairMatrix {
    let n = seq.len();
    let mut cells = vec![false; n * n];
    for i in 1..=n {
        for j in (i + min_loop + 1)..=n {
            cells[(i - 1) * n + (j - 1)] = rule.can_pair(seq.base(i), seq.base(j));
        }
    }
    PairMatrix { n, cells }
}

/// Enumerated candidates with their non-independent pairwise relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub seq_id: String,
    pub seq_len: usize,
    pub kind: CandidateKind,
    pub candidates: Vec<StemCandidate>,
    /// Sorted by `(i, j)`, `i < j`; Independent pairs are omitted.
    pub relations: Vec<PairRelation>,
    /// Largest candidate weight, 0 for an empty set.
    pub mu: f64,
}

impl CandidateSet {
    pub fn new(
        seq_id: impl Into<String>,
        seq_len: usize,
        kind: CandidateKind,
        mut candidates: Vec<StemCandidate>,
    ) -> Self {
        candidates.sort_by(|a, b| {
            (a.first, a.last, a.length).cmp(&(b.first, b.last, b.length))
        });
        let mu = candidates.iter().map(|c| c.weight).fold(0.0, f64::max);
        let relations = sweep_relations(&candidates, kind == CandidateKind::Quartet);
        CandidateSet {
            seq_id: seq_id.into(),
            seq_len,
            kind,
            candidates,
            relations,
            mu,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn is_quartets(&self) -> bool {
        self.kind == CandidateKind::Quartet
    }

    /// Relation between candidates `i` and `j`, by binary search.
    pub fn relation(&self, i: usize, j: usize) -> RelationKind {
        let key = (i.min(j), i.max(j));
        match self.relations.binary_search_by(|r| (r.i, r.j).cmp(&key)) {
            Ok(pos) => self.relations[pos].kind,
            Err(_) => RelationKind::Independent,
        }
    }

    /// Line format: a `SET id n kind` header, one `STEM first last length
    /// weight` line per candidate (0-based variable order), then one
    /// `REL i j KIND [N_SS]` line per non-independent pair.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "SET {} {} {}", self.seq_id, self.seq_len, self.kind.tag());
        for c in &self.candidates {
            let _ = writeln!(out, "STEM {} {} {} {}", c.first, c.last, c.length, c.weight);
        }
        for r in &self.relations {
            let _ = match r.kind {
                RelationKind::Overlap => writeln!(out, "REL {} {} OVERLAP", r.i, r.j),
                RelationKind::Pseudoknot { n_ss } => {
                    writeln!(out, "REL {} {} PSEUDOKNOT {}", r.i, r.j, n_ss)
                }
                RelationKind::Stacked { .. } => writeln!(out, "REL {} {} STACKED", r.i, r.j),
                RelationKind::Independent => Ok(()),
            };
        }
        out
    }

    /// Inverse of [`CandidateSet::to_lines`]. Relations are recomputed from
    /// the candidates and checked against the listed ones.
    pub fn from_lines(text: &str) -> Result<Self, StemError> {
        let mut header: Option<(String, usize, CandidateKind)> = None;
        let mut candidates = Vec::new();
        let mut listed = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: &str| StemError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.first().copied() {
                None => continue,
                Some(f) if f.starts_with('#') => continue,
                Some("SET") if fields.len() == 4 => {
                    let n = fields[2].parse().map_err(|_| err("bad length"))?;
                    let kind = CandidateKind::from_tag(fields[3]).ok_or_else(|| err("bad kind"))?;
                    header = Some((fields[1].to_string(), n, kind));
                }
                Some("STEM") if fields.len() == 5 => {
                    let num = |s: &str| s.parse::<usize>().map_err(|_| err("bad integer"));
                    let (first, last, length) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
                    let weight = fields[4].parse().map_err(|_| err("bad weight"))?;
                    if length == 0 || first == 0 || last + 1 < first + 2 * length {
                        return Err(err("stem does not fit its span"));
                    }
                    candidates.push(StemCandidate::new(first, last, length, weight));
                }
                Some("REL") if fields.len() >= 4 => {
                    let i: usize = fields[1].parse().map_err(|_| err("bad index"))?;
                    let j: usize = fields[2].parse().map_err(|_| err("bad index"))?;
                    listed.push((line_no, i, j, fields[3].to_string()));
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        let (id, n, kind) = header.ok_or(StemError::Parse {
            line: 0,
            msg: "missing SET header".into(),
        })?;
        let sorted = candidates
            .windows(2)
            .all(|w| (w[0].first, w[0].last, w[0].length) < (w[1].first, w[1].last, w[1].length));
        if !sorted {
            return Err(StemError::Parse {
                line: 0,
                msg: "STEM lines must be in (first, last, length) order".into(),
            });
        }
        let set = CandidateSet::new(id, n, kind, candidates);
        for (line, i, j, tag) in listed {
            let expected = match set.relation(i, j) {
                RelationKind::Overlap => "OVERLAP",
                RelationKind::Pseudoknot { .. } => "PSEUDOKNOT",
                RelationKind::Stacked { .. } => "STACKED",
                RelationKind::Independent => "INDEPENDENT",
            };
            if tag != expected {
                return Err(StemError::Parse {
                    line,
                    msg: format!("relation {i} {j} listed as {tag}, candidates imply {expected}"),
                });
            }
        }
        Ok(set)
    }
}

/// Summed stability score (−ΔG) over the stem's stacks.
pub fn stem_stability(
    seq: &RnaSequence,
    table: &NnTable,
    first: usize,
    last: usize,
    length: usize,
) -> Result<f64, TableError> {
    let mut total = 0.0;
    for t in 0..length.saturating_sub(1) {
        let outer = (seq.base(first + t), seq.base(last - t));
        let inner = (seq.base(first + t + 1), seq.base(last - t - 1));
        total += table.stability(outer, inner)?;
    }
    Ok(total)
}

/// Every maximal run of consecutive admissible pairs `(i, j), (i+1, j-1), …`
/// as `(first, last, run_length)`, scanning each anti-diagonal `i + j = s`.
pub fn maximal_runs(matrix: &PairMatrix) -> Vec<(usize, usize, usize)> {
    let n = matrix.n();
    let mut runs = Vec::new();
    for s in 3..=(2 * n).saturating_sub(1) {
        let lo = s.saturating_sub(n).max(1);
        let mut i = lo;
        while 2 * i < s {
            if matrix.get(i, s - i) {
                let start = i;
                while 2 * i < s && matrix.get(i, s - i) {
                    i += 1;
                }
                runs.push((start, s - start, i - start));
            } else {
                i += 1;
            }
        }
    }
    runs
}

/// All stems of at least `min_stem` pairs. A maximal run of length `L`
/// contributes `L - j + 1` stems of each length `j` in `min_stem..=L`.
///
/// Under [`WeightMode::NnEnergy`] stems whose summed stability is not
/// positive are dropped.
pub fn enumerate_stems(
    seq: &RnaSequence,
    rule: &PairRule,
    min_stem: usize,
    min_loop: usize,
    mode: WeightMode,
    table: &NnTable,
) -> Result<CandidateSet, StemError> {
    if min_stem < 2 {
        return Err(StemError::MinStemTooSmall(min_stem));
    }
    let matrix = pair_matrix(seq, rule, min_loop);
    let mut candidates = Vec::new();
    for (first, last, run) in maximal_runs(&matrix) {
        for length in min_stem..=run {
            for offset in 0..=(run - length) {
                let (f, l) = (first + offset, last - offset);
                let weight = match mode {
                    WeightMode::BpLength => length as f64,
                    WeightMode::NnEnergy => stem_stability(seq, table, f, l, length)?,
                };
                if weight > 0.0 {
                    candidates.push(StemCandidate::new(f, l, length, weight));
                }
            }
        }
    }
    Ok(CandidateSet::new(
        seq.id.clone(),
        seq.len(),
        CandidateKind::Stem(mode),
        candidates,
    ))
}

/// All two-pair stems, weighted by the stability score of their stack.
pub fn enumerate_quartets(
    seq: &RnaSequence,
    rule: &PairRule,
    min_loop: usize,
    table: &NnTable,
) -> Result<CandidateSet, StemError> {
    let matrix = pair_matrix(seq, rule, min_loop);
    let mut candidates = Vec::new();
    for (first, last, run) in maximal_runs(&matrix) {
        for offset in 0..run.saturating_sub(1) {
            let (f, l) = (first + offset, last - offset);
            let weight = stem_stability(seq, table, f, l, 2)?;
            candidates.push(StemCandidate::new(f, l, 2, weight));
        }
    }
    Ok(CandidateSet::new(
        seq.id.clone(),
        seq.len(),
        CandidateKind::Quartet,
        candidates,
    ))
}

fn arms_intersect(a: &StemCandidate, b: &StemCandidate) -> bool {
    a.arms().iter().any(|&(alo, ahi)| {
        b.arms()
            .iter()
            .any(|&(blo, bhi)| alo <= bhi && blo <= ahi)
    })
}

/// Classify one pair of candidates. `x` and `y` are candidate indices used
/// only to label the inner member of a stacked pair.
pub fn classify(
    x: (usize, &StemCandidate),
    y: (usize, &StemCandidate),
    quartets: bool,
) -> RelationKind {
    let (outer, inner) = if (x.1.first, std::cmp::Reverse(x.1.last)) <= (y.1.first, std::cmp::Reverse(y.1.last)) {
        (x, y)
    } else {
        (y, x)
    };
    let (a, b) = (outer.1, inner.1);
    if quartets
        && a.length == 2
        && b.length == 2
        && b.first == a.first + 1
        && b.last + 1 == a.last
    {
        return RelationKind::Stacked { inner: inner.0 };
    }
    if arms_intersect(a, b) {
        return RelationKind::Overlap;
    }
    if a.first < b.first && b.first < a.last && a.last < b.last {
        let span = b.last + 1 - a.first;
        return RelationKind::Pseudoknot {
            n_ss: span - 2 * (a.length + b.length),
        };
    }
    RelationKind::Independent
}

/// Non-independent relations by a line sweep over candidate spans: only
/// candidates whose `[first, last]` spans intersect can overlap, cross or
/// stack, so each candidate is compared only against the candidates that
/// start inside its span.
pub fn sweep_relations(candidates: &[StemCandidate], quartets: bool) -> Vec<PairRelation> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by_key(|&i| (candidates[i].first, i));
    let mut out = Vec::new();
    for (p, &a) in order.iter().enumerate() {
        let end = candidates[a].last;
        for &c in order[p + 1..].iter().take_while(|&&c| candidates[c].first <= end) {
            let kind = classify((a, &candidates[a]), (c, &candidates[c]), quartets);
            if kind != RelationKind::Independent {
                out.push(PairRelation {
                    i: a.min(c),
                    j: a.max(c),
                    kind,
                });
            }
        }
    }
    if !out.is_sorted_by_key(|r| (r.i, r.j)) {
        out.sort_unstable_by_key(|r| (r.i, r.j));
    }
    out
}

/// O(S²) reference for [`sweep_relations`].
pub fn brute_force_relations(candidates: &[StemCandidate], quartets: bool) -> Vec<PairRelation> {
    let mut out = Vec::new();
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            let kind = classify((i, &candidates[i]), (j, &candidates[j]), quartets);
            if kind != RelationKind::Independent {
                out.push(PairRelation { i, j, kind });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> RnaSequence {
        RnaSequence::parse(s, "t").unwrap()
    }

    fn stems(s: &str, m: usize, min_loop: usize) -> CandidateSet {
        enumerate_stems(
            &seq(s),
            &PairRule::default(),
            m,
            min_loop,
            WeightMode::BpLength,
            &NnTable::default(),
        )
        .unwrap()
    }

    /// Direct scan for admissible pairs, independent of the matrix layout.
    fn brute_pairs(s: &str, min_loop: usize) -> usize {
        let b: Vec<char> = s.chars().collect();
        let ok = |x: char, y: char| {
            matches!(
                (x, y),
                ('G', 'C') | ('C', 'G') | ('A', 'U') | ('U', 'A') | ('G', 'U') | ('U', 'G')
            )
        };
        let mut count = 0;
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                if ok(b[i], b[j]) && j - i > min_loop {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn pair_matrix_counts() {
        let m = pair_matrix(&seq("GCGCG"), &PairRule::default(), 0);
        assert_eq!(m.count(), 6);
        assert_eq!(m.count(), brute_pairs("GCGCG", 0));
        assert!(!m.get(2, 2));
        assert!(!m.get(2, 1));
        let fig = "GGAAGCAAACAUCCCUGU";
        for ml in 0..5 {
            let m = pair_matrix(&seq(fig), &PairRule::default(), ml);
            assert_eq!(m.count(), brute_pairs(fig, ml));
        }
    }

    #[test]
    fn worst_case_five_has_two_stems() {
        let set = stems("GCGCG", 2, 0);
        assert_eq!(set.len(), 2);
        assert_eq!(set.mu, 2.0);
    }

    #[test]
    fn no_complement_no_candidates() {
        assert!(stems("AAAA", 2, 0).is_empty());
        let q = enumerate_quartets(&seq("AAAA"), &PairRule::default(), 0, &NnTable::default())
            .unwrap();
        assert!(q.is_empty());
        assert_eq!(q.mu, 0.0);
    }

    #[test]
    fn quartets_of_worst_case_five() {
        let q = enumerate_quartets(&seq("GCGCG"), &PairRule::default(), 0, &NnTable::default())
            .unwrap();
        assert_eq!(q.len(), 2);
        // (1,4),(2,3) is a 5'GC/3'CG stack
        assert_eq!(q.candidates[0].first, 1);
        assert_eq!(q.candidates[0].weight, 3.4);
    }

    #[test]
    fn example_sequence_candidates() {
        let set = stems("GGAAGCAAACAUCCCUGU", 2, 3);
        let three = set
            .candidates
            .iter()
            .position(|c| c.length == 3)
            .expect("a length-3 stem");
        assert_eq!(set.candidates[three].pairs().count(), 3);
        let crossing = set.relations.iter().any(|r| {
            matches!(r.kind, RelationKind::Pseudoknot { .. })
                && set.candidates[r.i].length == 2
                && set.candidates[r.j].length == 2
        });
        assert!(crossing);
        assert_eq!(set.mu, 3.0);
    }

    #[test]
    fn example_sequence_quartets_stack_into_the_three_stem() {
        let s = seq("GGAAGCAAACAUCCCUGU");
        let q = enumerate_quartets(&s, &PairRule::default(), 3, &NnTable::default()).unwrap();
        // the length-3 stem (1,14) decomposes into quartets (1,14) and (2,13)
        let a = q.candidates.iter().position(|c| (c.first, c.last) == (1, 14)).unwrap();
        let b = q.candidates.iter().position(|c| (c.first, c.last) == (2, 13)).unwrap();
        assert_eq!(q.relation(a, b), RelationKind::Stacked { inner: b });
    }

    #[test]
    fn classify_cases() {
        let a = StemCandidate::new(1, 14, 3, 3.0);
        let shares7 = StemCandidate::new(7, 20, 2, 2.0);
        let b = StemCandidate::new(5, 8, 2, 2.0);
        assert_eq!(classify((0, &a), (1, &b), false), RelationKind::Independent);
        let c = StemCandidate::new(6, 12, 2, 2.0);
        assert_eq!(classify((0, &a), (1, &c), false), RelationKind::Overlap);
        let x = StemCandidate::new(3, 18, 2, 2.0);
        let y = StemCandidate::new(7, 22, 2, 2.0);
        let z = StemCandidate::new(2, 10, 2, 2.0);
        assert_eq!(classify((0, &y), (1, &shares7), false), RelationKind::Overlap);
        assert_eq!(classify((0, &z), (1, &shares7), false), RelationKind::Pseudoknot { n_ss: 11 });
        // span 3..=22 holds 20 bases, 8 of which are paired
        assert_eq!(classify((0, &x), (1, &y), false), RelationKind::Pseudoknot { n_ss: 12 });
        assert_eq!(classify((1, &y), (0, &x), false), RelationKind::Pseudoknot { n_ss: 12 });
        // stacked is a quartet-only notion
        let q1 = StemCandidate::new(1, 14, 2, 1.0);
        let q2 = StemCandidate::new(2, 13, 2, 1.0);
        assert_eq!(classify((0, &q1), (1, &q2), true), RelationKind::Stacked { inner: 1 });
        assert_eq!(classify((1, &q2), (0, &q1), true), RelationKind::Stacked { inner: 1 });
        assert_eq!(classify((0, &q1), (1, &q2), false), RelationKind::Overlap);
    }

    #[test]
    fn lines_round_trip() {
        let set = stems("GGAAGCAAACAUCCCUGU", 2, 3);
        let text = set.to_lines();
        assert!(text.starts_with("SET t 18 stem-bp\n"));
        assert_eq!(CandidateSet::from_lines(&text).unwrap(), set);
        let q = enumerate_quartets(
            &seq("GGAAGCAAACAUCCCUGU"),
            &PairRule::default(),
            3,
            &NnTable::default(),
        )
        .unwrap();
        assert_eq!(CandidateSet::from_lines(&q.to_lines()).unwrap(), q);
    }

    #[test]
    fn lines_reject_inconsistent_relations() {
        let set = stems("GGAAGCAAACAUCCCUGU", 2, 3);
        let text = set.to_lines().replacen("OVERLAP", "PSEUDOKNOT 0", 1);
        assert!(CandidateSet::from_lines(&text).is_err());
        assert!(CandidateSet::from_lines("STEM 1 8 2 2\n").is_err());
    }

    #[test]
    fn nn_weights_are_positive_and_sum_stacks() {
        let s = seq("GGAAGCAAACAUCCCUGU");
        let table = NnTable::default();
        let set = enumerate_stems(&s, &PairRule::default(), 2, 3, WeightMode::NnEnergy, &table)
            .unwrap();
        assert!(!set.is_empty());
        for c in &set.candidates {
            assert!(c.weight > 0.0);
            assert!(c.loop_size >= 3);
            let direct = stem_stability(&s, &table, c.first, c.last, c.length).unwrap();
            assert_eq!(c.weight, direct);
        }
    }

    #[test]
    fn rejects_min_stem_below_two() {
        let r = enumerate_stems(
            &seq("GCGC"),
            &PairRule::default(),
            1,
            0,
            WeightMode::BpLength,
            &NnTable::default(),
        );
        assert!(matches!(r, Err(StemError::MinStemTooSmall(1))));
    }
}
